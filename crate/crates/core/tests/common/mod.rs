#![allow(dead_code)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use srgeom::manifold::{compose_f, EigenPoint, PosDiag, Rotation, SpdMatrix};
use srgeom::quat::{phi, varphi_beta, Quat};

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn spd(u: &Rotation, logs: &[f64]) -> SpdMatrix {
    compose_f(&EigenPoint { u: u.clone(), d: PosDiag::from_logs(logs) })
}

pub fn diag(vals: &[f64]) -> SpdMatrix {
    SpdMatrix::from_diag(vals).unwrap()
}

pub fn max_abs_diff(a: &SpdMatrix, b: &SpdMatrix) -> f64 {
    (a.matrix() - b.matrix()).amax()
}

pub fn rot(q: Quat) -> Rotation {
    phi(&q.normalize())
}

pub fn mat(rows: &[&[f64]]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

/// An engineered p = 3 pair with the number of MSSR curves it must produce
/// (`None` for an infinite set).
pub struct Instance {
    pub name: &'static str,
    pub x: SpdMatrix,
    pub y: SpdMatrix,
    pub k: f64,
    pub expected: Option<usize>,
}

/// X prolate with logs (1, 0, 0); Y triaxial with logs (0.8, 0.3, −0.4).
const XL: [f64; 3] = [1.0, 0.0, 0.0];
const YL: [f64; 3] = [0.8, 0.3, -0.4];

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

fn diag_terms(l: &[f64; 3]) -> (f64, f64, f64) {
    let d_id = sq(&XL, l);
    let d_13 = sq(&XL, &[l[2], l[1], l[0]]);
    let d_12 = sq(&XL, &[l[1], l[0], l[2]]);
    (d_id, d_13, d_12)
}

/// q = (1 + e^{iψ} j)/√2, so |z| = |w| and z̄w = e^{iψ}/2.
fn balanced(psi: f64) -> Quat {
    Quat::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2 * psi.cos(), FRAC_1_SQRT_2 * psi.sin())
}

/// k that makes ℓ_id = ℓ_13 for the mid→top pair with rotation q.
fn k_tie_id_13(q: Quat, l: &[f64; 3]) -> f64 {
    let (vphi, beta, _) = varphi_beta(&q.normalize().hypercomplex());
    let (d_id, d_13, _) = diag_terms(l);
    (d_13 - d_id) / (4.0 * (vphi * vphi - beta * beta))
}

fn ell12_minus_id(psi: f64) -> f64 {
    let q = balanced(psi);
    let k = k_tie_id_13(q, &YL);
    let (vphi, _, beta_p) = varphi_beta(&q.hypercomplex());
    let (d_id, _, d_12) = diag_terms(&YL);
    4.0 * k * (beta_p * beta_p - vphi * vphi) + d_12 - d_id
}

/// ψ with ℓ_id = ℓ_13 = ℓ_12 for the balanced rotation, by bisection.
fn triple_tie_psi() -> f64 {
    let (mut lo, mut hi) = (1e-3, PI / 2.0 - 1e-3);
    assert!(ell12_minus_id(lo) > 0.0 && ell12_minus_id(hi) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ell12_minus_id(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn mid_top(name: &'static str, q: Quat, k: f64, expected: usize) -> Instance {
    Instance { name, x: spd(&Rotation::identity(3), &XL), y: spd(&rot(q), &YL), k, expected: Some(expected) }
}

pub fn mid_top_instances() -> Vec<Instance> {
    let generic = Quat::new(0.9, 0.2, 0.3, 0.25);
    let generic2 = Quat::new(0.6, 0.35, 0.5, 0.3);
    let psi_triple = triple_tie_psi();
    vec![
        mid_top("generic", generic, 1.0, 1),
        mid_top("|z|=|w| on the id branch", balanced(0.7), 0.1, 2),
        mid_top("id = 13 tie", generic2, k_tie_id_13(generic2, &YL), 2),
        mid_top("id = 13 tie with |z|=|w|", balanced(0.3), k_tie_id_13(balanced(0.3), &YL), 3),
        mid_top("id = 13 = 12 tie with |z|=|w|", balanced(psi_triple), k_tie_id_13(balanced(psi_triple), &YL), 4),
    ]
}

/// X prolate logs (1, 0, 0); Y prolate logs (0.6, −0.2, −0.2).
const YM: [f64; 3] = [0.6, -0.2, -0.2];

fn mid_mid(name: &'static str, q: Quat, k: f64, expected: Option<usize>) -> Instance {
    Instance { name, x: spd(&Rotation::identity(3), &XL), y: spd(&rot(q), &YM), k, expected }
}

pub fn mid_mid_instances() -> Vec<Instance> {
    let (d_id, d_13, _) = diag_terms(&YM);
    let oblate = [-0.5, 0.5, 0.5];
    vec![
        mid_mid("generic", Quat::new(0.9, 0.2, 0.3, 0.25), 1.0, Some(1)),
        mid_mid("|z|=|w| on the id branch", balanced(0.4), 0.1, Some(2)),
        mid_mid("id = 13 tie with |z|=|w|", balanced(0.4), (d_13 - d_id) / (PI * PI / 4.0), Some(3)),
        Instance {
            name: "same axis, prolate and oblate",
            x: spd(&Rotation::identity(3), &XL),
            y: spd(&Rotation::identity(3), &oblate),
            k: 0.5,
            expected: None,
        },
    ]
}

/// Same-axis prolate X and oblate Y with (a − b)(l₂ − l₁) = 1: the C′ family
/// appears iff k π²/8 ≤ 1.
pub fn same_axis_pair(k: f64) -> (SpdMatrix, SpdMatrix, f64) {
    (spd(&Rotation::identity(3), &XL), spd(&Rotation::identity(3), &[-0.5, 0.5, 0.5]), k)
}
