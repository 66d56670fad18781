//! Random sampling of rotations, SPD matrices, subspaces and involutions.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Result, SrError};
use crate::grassmann::{phi_mp, Involution, Subspace};
use crate::manifold::{compose_f, EigenPoint, PosDiag, Rotation, SpdMatrix};

fn gaussian<R: Rng + ?Sized>(rng: &mut R, r: usize, c: usize) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

/// Orthonormal p×m frame, Haar distributed (QR of a Gaussian matrix with
/// the sign of R's diagonal fixed).
fn haar_frame<R: Rng + ?Sized>(rng: &mut R, p: usize, m: usize) -> DMatrix<f64> {
    let qr = gaussian(rng, p, m).qr();
    let mut q = qr.q().columns(0, m).into_owned();
    let r = qr.r();
    for j in 0..m {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Haar-random element of SO(p).
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R, p: usize) -> Rotation {
    let mut q = haar_frame(rng, p, p);
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    Rotation::new_unchecked(q)
}

pub fn random_subspace<R: Rng + ?Sized>(rng: &mut R, p: usize, m: usize) -> Result<Subspace> {
    if m > p {
        return Err(SrError::BadDimension(format!("{m}-plane in R^{p}")));
    }
    Subspace::new(haar_frame(rng, p, m))
}

/// Φ(W) for a random m-plane W, so the level is m.
pub fn random_involution<R: Rng + ?Sized>(rng: &mut R, p: usize, m: usize) -> Result<Involution> {
    phi_mp(&random_subspace(rng, p, m)?)
}

/// Diagonal with log-eigenvalues in [−2, 2], constant on the blocks of
/// `pattern` (sizes, in order), distinct blocks at least 0.1 apart in log.
pub fn random_pos_diag<R: Rng + ?Sized>(rng: &mut R, pattern: &[usize]) -> PosDiag {
    let r = pattern.len();
    let logs: Vec<f64> = loop {
        let v: Vec<f64> = (0..r).map(|_| rng.random_range(-2.0..2.0)).collect();
        let ok = (0..r).all(|i| (i + 1..r).all(|j| (v[i] - v[j]).abs() >= 0.1));
        if ok {
            break v;
        }
    };
    let mut out = Vec::new();
    for (&size, &l) in pattern.iter().zip(&logs) {
        out.extend(std::iter::repeat_n(l.exp(), size));
    }
    PosDiag::new_unchecked(out)
}

/// Random SPD matrix whose eigenvalue multiplicities are `pattern`.
pub fn random_spd<R: Rng + ?Sized>(rng: &mut R, pattern: &[usize]) -> SpdMatrix {
    let d = random_pos_diag(rng, pattern);
    let u = random_rotation(rng, d.dim());
    compose_f(&EigenPoint { u, d })
}
