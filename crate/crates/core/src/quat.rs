//! Unit quaternions as the double cover of SO(3), and the hypercomplex
//! split q = z + w j with z = x₀ + x₁i, w = x₂ + x₃i.

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Mul, Neg};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, SrError};
use crate::manifold::{is_involution, Rotation};

/// Quaternion x₀ + x₁i + x₂j + x₃k. Unit norm is expected but not enforced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quat {
    pub x: [f64; 4],
}

pub type UnitQuaternion = Quat;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperComplex {
    pub z: Complex64,
    pub w: Complex64,
}

/// Signed permutation induced on diagonal entries by φ(ζ).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZetaPerm {
    Id,
    P13,
    P12,
}

impl ZetaPerm {
    /// One-line notation, 0-based.
    pub fn perm(&self) -> [usize; 3] {
        match self {
            ZetaPerm::Id => [0, 1, 2],
            ZetaPerm::P13 => [2, 1, 0],
            ZetaPerm::P12 => [1, 0, 2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosetEntry {
    pub label: &'static str,
    pub zeta: Quat,
    pub perm: ZetaPerm,
}

impl Quat {
    pub const ONE: Quat = Quat { x: [1.0, 0.0, 0.0, 0.0] };
    pub const I: Quat = Quat { x: [0.0, 1.0, 0.0, 0.0] };
    pub const J: Quat = Quat { x: [0.0, 0.0, 1.0, 0.0] };
    pub const K: Quat = Quat { x: [0.0, 0.0, 0.0, 1.0] };

    pub fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Quat { x: [x0, x1, x2, x3] }
    }

    pub fn from_complex(c: Complex64) -> Self {
        Quat::new(c.re, c.im, 0.0, 0.0)
    }

    pub fn from_hypercomplex(h: &HyperComplex) -> Self {
        Quat::new(h.z.re, h.z.im, h.w.re, h.w.im)
    }

    pub fn re(&self) -> f64 {
        self.x[0]
    }

    pub fn conj(&self) -> Quat {
        Quat::new(self.x[0], -self.x[1], -self.x[2], -self.x[3])
    }

    pub fn norm(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn im_norm(&self) -> f64 {
        (self.x[1] * self.x[1] + self.x[2] * self.x[2] + self.x[3] * self.x[3]).sqrt()
    }

    pub fn normalize(&self) -> Quat {
        let n = self.norm();
        Quat::new(self.x[0] / n, self.x[1] / n, self.x[2] / n, self.x[3] / n)
    }

    pub fn scale(&self, s: f64) -> Quat {
        Quat::new(self.x[0] * s, self.x[1] * s, self.x[2] * s, self.x[3] * s)
    }

    pub fn add(&self, o: &Quat) -> Quat {
        Quat::new(self.x[0] + o.x[0], self.x[1] + o.x[1], self.x[2] + o.x[2], self.x[3] + o.x[3])
    }

    pub fn sub(&self, o: &Quat) -> Quat {
        self.add(&-*o)
    }

    pub fn max_abs_diff(&self, o: &Quat) -> f64 {
        (0..4).map(|i| (self.x[i] - o.x[i]).abs()).fold(0.0, f64::max)
    }

    /// Distance up to sign: min(|q − o|∞, |q + o|∞).
    pub fn sign_free_diff(&self, o: &Quat) -> f64 {
        self.max_abs_diff(o).min(self.max_abs_diff(&-*o))
    }

    pub fn hypercomplex(&self) -> HyperComplex {
        HyperComplex { z: Complex64::new(self.x[0], self.x[1]), w: Complex64::new(self.x[2], self.x[3]) }
    }

    /// x₀ ≥ 0, and if x₀ = 0 the first nonzero imaginary coordinate is positive.
    pub fn gauge(&self) -> Quat {
        let lead = self.x.iter().copied().find(|v| *v != 0.0).unwrap_or(1.0);
        if self.x[0] < 0.0 || (self.x[0] == 0.0 && lead < 0.0) {
            -*self
        } else {
            *self
        }
    }
}

impl Mul for Quat {
    type Output = Quat;
    fn mul(self, o: Quat) -> Quat {
        let [a0, a1, a2, a3] = self.x;
        let [b0, b1, b2, b3] = o.x;
        Quat::new(
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        )
    }
}

impl Neg for Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        self.scale(-1.0)
    }
}

impl HyperComplex {
    pub fn quat(&self) -> Quat {
        Quat::from_hypercomplex(self)
    }

    pub fn zbar_w(&self) -> Complex64 {
        self.z.conj() * self.w
    }
}

/// φ(q)(x) = q x q̄ as a 3×3 matrix.
pub fn phi(q: &Quat) -> Rotation {
    let [w, x, y, z] = q.x;
    Rotation::new_unchecked(DMatrix::from_row_slice(
        3,
        3,
        &[
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ))
}

/// A quaternion q with φ(q) = R, in the sign gauge of [`Quat::gauge`].
/// Defined everywhere (including involutions, where the sign is arbitrary).
pub fn lift(r: &Rotation) -> Quat {
    let m = r.matrix();
    let tr = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
    let cand = [tr, m[(0, 0)], m[(1, 1)], m[(2, 2)]];
    let mut best = 0;
    for i in 1..4 {
        if cand[i] > cand[best] {
            best = i;
        }
    }
    let q = match best {
        0 => {
            let s = 2.0 * (1.0 + tr).sqrt();
            Quat::new(0.25 * s, (m[(2, 1)] - m[(1, 2)]) / s, (m[(0, 2)] - m[(2, 0)]) / s, (m[(1, 0)] - m[(0, 1)]) / s)
        }
        1 => {
            let s = 2.0 * (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt();
            Quat::new((m[(2, 1)] - m[(1, 2)]) / s, 0.25 * s, (m[(0, 1)] + m[(1, 0)]) / s, (m[(0, 2)] + m[(2, 0)]) / s)
        }
        2 => {
            let s = 2.0 * (1.0 - m[(0, 0)] + m[(1, 1)] - m[(2, 2)]).sqrt();
            Quat::new((m[(0, 2)] - m[(2, 0)]) / s, (m[(0, 1)] + m[(1, 0)]) / s, 0.25 * s, (m[(1, 2)] + m[(2, 1)]) / s)
        }
        _ => {
            let s = 2.0 * (1.0 - m[(0, 0)] - m[(1, 1)] + m[(2, 2)]).sqrt();
            Quat::new((m[(1, 0)] - m[(0, 1)]) / s, (m[(0, 2)] + m[(2, 0)]) / s, (m[(1, 2)] + m[(2, 1)]) / s, 0.25 * s)
        }
    };
    q.normalize().gauge()
}

/// s(R) = cos(θ/2) + sin(θ/2)ã; refuses involutions (θ = π).
pub fn half_angle_lift(r: &Rotation) -> Result<Quat> {
    if r.dim() != 3 {
        return Err(SrError::BadDimension("quaternions parametrize SO(3)".into()));
    }
    if is_involution(r) {
        return Err(SrError::AtCutLocus);
    }
    Ok(lift(r))
}

/// 2·acos|Re(q̄₁q₂)|, computed via atan2 for accuracy near 0.
pub fn quat_distance(q1: &Quat, q2: &Quat) -> f64 {
    let r = q1.conj() * *q2;
    2.0 * f64::atan2(r.im_norm(), r.re().abs())
}

/// (z, w) of s(UᵀV).
pub fn hypercomplex_split(u: &Rotation, v: &Rotation) -> Result<HyperComplex> {
    Ok(half_angle_lift(&u.transpose().mul(v))?.hypercomplex())
}

/// (φ̃, β, β′) = (acos max(|z|,|w|), acos √((1+2|Re z̄w|)/2), acos √((1+2|Im z̄w|)/2)).
pub fn varphi_beta(zw: &HyperComplex) -> (f64, f64, f64) {
    let m = zw.z.norm().max(zw.w.norm()).min(1.0);
    let p = zw.zbar_w();
    let f = |x: f64| ((1.0 + 2.0 * x.abs()) / 2.0).clamp(0.0, 1.0).sqrt().acos();
    (m.acos(), f(p.re), f(p.im))
}

pub fn zeta_j(eps: f64) -> Quat {
    Quat::new(FRAC_1_SQRT_2, 0.0, eps * FRAC_1_SQRT_2, 0.0)
}

pub fn zeta_k(eps: f64) -> Quat {
    Quat::new(FRAC_1_SQRT_2, 0.0, 0.0, eps * FRAC_1_SQRT_2)
}

/// (Z_{1,*}, Z_{1,1}): representatives of the coset spaces used by the
/// mid→top and mid→mid formulas, with their induced permutations.
pub fn coset_tables() -> (Vec<CosetEntry>, Vec<CosetEntry>) {
    let star = vec![
        CosetEntry { label: "1", zeta: Quat::ONE, perm: ZetaPerm::Id },
        CosetEntry { label: "j", zeta: Quat::J, perm: ZetaPerm::Id },
        CosetEntry { label: "zeta_j+", zeta: zeta_j(1.0), perm: ZetaPerm::P13 },
        CosetEntry { label: "zeta_j-", zeta: zeta_j(-1.0), perm: ZetaPerm::P13 },
        CosetEntry { label: "zeta_k+", zeta: zeta_k(1.0), perm: ZetaPerm::P12 },
        CosetEntry { label: "zeta_k-", zeta: zeta_k(-1.0), perm: ZetaPerm::P12 },
    ];
    let one = vec![star[0], star[1], star[2]];
    (star, one)
}

/// The 48 unit quaternions whose images are signed permutation matrices.
pub fn gamma_hat() -> Vec<Quat> {
    let mut out = Vec::with_capacity(48);
    for a in 0..4 {
        for s in [1.0, -1.0] {
            let mut x = [0.0; 4];
            x[a] = s;
            out.push(Quat { x });
        }
    }
    for a in 0..4 {
        for b in a + 1..4 {
            for sa in [1.0, -1.0] {
                for sb in [1.0, -1.0] {
                    let mut x = [0.0; 4];
                    x[a] = sa * FRAC_1_SQRT_2;
                    x[b] = sb * FRAC_1_SQRT_2;
                    out.push(Quat { x });
                }
            }
        }
    }
    for m in 0..16u32 {
        let x = [0, 1, 2, 3].map(|i| if m >> i & 1 == 1 { -0.5 } else { 0.5 });
        out.push(Quat { x });
    }
    out
}

/// Unit complex number ξ/|ξ|.
pub fn unit(c: Complex64) -> Complex64 {
    c / c.norm()
}
