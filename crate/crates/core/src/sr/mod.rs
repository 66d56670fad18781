//! Scaling-rotation distance and minimal smooth scaling-rotation (MSSR) curves.

mod algorithm;
mod classify;
mod distance;
mod equality;
mod oracle;

pub use algorithm::{stepwise_mssr, stepwise_mssr_from_points};
pub use classify::{classify_mssr, classify_mssr_from_points, classify_mssr_with, minimal_pairs};
pub use distance::{d_sr, d_sr_with, ell_values, top_top_candidates, DistanceReport};
pub use equality::{curves_equal_matrix, curves_equal_p3};
pub use oracle::brute_force_oracle;

use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Result, SrError};
use crate::manifold::{compose_f, eigen_decompose, so_exp, so_log, EigenPoint, PosDiag, Rotation, SkewMatrix, SpdMatrix};
use crate::partition::partition_of_diag;
use crate::quat::{phi, zeta_j, Quat};
use crate::tol::{TAU_EIG, TIE_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrOptions {
    pub k: f64,
    /// Log-scale tolerance for merging eigenvalues into strata.
    pub tol_eig: f64,
    /// Absolute tolerance for ties in length and sign comparisons.
    pub tol_tie: f64,
}

impl Default for SrOptions {
    fn default() -> Self {
        SrOptions { k: 1.0, tol_eig: TAU_EIG, tol_tie: TIE_TOL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CurveClass {
    A1,
    A2,
    B1,
    B2,
    C1,
    C2,
    A1p,
    A2p,
    Bp,
    Cp,
    Generic,
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CurveClass::A1 => "A1",
            CurveClass::A2 => "A2",
            CurveClass::B1 => "B1",
            CurveClass::B2 => "B2",
            CurveClass::C1 => "C1",
            CurveClass::C2 => "C2",
            CurveClass::A1p => "A1'",
            CurveClass::A2p => "A2'",
            CurveClass::Bp => "B'",
            CurveClass::Cp => "C'",
            CurveClass::Generic => "generic",
        };
        f.write_str(s)
    }
}

/// Eigenvalue pattern of a point, after tolerance merging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StratumKind {
    /// All eigenvalues distinct.
    Top,
    /// p = 3 with exactly two distinct eigenvalues.
    Mid,
    /// Isotropic.
    Bottom,
    /// Any other repeated pattern (p > 3).
    Partial,
}

impl fmt::Display for StratumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StratumKind::Top => "top",
            StratumKind::Mid => "mid",
            StratumKind::Bottom => "bottom",
            StratumKind::Partial => "partial",
        };
        f.write_str(s)
    }
}

/// γ(t) = (exp(tA)U₁, exp(tL)D) and its projection χ(t) = F(γ(t)).
#[derive(Debug, Clone, PartialEq)]
pub struct MssrCurve {
    pub start: EigenPoint,
    pub end: EigenPoint,
    pub a: SkewMatrix,
    /// log Λ₁ − log D, entrywise.
    pub l: Vec<f64>,
    pub class_label: CurveClass,
    pub length: f64,
    pub k: f64,
}

impl MssrCurve {
    /// The geodesic from `start` to `end` with A = log(V₁U₁ᵀ).
    pub fn from_pair(start: EigenPoint, end: EigenPoint, k: f64, class_label: CurveClass) -> Self {
        let vu = end.u.mul(&start.u.transpose());
        let a = so_log(&vu).principal;
        let l: Vec<f64> = start.d.values().iter().zip(end.d.values()).map(|(d, x)| x.ln() - d.ln()).collect();
        let length = (k * a.half_norm_sq() + l.iter().map(|x| x * x).sum::<f64>()).sqrt();
        MssrCurve { start, end, a, l, class_label, length, k }
    }

    pub fn point_at(&self, t: f64) -> EigenPoint {
        let u = so_exp(&self.a.scale(t)).mul(&self.start.u);
        let logs: Vec<f64> = self.start.d.logs().iter().zip(&self.l).map(|(d, l)| d + t * l).collect();
        EigenPoint { u, d: PosDiag::from_logs(&logs) }
    }

    pub fn eval(&self, t: f64) -> SpdMatrix {
        compose_f(&self.point_at(t))
    }

    pub fn reversed(&self) -> MssrCurve {
        MssrCurve::from_pair(self.end.clone(), self.start.clone(), self.k, self.class_label)
    }
}

/// χ(t) for t ∈ [0, 1].
pub fn eval_curve(c: &MssrCurve, t: f64) -> SpdMatrix {
    c.eval(t)
}

/// ℓ-values of the three branches; `ell_12` is absent when Y is in the
/// middle stratum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllTriple {
    pub ell_id: f64,
    pub ell_13: f64,
    pub ell_12: Option<f64>,
}

impl EllTriple {
    pub fn min(&self) -> f64 {
        self.ell_id.min(self.ell_13).min(self.ell_12.unwrap_or(f64::INFINITY))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Cardinality {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(n) => write!(f, "{n}"),
            Cardinality::Infinite => f.write_str("INFINITE"),
        }
    }
}

/// The circle of class C′ curves for a same-axis pair, after V is replaced
/// by U: member R ∈ G⁰_D gives the minimal pair
/// ((UR, D), (UR φ(ζ_{j,+})⁻¹, π₁₃·Λ)).
#[derive(Debug, Clone, PartialEq)]
pub struct CPrimeFamily {
    pub u: Rotation,
    pub d: PosDiag,
    pub lambda: PosDiag,
    pub k: f64,
}

impl CPrimeFamily {
    /// Member for r = e^{iθ/2}, i.e. R = rotation about e₁ by θ.
    pub fn member(&self, theta: f64) -> MssrCurve {
        let r = Quat::new((theta / 2.0).cos(), (theta / 2.0).sin(), 0.0, 0.0);
        let ur = self.u.mul(&phi(&r));
        let z = phi(&zeta_j(1.0));
        let l = self.lambda.values();
        let end = EigenPoint { u: ur.mul(&z.transpose()), d: PosDiag::new_unchecked(vec![l[2], l[1], l[0]]) };
        MssrCurve::from_pair(EigenPoint { u: ur, d: self.d.clone() }, end, self.k, CurveClass::Cp)
    }

    /// n members evenly spaced on the circle.
    pub fn sample(&self, n: usize) -> Vec<MssrCurve> {
        (0..n).map(|m| self.member(2.0 * std::f64::consts::PI * m as f64 / n as f64)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MssrSet {
    /// The finitely many curves; for an infinite set, the finite part only.
    pub curves: Vec<MssrCurve>,
    pub cardinality: Cardinality,
    pub case_tag: String,
    pub family: Option<CPrimeFamily>,
    pub distance: f64,
}

/// A canonical pre-image of X together with its stratum. For p = 3 middle
/// stratum, D = diag(d₁, d₂, d₂) with the simple eigenvalue first and the
/// repeated pair snapped to its geometric mean.
pub fn canonical_point(x: &SpdMatrix, tol_eig: f64) -> Result<(EigenPoint, StratumKind)> {
    let e = eigen_decompose(x)?;
    let p = x.dim();
    let part = partition_of_diag(&e.d, tol_eig);
    let r = part.num_blocks();
    if r == p {
        return Ok((e, StratumKind::Top));
    }
    let vals = e.d.values();
    if r == 1 {
        let g = (vals.iter().map(|v| v.ln()).sum::<f64>() / p as f64).exp();
        return Ok((EigenPoint { u: Rotation::identity(p), d: PosDiag::new_unchecked(vec![g; p]) }, StratumKind::Bottom));
    }
    if p != 3 {
        return Ok((e, StratumKind::Partial));
    }
    let u = e.u.matrix();
    if (vals[0].ln() - vals[1].ln()) <= tol_eig {
        // oblate: a = b > c; move the simple eigenvector to the front (cyclic, det +1)
        let g = (vals[0] * vals[1]).sqrt();
        let mut m = DMatrix::zeros(3, 3);
        m.set_column(0, &u.column(2));
        m.set_column(1, &u.column(0));
        m.set_column(2, &u.column(1));
        Ok((EigenPoint { u: Rotation::new_unchecked(m), d: PosDiag::new_unchecked(vec![vals[2], g, g]) }, StratumKind::Mid))
    } else {
        let g = (vals[1] * vals[2]).sqrt();
        Ok((EigenPoint { u: e.u.clone(), d: PosDiag::new_unchecked(vec![vals[0], g, g]) }, StratumKind::Mid))
    }
}

/// Three-way comparison of `x` with 0: ties within tol/10, strict beyond
/// tol, and an error inside the ambiguous band between.
pub(crate) fn compare(x: f64, tol: f64, what: &str) -> Result<std::cmp::Ordering> {
    use std::cmp::Ordering::*;
    let a = x.abs();
    if a <= tol / 10.0 {
        Ok(Equal)
    } else if a < tol {
        Err(SrError::Degenerate(format!("{what} = {x:.3e} is inside the ambiguity band")))
    } else if x > 0.0 {
        Ok(Greater)
    } else {
        Ok(Less)
    }
}
