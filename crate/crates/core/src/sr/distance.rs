use std::f64::consts::FRAC_PI_4;

use serde::Serialize;

use super::{canonical_point, EllTriple, SrOptions, StratumKind};
use crate::error::{Result, SrError};
use crate::manifold::{d_so_identity_sq, EigenPoint, Rotation, SpdMatrix};
use crate::quat::{lift, varphi_beta};
use crate::signed_perm::SignedPerm;
use crate::tol::TAU_EIG;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceReport {
    pub distance: f64,
    pub stratum_x: StratumKind,
    pub stratum_y: StratumKind,
    /// "bottom", "top-top", or the minimizing ℓ-branch ("id", "13", "12").
    pub branch: String,
    pub ells: Option<EllTriple>,
}

pub fn d_sr(x: &SpdMatrix, y: &SpdMatrix, k: f64, tol: f64) -> Result<f64> {
    let opts = SrOptions { k, tol_eig: tol, ..SrOptions::default() };
    Ok(d_sr_with(x, y, &opts)?.distance)
}

fn sq_log_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (y.ln() - x.ln()).powi(2)).sum()
}

pub fn d_sr_with(x: &SpdMatrix, y: &SpdMatrix, opts: &SrOptions) -> Result<DistanceReport> {
    if x.dim() != y.dim() {
        return Err(SrError::DimensionMismatch(format!("{} vs {}", x.dim(), y.dim())));
    }
    if opts.k.is_nan() || opts.k <= 0.0 {
        return Err(SrError::InvalidInput("k must be positive".into()));
    }
    let (ex, sx) = canonical_point(x, opts.tol_eig)?;
    let (ey, sy) = canonical_point(y, opts.tol_eig)?;
    let report = |distance: f64, branch: &str, ells: Option<EllTriple>| DistanceReport {
        distance,
        stratum_x: sx,
        stratum_y: sy,
        branch: branch.to_string(),
        ells,
    };
    if sx == StratumKind::Bottom || sy == StratumKind::Bottom {
        let (c, other) = if sx == StratumKind::Bottom { (ex.d.values()[0], y) } else { (ey.d.values()[0], x) };
        let ev = other.eigenvalues();
        let cs = vec![c; ev.len()];
        return Ok(report(sq_log_diff(&cs, &ev).sqrt(), "bottom", None));
    }
    match (sx, sy) {
        (StratumKind::Top, StratumKind::Top) => {
            let best = top_top_candidates(&ex, &ey, opts.k, 0.0)?;
            Ok(report(best[0].1, "top-top", None))
        }
        (StratumKind::Mid, StratumKind::Top) | (StratumKind::Mid, StratumKind::Mid) => {
            let e = ell_values(&ex, &ey, opts.k)?;
            Ok(report(e.min(), branch_of(&e), Some(e)))
        }
        (StratumKind::Top, StratumKind::Mid) => {
            let e = ell_values(&ey, &ex, opts.k)?;
            Ok(report(e.min(), branch_of(&e), Some(e)))
        }
        _ => Err(SrError::Unsupported(format!(
            "p = {} with repeated but not fully isotropic eigenvalues",
            x.dim()
        ))),
    }
}

fn branch_of(e: &EllTriple) -> &'static str {
    let m = e.min();
    if e.ell_id == m {
        "id"
    } else if e.ell_13 == m {
        "13"
    } else {
        "12"
    }
}

/// All g ∈ S̃_p⁺ whose candidate distance
/// (k·d_SO(U, V P_g⁻¹)² + ‖log(D⁻¹ π_g·Λ)‖²)^{1/2} is within `slack` of the
/// minimum, sorted by distance. Permutations are visited in order of
/// increasing diagonal term so the rotation term is skipped once the
/// diagonal alone exceeds the best value.
pub fn top_top_candidates(ex: &EigenPoint, ey: &EigenPoint, k: f64, slack: f64) -> Result<Vec<(SignedPerm, f64)>> {
    let p = ex.dim();
    let all = SignedPerm::enumerate_even(p)?;
    let m = ex.u.transpose().mul(&ey.u);
    let mut scored: Vec<(f64, SignedPerm)> = all
        .into_iter()
        .map(|g| (sq_log_diff(ex.d.values(), g.act_on_diag(&ey.d).values()), g))
        .collect();
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(&b.1)));
    let mut best = f64::INFINITY;
    let mut out: Vec<(SignedPerm, f64)> = Vec::new();
    for (diag, g) in scored {
        if diag.sqrt() > best + slack {
            break;
        }
        let r = Rotation::new_unchecked(m.matrix() * g.mat().transpose());
        let d = (k * d_so_identity_sq(&r) + diag).sqrt();
        if d < best {
            best = d;
        }
        if d <= best + slack {
            out.push((g, d));
        }
    }
    out.retain(|(_, d)| *d <= best + slack);
    out.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}

fn in_j1(d: &[f64]) -> bool {
    let l: Vec<f64> = d.iter().map(|v| v.ln()).collect();
    (l[1] - l[2]).abs() <= TAU_EIG && (l[0] - l[1]).abs() > TAU_EIG
}

fn all_distinct(d: &[f64]) -> bool {
    let l: Vec<f64> = d.iter().map(|v| v.ln()).collect();
    (0..3).all(|i| (i + 1..3).all(|j| (l[i] - l[j]).abs() > TAU_EIG))
}

/// ℓ-values for X in the middle stratum (D ∈ D_{J₁}) and Y in the top
/// stratum, or in the middle stratum with Λ ∈ D_{J₁}.
pub fn ell_values(ex: &EigenPoint, ey: &EigenPoint, k: f64) -> Result<EllTriple> {
    if ex.dim() != 3 || ey.dim() != 3 {
        return Err(SrError::WrongStratum("ℓ-values are defined for p = 3".into()));
    }
    let d = ex.d.values();
    let l = ey.d.values();
    if !in_j1(d) {
        return Err(SrError::WrongStratum("X must have D = diag(d1, d2, d2) with d1 ≠ d2".into()));
    }
    let y_mid = in_j1(l);
    if !y_mid && !all_distinct(l) {
        return Err(SrError::WrongStratum("Y must be triaxial or have Λ = diag(l1, l2, l2)".into()));
    }
    let q = lift(&ex.u.transpose().mul(&ey.u));
    let (vphi, beta, beta_p) = varphi_beta(&q.hypercomplex());
    let p13 = [l[2], l[1], l[0]];
    let p12 = [l[1], l[0], l[2]];
    let ell_id = (4.0 * k * vphi * vphi + sq_log_diff(d, l)).sqrt();
    if y_mid {
        let a = FRAC_PI_4 - vphi;
        let ell_13 = (4.0 * k * a * a + sq_log_diff(d, &p13)).sqrt();
        Ok(EllTriple { ell_id, ell_13, ell_12: None })
    } else {
        let ell_13 = (4.0 * k * beta * beta + sq_log_diff(d, &p13)).sqrt();
        let ell_12 = (4.0 * k * beta_p * beta_p + sq_log_diff(d, &p12)).sqrt();
        Ok(EllTriple { ell_id, ell_13, ell_12: Some(ell_12) })
    }
}
