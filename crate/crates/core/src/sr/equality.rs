use super::MssrCurve;
use crate::error::{Result, SrError};
use crate::manifold::{compose_f, EigenPoint, Rotation};
use crate::quat::{gamma_hat, lift, phi, Quat};

fn same_endpoints(c1: &MssrCurve, c2: &MssrCurve) -> bool {
    let close = |a: &EigenPoint, b: &EigenPoint| {
        let (x, y) = (compose_f(a), compose_f(b));
        let scale = x.matrix().amax().max(1.0);
        (x.matrix() - y.matrix()).amax() <= 1e-6 * scale
    };
    close(&c1.start, &c2.start) && close(&c1.end, &c2.end)
}

fn logs_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x.ln() - y.ln()).abs() <= tol)
}

/// π_ζ read off the signed permutation matrix φ(ζ): π(j) is the row of the
/// nonzero entry in column j.
fn perm_of(m: &Rotation) -> Vec<usize> {
    let m = m.matrix();
    (0..3)
        .map(|j| (0..3).max_by(|&a, &b| m[(a, j)].abs().partial_cmp(&m[(b, j)].abs()).unwrap()).unwrap())
        .collect()
}

/// Whether φ(r) lies in the identity component of the joint stabilizer of
/// (D, Λ): ±1 when all pairs (dᵢ, λᵢ) differ, a rotation about e_c when
/// exactly the pair {a, b} coincides, anything when all coincide.
fn in_g0(r: &Quat, d: &[f64], l: &[f64], tol: f64) -> bool {
    let same = |i: usize, j: usize| (d[i].ln() - d[j].ln()).abs() <= tol && (l[i].ln() - l[j].ln()).abs() <= tol;
    let pairs: Vec<(usize, usize)> = [(0, 1), (0, 2), (1, 2)].into_iter().filter(|&(i, j)| same(i, j)).collect();
    match pairs.len() {
        0 => r.im_norm() <= tol,
        1 => {
            let (a, b) = pairs[0];
            let c = 3 - a - b;
            (0..3).filter(|&i| i != c).all(|i| r.x[i + 1].abs() <= tol)
        }
        _ => true,
    }
}

/// Equality of two MSSR curves between the same endpoints, p = 3, via the
/// quaternionic criterion: q(V₂U₂ᵀ) = ±q(V₁U₁ᵀ) and some ζ in the
/// 48-element preimage of the signed permutation matrices satisfies
/// D₂ = π_ζ·D₁, Λ₂ = π_ζ·Λ₁ with q(U₁ᵀU₂)·ζ in the identity component
/// of the joint stabilizer.
pub fn curves_equal_p3(c1: &MssrCurve, c2: &MssrCurve, tol: f64) -> Result<bool> {
    if c1.start.dim() != 3 || c2.start.dim() != 3 {
        return Err(SrError::BadDimension("the quaternionic criterion is for p = 3".into()));
    }
    if !same_endpoints(c1, c2) {
        return Err(SrError::MismatchedEndpoints);
    }
    let a1 = lift(&c1.end.u.mul(&c1.start.u.transpose()));
    let a2 = lift(&c2.end.u.mul(&c2.start.u.transpose()));
    if a1.sign_free_diff(&a2) > tol {
        return Ok(false);
    }
    let m = lift(&c1.start.u.transpose().mul(&c2.start.u));
    let (d1, l1) = (c1.start.d.values(), c1.end.d.values());
    let (d2, l2) = (c2.start.d.values(), c2.end.d.values());
    for zeta in gamma_hat() {
        let perm = perm_of(&phi(&zeta));
        let mut pd = [0.0; 3];
        let mut pl = [0.0; 3];
        for j in 0..3 {
            pd[perm[j]] = d1[j];
            pl[perm[j]] = l1[j];
        }
        if !logs_close(&pd, d2, tol) || !logs_close(&pl, l2, tol) {
            continue;
        }
        if in_g0(&(m * zeta), d1, l1, tol) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Equality for any p: A₁ = A₂ and M = U₁ᵀU₂ carries log D₂, log Λ₂ onto
/// log D₁, log Λ₁ by conjugation, so that the diagonal paths agree.
pub fn curves_equal_matrix(c1: &MssrCurve, c2: &MssrCurve, tol: f64) -> Result<bool> {
    if c1.start.dim() != c2.start.dim() {
        return Err(SrError::DimensionMismatch("curves of different size".into()));
    }
    if !same_endpoints(c1, c2) {
        return Err(SrError::MismatchedEndpoints);
    }
    if (c1.a.matrix() - c2.a.matrix()).amax() > tol {
        return Ok(false);
    }
    let m = c1.start.u.matrix().transpose() * c2.start.u.matrix();
    let conj_ok = |a: &EigenPoint, b: &EigenPoint| {
        let la = a.d.to_matrix().map(|x| if x > 0.0 { x.ln() } else { 0.0 });
        let lb = b.d.to_matrix().map(|x| if x > 0.0 { x.ln() } else { 0.0 });
        (&m * lb * m.transpose() - la).amax() <= tol
    };
    Ok(conj_ok(&c1.start, &c2.start) && conj_ok(&c1.end, &c2.end))
}
