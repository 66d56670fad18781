//! Involutions of SO(p) as points of Grassmannians, principal angles, and
//! sign-change reducibility.
//!
//! An involution R of level m is determined by its (−1)-eigenspace W, and
//! R = Φ(W) = I − 2P_W. Under Φ the metric on Gr_m(R^p) is scaled by 2.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SrError};
use crate::manifold::{d_so_identity_sq, is_involution, level, normal_form, EigenPoint, PosDiag, Rotation};
use crate::signed_perm::{SignChange, SignedPerm};
use crate::sr::top_top_candidates;
use crate::tol::{REDUCE_MARGIN, TAU_EIG};

/// Largest p for which the C(p, m) coordinate-plane scans are allowed.
pub const MAX_SCAN_P: usize = 14;

const ORTHONORMAL_TOL: f64 = 1e-10;

/// An m-dimensional subspace of R^p given by an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let m = basis.ncols();
        if m > basis.nrows() {
            return Err(SrError::BadDimension(format!("{m} columns in R^{}", basis.nrows())));
        }
        let g = basis.transpose() * &basis - DMatrix::identity(m, m);
        if g.amax() > ORTHONORMAL_TOL {
            return Err(SrError::InvalidInput("basis is not orthonormal".into()));
        }
        Ok(Subspace { basis })
    }

    /// Column space of a full-rank p×m matrix, orthonormalized by QR.
    pub fn span(m: DMatrix<f64>) -> Result<Self> {
        let k = m.ncols();
        if k > m.nrows() {
            return Err(SrError::BadDimension(format!("{k} columns in R^{}", m.nrows())));
        }
        let qr = m.qr();
        let r = qr.r();
        let scale = r.amax().max(1.0);
        if (0..k).any(|i| r[(i, i)].abs() <= 1e-12 * scale) {
            return Err(SrError::InvalidInput("spanning set is rank deficient".into()));
        }
        Ok(Subspace { basis: qr.q().columns(0, k).into_owned() })
    }

    /// R^J, spanned by e_j for j ∈ J (0-based).
    pub fn coordinate(p: usize, j: &[usize]) -> Result<Self> {
        if j.iter().any(|&i| i >= p) {
            return Err(SrError::BadDimension(format!("index out of range for p = {p}")));
        }
        let mut b = DMatrix::zeros(p, j.len());
        for (c, &i) in j.iter().enumerate() {
            b[(i, c)] = 1.0;
        }
        Subspace::new(b)
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn p(&self) -> usize {
        self.basis.nrows()
    }

    pub fn m(&self) -> usize {
        self.basis.ncols()
    }

    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    /// Same column space: equal dimension and all principal angles below 1e-8.
    pub fn same_space(&self, other: &Subspace) -> bool {
        self.p() == other.p()
            && self.m() == other.m()
            && principal_angles(self, other).is_ok_and(|a| a.iter().all(|&x| x < 1e-8))
    }
}

/// A rotation with R² = I and R ≠ I.
#[derive(Debug, Clone, PartialEq)]
pub struct Involution {
    r: Rotation,
    level: usize,
}

impl Involution {
    pub fn new(r: Rotation) -> Result<Self> {
        let level = level(&r)?;
        Ok(Involution { r, level })
    }

    pub fn rotation(&self) -> &Rotation {
        &self.r
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.r.dim()
    }
}

/// Φ_{m,p}(W) = I − 2P_W.
pub fn phi_mp(w: &Subspace) -> Result<Involution> {
    let (p, m) = (w.p(), w.m());
    if m == 0 {
        return Err(SrError::BadDimension("the zero subspace maps to the identity".into()));
    }
    if m % 2 == 1 {
        return Err(SrError::OddDimension);
    }
    let r = DMatrix::identity(p, p) - w.projector() * 2.0;
    Ok(Involution { r: Rotation::new_unchecked(r), level: m })
}

/// E_{−1}(R), an orthonormal basis of the (−1)-eigenspace.
pub fn e_minus(r: &Involution) -> Result<Subspace> {
    let m = r.r.matrix();
    if !is_involution(&r.r) {
        return Err(SrError::NotInvolution);
    }
    let e = SymmetricEigen::new((m + m.transpose()) * 0.5);
    let cols: Vec<usize> = (0..m.nrows()).filter(|&i| e.eigenvalues[i] <= -1.0 + TAU_EIG).collect();
    let mut b = DMatrix::zeros(m.nrows(), cols.len());
    for (c, &i) in cols.iter().enumerate() {
        b.set_column(c, &e.eigenvectors.column(i));
    }
    Ok(Subspace { basis: b })
}

/// Principal angles in ascending order, min(m₁, m₂) of them. Small angles
/// come from the sines (singular values of the residual (I − P_Z)W) and
/// large ones from the cosines, which keeps both ends accurate.
pub fn principal_angles(w: &Subspace, z: &Subspace) -> Result<Vec<f64>> {
    if w.p() != z.p() {
        return Err(SrError::DimensionMismatch(format!("R^{} vs R^{}", w.p(), z.p())));
    }
    let (a, b) = if w.m() <= z.m() { (w, z) } else { (z, w) };
    let m = a.m();
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut cos: Vec<f64> = (a.basis.transpose() * &b.basis).singular_values().iter().copied().collect();
    cos.sort_by(|x, y| y.partial_cmp(x).unwrap());
    cos.truncate(m);
    let resid = &a.basis - &b.basis * (b.basis.transpose() * &a.basis);
    let mut sin: Vec<f64> = resid.singular_values().iter().copied().collect();
    sin.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut out: Vec<f64> = cos
        .iter()
        .zip(&sin)
        .map(|(&c, &s)| {
            let c = c.clamp(-1.0, 1.0);
            if c * c >= 0.5 {
                s.clamp(-1.0, 1.0).asin()
            } else {
                c.acos()
            }
        })
        .collect();
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(out)
}

pub fn d_gr(w: &Subspace, z: &Subspace) -> Result<f64> {
    if w.m() != z.m() {
        return Err(SrError::DimensionMismatch(format!("Gr_{} vs Gr_{}", w.m(), z.m())));
    }
    Ok(principal_angles(w, z)?.iter().map(|x| x * x).sum::<f64>().sqrt())
}

/// Principal angles between E_{−1}(R₁), E_{−1}(R₂) next to the halved
/// redundant normal-form angles of R₁R₂ (each 2×2 angle listed twice,
/// plus a 0 for odd p), both sorted descending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfAngleReport {
    pub principal: Vec<f64>,
    pub half_normal: Vec<f64>,
}

impl HalfAngleReport {
    /// Greedy injection of the principal angles into `half_normal`; returns
    /// the used flags, or None if some principal angle has no partner.
    fn matching(&self, tol: f64) -> Option<Vec<bool>> {
        let mut used = vec![false; self.half_normal.len()];
        for &phi in &self.principal {
            let best = (0..self.half_normal.len())
                .filter(|&i| !used[i])
                .min_by(|&a, &b| {
                    (self.half_normal[a] - phi).abs().partial_cmp(&(self.half_normal[b] - phi).abs()).unwrap()
                })?;
            if (self.half_normal[best] - phi).abs() > tol {
                return None;
            }
            used[best] = true;
        }
        Some(used)
    }

    /// Each principal angle equals a distinct entry of `half_normal`, and
    /// every unmatched entry is 0 or π/2 (θ̃ ∈ {0, π}).
    ///
    /// This literal form fails whenever R₁R₂ has a rotation angle strictly
    /// between 0 and π: that angle occurs twice among the redundant angles
    /// and only one copy can be matched. See [`Self::paired_relation_holds`].
    pub fn relation_holds(&self, tol: f64) -> bool {
        let Some(used) = self.matching(tol) else { return false };
        self.half_normal
            .iter()
            .zip(&used)
            .filter(|(_, &u)| !u)
            .all(|(&h, _)| is_edge(h, tol))
    }

    /// The matching above, where each unmatched entry is either 0 or π/2,
    /// or the second copy of a matched entry strictly inside (0, π/2).
    pub fn paired_relation_holds(&self, tol: f64) -> bool {
        let Some(used) = self.matching(tol) else { return false };
        let mut partners: Vec<f64> = self
            .half_normal
            .iter()
            .zip(&used)
            .filter(|(&h, &u)| u && !is_edge(h, tol))
            .map(|(&h, _)| h)
            .collect();
        for (&h, _) in self.half_normal.iter().zip(&used).filter(|(_, &u)| !u) {
            if is_edge(h, tol) {
                continue;
            }
            match partners.iter().position(|&x| (x - h).abs() <= tol) {
                Some(i) => {
                    partners.swap_remove(i);
                }
                None => return false,
            }
        }
        true
    }
}

fn is_edge(h: f64, tol: f64) -> bool {
    h.abs() <= tol || (h - PI / 2.0).abs() <= tol
}

pub fn half_angle_check(r1: &Involution, r2: &Involution) -> Result<HalfAngleReport> {
    if r1.dim() != r2.dim() {
        return Err(SrError::DimensionMismatch(format!("SO({}) vs SO({})", r1.dim(), r2.dim())));
    }
    let p = r1.dim();
    let mut principal = principal_angles(&e_minus(r1)?, &e_minus(r2)?)?;
    principal.reverse();
    let nf = normal_form(&r1.r.mul(&r2.r));
    let mut half_normal = Vec::with_capacity(p);
    for (i, th) in nf.angles.iter().enumerate() {
        half_normal.push(th / 2.0);
        if 2 * i + 1 < p {
            half_normal.push(th / 2.0);
        }
    }
    half_normal.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(HalfAngleReport { principal, half_normal })
}

/// A sign-change that strictly shortens the distance to the identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reduction {
    pub sigma: SignChange,
    pub old_distance: f64,
    pub new_distance: f64,
}

/// Searches even sign-changes σ ≠ id with d_SO(R I_σ, I) < d_SO(R, I) − 1e-12
/// and returns the best one (lexicographically first among ties). Only
/// levels below 2·level(R) are tried, since no other level can reduce;
/// `level_filter` restricts the search to one level.
pub fn sign_change_reducible(r: &Involution, level_filter: Option<usize>) -> Option<Reduction> {
    let p = r.dim();
    let old_sq = d_so_identity_sq(&r.r);
    let old = old_sq.sqrt();
    let cands: Vec<SignChange> = SignChange::all_even(p)
        .into_iter()
        .filter(|s| {
            let l = s.level();
            l > 0 && l < 2 * r.level && level_filter.is_none_or(|f| f == l)
        })
        .collect();
    cands
        .into_par_iter()
        .filter_map(|s| {
            let d = d_so_identity_sq(&Rotation::new_unchecked(r.r.matrix() * s.mat())).sqrt();
            (d < old - REDUCE_MARGIN).then_some((d, s))
        })
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(&b.1)))
        .map(|(d, sigma)| Reduction { sigma, old_distance: old, new_distance: d })
}

/// All m-subsets of 0..p in lexicographic order.
pub fn combinations(p: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if m > p {
        return out;
    }
    let mut c: Vec<usize> = (0..m).collect();
    loop {
        out.push(c.clone());
        let Some(i) = (0..m).rev().find(|&i| c[i] < p - m + i) else { break };
        c[i] += 1;
        for j in i + 1..m {
            c[j] = c[j - 1] + 1;
        }
    }
    out
}

fn scan_guard(w: &Subspace) -> Result<()> {
    if w.p() > MAX_SCAN_P {
        return Err(SrError::TooLarge(format!("coordinate-plane scan needs p <= {MAX_SCAN_P}, got {}", w.p())));
    }
    Ok(())
}

fn rows(w: &Subspace, j: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(j.len(), w.m(), |r, c| w.basis[(j[r], c)])
}

/// Nearest coordinate m-plane R^J to W (J 0-based), and whether it lies
/// strictly inside the covering radius, d² < mπ²/8.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestPlane {
    pub j: Vec<usize>,
    pub dist: f64,
    pub covered: bool,
}

fn argmin_over_planes(w: &Subspace, f: impl Fn(&[usize]) -> f64 + Sync) -> (Vec<usize>, f64) {
    combinations(w.p(), w.m())
        .into_par_iter()
        .map(|j| (f(&j), j))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then_with(|| a.1.cmp(&b.1)))
        .map(|(v, j)| (j, v))
        .expect("at least one coordinate plane")
}

pub fn best_coordinate_plane(w: &Subspace) -> Result<BestPlane> {
    scan_guard(w)?;
    let p = w.p();
    let (j, sq) = argmin_over_planes(w, |j| {
        let rj = Subspace::coordinate(p, j).expect("valid indices");
        principal_angles(w, &rj).expect("same p").iter().map(|x| x * x).sum()
    });
    let m = w.m() as f64;
    Ok(BestPlane { j, dist: sq.sqrt(), covered: sq < m * PI * PI / 8.0 })
}

/// Σᵢ sin²φ_{J,i} = m − ‖W_J‖²_F, where W_J holds the rows J of the basis.
fn sum_sin2(w: &Subspace, j: &[usize]) -> f64 {
    w.m() as f64 - rows(w, j).norm_squared()
}

/// A coordinate plane J minimizing Σ sin²φ_{J,i}; the minimum never
/// exceeds m(1 − m/p).
pub fn sin2_bound_witness(w: &Subspace) -> Result<(Vec<usize>, f64)> {
    scan_guard(w)?;
    Ok(argmin_over_planes(w, |j| sum_sin2(w, j)))
}

/// Mean over all J of Σᵢ cos²φ_{J,i}; equals m²/p.
pub fn mean_cos2_over_planes(w: &Subspace) -> Result<f64> {
    scan_guard(w)?;
    let js = combinations(w.p(), w.m());
    let n = js.len() as f64;
    Ok(js.iter().map(|j| rows(w, j).norm_squared()).sum::<f64>() / n)
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Σ_{J ∈ J_{m,p}} E_J E_Jᵀ = C(p−1, m−1)·I, checked in integer arithmetic.
pub fn combinat_identity(p: usize, m: usize) -> bool {
    if m == 0 || m > p {
        return false;
    }
    let mut acc = vec![vec![0u64; p]; p];
    for j in combinations(p, m) {
        // E_J E_Jᵀ is the 0/1 diagonal indicator of J
        for &a in &j {
            for &b in &j {
                if a == b {
                    acc[a][b] += 1;
                }
            }
        }
    }
    let c = binomial(p - 1, m - 1);
    (0..p).all(|a| (0..p).all(|b| acc[a][b] == if a == b { c } else { 0 }))
}

/// W_p = span{v̂, ŵ}: v̂ the normalized sum of e₁..e_k, ŵ of e_{k+1}..e_{2k},
/// with k = ⌊p/2⌋.
pub fn counterexample_wp(p: usize) -> Result<Subspace> {
    if p < 4 {
        return Err(SrError::BadDimension(format!("W_p needs p >= 4, got {p}")));
    }
    let k = p / 2;
    let s = 1.0 / (k as f64).sqrt();
    let mut b = DMatrix::zeros(p, 2);
    for i in 0..k {
        b[(i, 0)] = s;
        b[(k + i, 1)] = s;
    }
    Subspace::new(b)
}

/// W′_p for odd p = 2k+1: v = Σ eᵢ and w = Σ_{i≤k} eᵢ − Σ_{k<i≤2k} eᵢ, normalized.
pub fn counterexample_wp_prime(p: usize) -> Result<Subspace> {
    if p < 5 || p.is_multiple_of(2) {
        return Err(SrError::BadDimension(format!("W'_p needs odd p >= 5, got {p}")));
    }
    let k = p / 2;
    let (sv, sw) = (1.0 / (p as f64).sqrt(), 1.0 / ((p - 1) as f64).sqrt());
    let mut b = DMatrix::zeros(p, 2);
    for i in 0..p {
        b[(i, 0)] = sv;
    }
    for i in 0..k {
        b[(i, 1)] = sw;
        b[(k + i, 1)] = -sw;
    }
    Subspace::new(b)
}

/// √2·acos(c_p) with c_p = √(2/p) for even p and √(2/(p−1)) for odd p.
pub fn wp_closed_form(p: usize) -> f64 {
    let q = (p - p % 2) as f64;
    2f64.sqrt() * (2.0 / q).sqrt().acos()
}

/// Diagonals D, Λ = e^{c₁}D with gaps aᵢ₊₁ − aᵢ > (2√p + 1)c₁ for
/// c = k·diam(SO(p))² and c₁ = √(c/(3p)). Any permutation other than the
/// identity then costs more than c in the diagonal term, so when (U, V) is
/// not sign-change reducible ((U, D), (V, Λ)) is a minimal pair.
pub fn nscr_minimal_pair(u: &Rotation, v: &Rotation, k: f64) -> Result<(PosDiag, PosDiag)> {
    let p = u.dim();
    if v.dim() != p {
        return Err(SrError::DimensionMismatch(format!("SO({p}) vs SO({})", v.dim())));
    }
    if k.is_nan() || k <= 0.0 {
        return Err(SrError::InvalidInput("k must be positive".into()));
    }
    let c = k * diam_so_sq(p);
    let c1 = (c / (3.0 * p as f64)).sqrt();
    let step = 1.01 * (2.0 * (p as f64).sqrt() + 1.0) * c1;
    let mid = (p as f64 - 1.0) / 2.0;
    let a: Vec<f64> = (0..p).map(|i| (i as f64 - mid) * step).collect();
    let d = PosDiag::from_logs(&a);
    let l = PosDiag::from_logs(&a.iter().map(|x| x + c1).collect::<Vec<_>>());
    Ok((d, l))
}

/// diam(SO(p))² = ⌊p/2⌋π².
pub fn diam_so_sq(p: usize) -> f64 {
    (p / 2) as f64 * PI * PI
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NscrCheck {
    /// ‖log(D⁻¹(π·Λ))‖² > ‖log(D⁻¹Λ)‖² + c for every π ≠ id.
    pub gap_holds: bool,
    pub d_m: f64,
    /// min over all g ∈ S̃_p⁺ of the candidate distance.
    pub d_enum: f64,
}

pub fn nscr_verify(u: &Rotation, v: &Rotation, d: &PosDiag, l: &PosDiag, k: f64) -> Result<NscrCheck> {
    let p = u.dim();
    let c = k * diam_so_sq(p);
    let diag_sq = |x: &PosDiag| d.values().iter().zip(x.values()).map(|(a, b)| (b.ln() - a.ln()).powi(2)).sum::<f64>();
    let base = diag_sq(l);
    let gap_holds = SignedPerm::enumerate_all(p)?
        .into_iter()
        .filter(|g| g.signs.iter().all(|&s| s == 1) && g.perm.iter().enumerate().any(|(i, &j)| i != j))
        .all(|g| diag_sq(&g.act_on_diag(l)) > base + c);
    let ex = EigenPoint { u: u.clone(), d: d.clone() };
    let ey = EigenPoint { u: v.clone(), d: l.clone() };
    let d_m = crate::manifold::d_m(k, &ex, &ey);
    let d_enum = top_top_candidates(&ex, &ey, k, 0.0)?[0].1;
    Ok(NscrCheck { gap_holds, d_m, d_enum })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(4, 4), vec![vec![0, 1, 2, 3]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(11, 1), 11);
        assert_eq!(binomial(12, 6), 924);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn small_angles_are_accurate() {
        let t: f64 = 1e-9;
        let w = Subspace::coordinate(3, &[0]).unwrap();
        let z = Subspace::new(DMatrix::from_column_slice(3, 1, &[t.cos(), t.sin(), 0.0])).unwrap();
        let a = principal_angles(&w, &z).unwrap();
        assert!((a[0] - t).abs() < 1e-20);
    }
}
