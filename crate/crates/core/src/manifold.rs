//! Dense linear algebra on SO(p), Diag⁺(p) and Sym⁺(p).
//!
//! Points of M = SO(p) × Diag⁺(p) are eigen-decompositions (U, D) of SPD
//! matrices X = U D Uᵀ. The metric on M is the product of the bi-invariant
//! metric on SO(p), d_SO(U,V)² = ½‖log(UᵀV)‖²_F, and the flat metric on
//! log-eigenvalues, weighted by k on the rotation factor.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Result, SrError};
use crate::tol::{TAU_EIG, TAU_ORTH, TAU_SYM};

/// A p×p rotation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation(DMatrix<f64>);

/// Strictly positive diagonal, stored as the vector of diagonal entries.
#[derive(Debug, Clone, PartialEq)]
pub struct PosDiag(Vec<f64>);

/// Symmetric positive-definite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix(DMatrix<f64>);

/// Skew-symmetric matrix, an element of so(p).
#[derive(Debug, Clone, PartialEq)]
pub struct SkewMatrix(DMatrix<f64>);

/// A point (U, D) of M with U D Uᵀ = X.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPoint {
    pub u: Rotation,
    pub d: PosDiag,
}

/// R = Q · blockdiag(C(θ₁), …, C(θ_k), [1]) · Qᵀ with θ sorted descending.
///
/// For odd p the trailing 1×1 block is reported as an extra angle 0, so
/// `angles.len() == ⌈p/2⌉`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalForm {
    pub angles: Vec<f64>,
    pub frame: DMatrix<f64>,
}

/// Principal logarithm of a rotation plus the cut-locus flag.
#[derive(Debug, Clone, PartialEq)]
pub struct SoLog {
    pub principal: SkewMatrix,
    pub is_cut_locus: bool,
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
}

fn is_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(SrError::BadDimension(format!(
            "expected a nonempty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

impl Rotation {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let p = is_square(&m)?;
        let tol = TAU_ORTH * (p as f64).max(1.0);
        let e = &m * m.transpose() - DMatrix::identity(p, p);
        if max_abs(&e) > tol {
            return Err(SrError::InvalidInput("matrix is not orthogonal".into()));
        }
        if (m.determinant() - 1.0).abs() > tol {
            return Err(SrError::InvalidInput("rotation must have determinant +1".into()));
        }
        Ok(Rotation(m))
    }

    /// Nearest rotation in Frobenius norm (polar factor), for inputs that are
    /// orthogonal only to a few digits. Fails if the input is far from SO(p).
    pub fn nearest(m: DMatrix<f64>, tol: f64) -> Result<Self> {
        let p = is_square(&m)?;
        let svd = m.clone().svd(true, true);
        let (u, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
        let r = &u * &vt;
        if max_abs(&(&r - &m)) > tol {
            return Err(SrError::InvalidInput("matrix is not close to orthogonal".into()));
        }
        if r.determinant() < 0.0 {
            return Err(SrError::InvalidInput("rotation must have determinant +1".into()));
        }
        let _ = p;
        Ok(Rotation(r))
    }

    pub fn new_unchecked(m: DMatrix<f64>) -> Self {
        Rotation(m)
    }

    pub fn identity(p: usize) -> Self {
        Rotation(DMatrix::identity(p, p))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn transpose(&self) -> Rotation {
        Rotation(self.0.transpose())
    }

    pub fn mul(&self, other: &Rotation) -> Rotation {
        Rotation(&self.0 * &other.0)
    }
}

impl PosDiag {
    pub fn new(d: Vec<f64>) -> Result<Self> {
        if d.is_empty() {
            return Err(SrError::BadDimension("empty diagonal".into()));
        }
        if d.iter().any(|&x| !x.is_finite() || x <= 0.0) {
            return Err(SrError::InvalidInput("diagonal entries must be positive".into()));
        }
        Ok(PosDiag(d))
    }

    pub fn new_unchecked(d: Vec<f64>) -> Self {
        PosDiag(d)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn logs(&self) -> Vec<f64> {
        self.0.iter().map(|x| x.ln()).collect()
    }

    pub fn from_logs(l: &[f64]) -> Self {
        PosDiag(l.iter().map(|x| x.exp()).collect())
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_column_slice(&self.0))
    }
}

impl SpdMatrix {
    /// Checks symmetry (relative τ_sym) and positive-definiteness (Cholesky).
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        is_square(&m)?;
        let scale = max_abs(&m).max(f64::MIN_POSITIVE);
        if max_abs(&(&m - m.transpose())) > TAU_SYM * scale {
            return Err(SrError::NotSpd);
        }
        let sym = (&m + m.transpose()) * 0.5;
        if sym.iter().any(|x| !x.is_finite()) || sym.clone().cholesky().is_none() {
            return Err(SrError::NotSpd);
        }
        Ok(SpdMatrix(sym))
    }

    pub fn new_unchecked(m: DMatrix<f64>) -> Self {
        SpdMatrix(m)
    }

    pub fn from_diag(d: &[f64]) -> Result<Self> {
        let d = PosDiag::new(d.to_vec()).map_err(|e| match e {
            SrError::InvalidInput(_) => SrError::NotSpd,
            e => e,
        })?;
        Ok(SpdMatrix(d.to_matrix()))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    /// Eigenvalues sorted descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.0.clone()).eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        ev
    }
}

impl SkewMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        is_square(&m)?;
        let scale = max_abs(&m).max(1.0);
        if max_abs(&(&m + m.transpose())) > TAU_SYM * scale {
            return Err(SrError::InvalidInput("matrix is not skew-symmetric".into()));
        }
        Ok(SkewMatrix((&m - m.transpose()) * 0.5))
    }

    pub fn new_unchecked(m: DMatrix<f64>) -> Self {
        SkewMatrix(m)
    }

    pub fn zeros(p: usize) -> Self {
        SkewMatrix(DMatrix::zeros(p, p))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn scale(&self, t: f64) -> SkewMatrix {
        SkewMatrix(&self.0 * t)
    }

    /// ½‖A‖²_F, the squared norm of the tangent vector in the bi-invariant metric.
    pub fn half_norm_sq(&self) -> f64 {
        0.5 * self.0.norm_squared()
    }
}

impl EigenPoint {
    pub fn new(u: Rotation, d: PosDiag) -> Result<Self> {
        if u.dim() != d.dim() {
            return Err(SrError::DimensionMismatch(format!("U is {}x{}, D has {} entries", u.dim(), u.dim(), d.dim())));
        }
        Ok(EigenPoint { u, d })
    }

    pub fn dim(&self) -> usize {
        self.d.dim()
    }
}

/// F(U, D) = U D Uᵀ.
pub fn compose_f(pt: &EigenPoint) -> SpdMatrix {
    let u = pt.u.matrix();
    let mut ud = u.clone();
    for (j, &dj) in pt.d.values().iter().enumerate() {
        ud.column_mut(j).scale_mut(dj);
    }
    let x = &ud * u.transpose();
    SpdMatrix((&x + x.transpose()) * 0.5)
}

/// Eigen-decomposition with eigenvalues sorted descending and det U = +1
/// (the last column is negated if needed).
pub fn eigen_decompose(x: &SpdMatrix) -> Result<EigenPoint> {
    let p = x.dim();
    let eig = SymmetricEigen::new(x.matrix().clone());
    let mut idx: Vec<usize> = (0..p).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let vals: Vec<f64> = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let top = vals[0];
    if top.is_nan() || top <= 0.0 || vals[p - 1] <= TAU_EIG * top {
        return Err(SrError::NotSpd);
    }
    let mut u = DMatrix::zeros(p, p);
    for (j, &i) in idx.iter().enumerate() {
        u.set_column(j, &eig.eigenvectors.column(i));
    }
    if u.determinant() < 0.0 {
        let mut c = u.column_mut(p - 1);
        c.neg_mut();
    }
    Ok(EigenPoint { u: Rotation(u), d: PosDiag(vals) })
}

fn skew3(w: [f64; 3]) -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0])
}

fn rodrigues(w: [f64; 3]) -> DMatrix<f64> {
    let th2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];
    let th = th2.sqrt();
    let k = skew3(w);
    let (a, b) = if th < 1e-6 {
        (1.0 - th2 / 6.0 + th2 * th2 / 120.0, 0.5 - th2 / 24.0 + th2 * th2 / 720.0)
    } else {
        (th.sin() / th, (1.0 - th.cos()) / th2)
    };
    DMatrix::identity(3, 3) + &k * a + &k * &k * b
}

fn plane_rotation(c: f64, s: f64, u: &DVector<f64>, v: &DVector<f64>) -> DMatrix<f64> {
    // (c − 1)(uuᵀ + vvᵀ) + s(vuᵀ − uvᵀ)
    (u * u.transpose() + v * v.transpose()) * (c - 1.0) + (v * u.transpose() - u * v.transpose()) * s
}

/// Real Schur form T = Qᵀ M Q; quasi-triangular with 1×1 and 2×2 blocks.
fn real_schur(m: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    match m.clone().try_schur(1e-15, 10_000) {
        Some(s) => s.unpack(),
        None => m.clone().schur().unpack(),
    }
}

/// Diagonal block boundaries of a quasi-triangular matrix.
fn schur_blocks(t: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let p = t.nrows();
    let mut out = Vec::new();
    let mut i = 0;
    while i < p {
        if i + 1 < p && t[(i + 1, i)] != 0.0 {
            out.push((i, 2));
            i += 2;
        } else {
            out.push((i, 1));
            i += 1;
        }
    }
    out
}

pub fn so_exp(a: &SkewMatrix) -> Rotation {
    let m = a.matrix();
    let p = m.nrows();
    match p {
        1 => Rotation::identity(1),
        2 => {
            let th = 0.5 * (m[(1, 0)] - m[(0, 1)]);
            let (s, c) = th.sin_cos();
            Rotation(DMatrix::from_row_slice(2, 2, &[c, -s, s, c]))
        }
        3 => Rotation(rodrigues([
            0.5 * (m[(2, 1)] - m[(1, 2)]),
            0.5 * (m[(0, 2)] - m[(2, 0)]),
            0.5 * (m[(1, 0)] - m[(0, 1)]),
        ])),
        _ => {
            let (q, t) = real_schur(m);
            let mut r = DMatrix::identity(p, p);
            for (i, sz) in schur_blocks(&t) {
                if sz == 2 {
                    let th = 0.5 * (t[(i + 1, i)] - t[(i, i + 1)]);
                    let u = q.column(i).into_owned();
                    let v = q.column(i + 1).into_owned();
                    r += plane_rotation(th.cos(), th.sin(), &u, &v);
                }
            }
            Rotation(r)
        }
    }
}

fn normal_form_2(r: &DMatrix<f64>) -> NormalForm {
    let th = f64::atan2(0.5 * (r[(1, 0)] - r[(0, 1)]), 0.5 * (r[(0, 0)] + r[(1, 1)]));
    let mut q = DMatrix::identity(2, 2);
    if th < 0.0 {
        q[(1, 1)] = -1.0;
    }
    NormalForm { angles: vec![th.abs()], frame: q }
}

fn any_orthonormal_pair(a: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
    // smallest component of a picks a stable helper axis
    let mut k = 0;
    for i in 1..3 {
        if a[i].abs() < a[k].abs() {
            k = i;
        }
    }
    let mut e = DVector::zeros(3);
    e[k] = 1.0;
    let q1 = (&e - a * a.dot(&e)).normalize();
    let q2 = a.cross(&q1);
    (q1, q2)
}

/// Rotation angle in [0, π] and unit axis of a 3×3 rotation.
pub(crate) fn axis_angle3(r: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let w = DVector::from_vec(vec![
        0.5 * (r[(2, 1)] - r[(1, 2)]),
        0.5 * (r[(0, 2)] - r[(2, 0)]),
        0.5 * (r[(1, 0)] - r[(0, 1)]),
    ]);
    let s = w.norm();
    let c = 0.5 * (r.trace() - 1.0);
    let th = f64::atan2(s, c);
    let axis = if c > 0.0 {
        if s > 0.0 {
            &w / s
        } else {
            DVector::from_vec(vec![0.0, 0.0, 1.0])
        }
    } else {
        // (R + Rᵀ)/2 − cos θ I = (1 − cos θ) a aᵀ
        let m = (r + r.transpose()) * 0.5 - DMatrix::identity(3, 3) * c;
        let mut k = 0;
        for i in 1..3 {
            if m[(i, i)] > m[(k, k)] {
                k = i;
            }
        }
        let mut a = m.column(k).into_owned().normalize();
        if a.dot(&w) < 0.0 {
            a.neg_mut();
        }
        a
    };
    (th, axis)
}

fn normal_form_3(r: &DMatrix<f64>) -> NormalForm {
    let (th, a) = axis_angle3(r);
    let (q1, q2) = any_orthonormal_pair(&a);
    let mut q = DMatrix::zeros(3, 3);
    q.set_column(0, &q1);
    q.set_column(1, &q2);
    q.set_column(2, &a);
    NormalForm { angles: vec![th, 0.0], frame: q }
}

fn normal_form_schur(r: &DMatrix<f64>) -> NormalForm {
    let p = r.nrows();
    let (q, t) = real_schur(r);
    let mut planes: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::new();
    let mut plus: Vec<DVector<f64>> = Vec::new();
    let mut minus: Vec<DVector<f64>> = Vec::new();
    for (i, sz) in schur_blocks(&t) {
        if sz == 1 {
            let v = q.column(i).into_owned();
            if (r * &v).dot(&v) < 0.0 {
                minus.push(v);
            } else {
                plus.push(v);
            }
            continue;
        }
        let u = q.column(i).into_owned();
        let mut v = q.column(i + 1).into_owned();
        let (ru, rv) = (r * &u, r * &v);
        let (a, b, c, d) = (u.dot(&ru), u.dot(&rv), v.dot(&ru), v.dot(&rv));
        if a * d - b * c > 0.0 {
            let s = 0.5 * (c - b);
            if s < 0.0 {
                v.neg_mut();
            }
            planes.push((f64::atan2(s.abs(), 0.5 * (a + d)), u, v));
        } else {
            // a reflection block: split into its ±1 eigenvectors
            let blk = DMatrix::from_row_slice(2, 2, &[a, 0.5 * (b + c), 0.5 * (b + c), d]);
            let e = SymmetricEigen::new(blk);
            for j in 0..2 {
                let x = &u * e.eigenvectors[(0, j)] + &v * e.eigenvectors[(1, j)];
                if e.eigenvalues[j] < 0.0 {
                    minus.push(x);
                } else {
                    plus.push(x);
                }
            }
        }
    }
    debug_assert!(minus.len().is_multiple_of(2));
    for pair in minus.chunks(2) {
        if pair.len() == 2 {
            planes.push((std::f64::consts::PI, pair[0].clone(), pair[1].clone()));
        } else {
            plus.push(pair[0].clone());
        }
    }
    let mut chunks = plus.chunks_exact(2);
    for pair in &mut chunks {
        planes.push((0.0, pair[0].clone(), pair[1].clone()));
    }
    let leftover = chunks.remainder().first().cloned();
    planes.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let mut frame = DMatrix::zeros(p, p);
    let mut angles = Vec::with_capacity(p.div_ceil(2));
    for (j, (th, u, v)) in planes.iter().enumerate() {
        frame.set_column(2 * j, u);
        frame.set_column(2 * j + 1, v);
        angles.push(*th);
    }
    if let Some(last) = leftover {
        frame.set_column(p - 1, &last);
        angles.push(0.0);
    }
    NormalForm { angles, frame }
}

pub fn normal_form(r: &Rotation) -> NormalForm {
    let m = r.matrix();
    match m.nrows() {
        1 => NormalForm { angles: vec![0.0], frame: DMatrix::identity(1, 1) },
        2 => normal_form_2(m),
        3 => normal_form_3(m),
        _ => normal_form_schur(m),
    }
}

impl NormalForm {
    /// Σ θᵢ (q_{2i} q_{2i−1}ᵀ − q_{2i−1} q_{2i}ᵀ), the log in this frame.
    pub fn log(&self) -> SkewMatrix {
        let p = self.frame.nrows();
        let mut a = DMatrix::zeros(p, p);
        for (i, &th) in self.angles.iter().enumerate() {
            if 2 * i + 1 >= p || th == 0.0 {
                continue;
            }
            let u = self.frame.column(2 * i);
            let v = self.frame.column(2 * i + 1);
            a += (v * u.transpose() - u * v.transpose()) * th;
        }
        SkewMatrix(a)
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        let p = self.frame.nrows();
        let mut r = DMatrix::identity(p, p);
        for (i, &th) in self.angles.iter().enumerate() {
            if 2 * i + 1 >= p {
                continue;
            }
            let u = self.frame.column(2 * i).into_owned();
            let v = self.frame.column(2 * i + 1).into_owned();
            r += plane_rotation(th.cos(), th.sin(), &u, &v);
        }
        r
    }
}

pub fn is_involution(r: &Rotation) -> bool {
    let m = r.matrix();
    let p = m.nrows();
    max_abs(&(m - m.transpose())) <= TAU_EIG && max_abs(&(m - DMatrix::identity(p, p))) > TAU_EIG
}

/// Dimension of the (−1)-eigenspace of an involution.
pub fn level(r: &Rotation) -> Result<usize> {
    if !is_involution(r) {
        return Err(SrError::NotInvolution);
    }
    let m = r.matrix();
    let sym = (m + m.transpose()) * 0.5;
    let e = SymmetricEigen::new(sym);
    Ok(e.eigenvalues.iter().filter(|&&x| x <= -1.0 + TAU_EIG).count())
}

pub fn so_log(r: &Rotation) -> SoLog {
    SoLog { principal: normal_form(r).log(), is_cut_locus: is_involution(r) }
}

/// Squared distance from the identity: Σ θᵢ².
pub fn d_so_identity_sq(r: &Rotation) -> f64 {
    normal_form(r).angles.iter().map(|t| t * t).sum()
}

pub fn d_so(u: &Rotation, v: &Rotation) -> f64 {
    d_so_identity_sq(&u.transpose().mul(v)).sqrt()
}

pub fn d_diag(d: &PosDiag, l: &PosDiag) -> f64 {
    d.values()
        .iter()
        .zip(l.values())
        .map(|(a, b)| (b.ln() - a.ln()).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn d_m(k: f64, p1: &EigenPoint, p2: &EigenPoint) -> f64 {
    let r = d_so(&p1.u, &p2.u);
    (k * r * r + d_diag(&p1.d, &p2.d).powi(2)).sqrt()
}
