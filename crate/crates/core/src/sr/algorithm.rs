//! Step-by-step construction of all MSSR curves for p = 3, written
//! independently of the closed-form ℓ formulas: the ℓ-values here are
//! measured as d_M of explicitly built candidate pairs.

use std::cmp::Ordering;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{canonical_point, Cardinality, CPrimeFamily, CurveClass, MssrCurve, MssrSet, StratumKind};
use crate::error::{Result, SrError};
use crate::manifold::{d_m, so_log, EigenPoint, PosDiag, Rotation, SkewMatrix, SpdMatrix};
use crate::tol::{AXIS_TOL, TAU_EIG};

fn mat3(rows: [[f64; 3]; 3]) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |i, j| rows[i][j])
}

/// φ(e^{ti}): rotation about the first axis by 2t.
fn phi_circle(xi: Complex64) -> DMatrix<f64> {
    let t2 = 2.0 * xi.arg();
    let (s, c) = t2.sin_cos();
    mat3([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Zeta {
    One,
    J,
    Jp,
    Jm,
    Kp,
    Km,
}

/// φ(ζ) and π_ζ (0-based one-line) read off the representative table.
fn zeta_data(z: Zeta) -> (DMatrix<f64>, [usize; 3]) {
    match z {
        Zeta::One => (DMatrix::identity(3, 3), [0, 1, 2]),
        Zeta::J => (mat3([[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]]), [0, 1, 2]),
        Zeta::Jp => (mat3([[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0]]), [2, 1, 0]),
        Zeta::Jm => (mat3([[0.0, 0.0, -1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]]), [2, 1, 0]),
        Zeta::Kp => (mat3([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]), [1, 0, 2]),
        Zeta::Km => (mat3([[0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]), [1, 0, 2]),
    }
}

fn is_invol(r: &DMatrix<f64>) -> bool {
    let sym = (r - r.transpose()).abs().max() <= TAU_EIG;
    sym && (r - DMatrix::<f64>::identity(3, 3)).abs().max() > TAU_EIG
}

struct Ctx<'a> {
    u: &'a DMatrix<f64>,
    v: DMatrix<f64>,
    d: &'a PosDiag,
    lam: &'a PosDiag,
    z: Complex64,
    w: Complex64,
    k: f64,
}

impl Ctx<'_> {
    fn data(&self, class: CurveClass) -> Option<(Zeta, Complex64, Complex64)> {
        let (z, w) = (self.z, self.w);
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let hat = |c: Complex64| if c.norm() > 0.0 { Some(c / c.norm()) } else { None };
        Some(match class {
            CurveClass::A1 => (Zeta::One, hat(z)?, one),
            CurveClass::A2 => (Zeta::J, hat(w)?, one),
            CurveClass::B1 => (Zeta::Jp, hat(z + w)?, one),
            CurveClass::B2 => (Zeta::Jm, hat(z - w)?, one),
            CurveClass::C1 => (Zeta::Kp, hat(z - i * w)?, one),
            CurveClass::C2 => (Zeta::Km, hat(z + i * w)?, one),
            CurveClass::A1p => (Zeta::One, one, hat(z)?.conj()),
            CurveClass::A2p => (Zeta::J, one, hat(w)?),
            CurveClass::Bp => (Zeta::Jp, (hat(w)? * hat(z)?).sqrt(), (hat(w)? * hat(z)?.conj()).sqrt()),
            CurveClass::Cp => (Zeta::Jp, one, one),
            CurveClass::Generic => return None,
        })
    }

    /// Steps 4–5: the endpoint pair of a class.
    fn pair(&self, class: CurveClass) -> Option<(EigenPoint, EigenPoint)> {
        let (zeta, ru, rv) = self.data(class)?;
        let (pz, perm) = zeta_data(zeta);
        let u1 = self.u * phi_circle(ru);
        let v1 = &self.v * phi_circle(rv) * pz.transpose();
        let l = self.lam.values();
        let mut l1 = [0.0; 3];
        for j in 0..3 {
            l1[perm[j]] = l[j];
        }
        Some((
            EigenPoint { u: Rotation::new_unchecked(u1), d: self.d.clone() },
            EigenPoint { u: Rotation::new_unchecked(v1), d: PosDiag::new_unchecked(l1.to_vec()) },
        ))
    }

    fn length(&self, class: CurveClass) -> f64 {
        self.pair(class).map_or(f64::INFINITY, |(a, b)| d_m(self.k, &a, &b))
    }

    /// Step 6 with A = log(U₁⁻¹V₁), transported to the left-invariant form.
    fn curve(&self, class: CurveClass) -> MssrCurve {
        let (start, end) = self.pair(class).expect("class defined");
        curve_from_right_log(start, end, self.k, class)
    }
}

fn curve_from_right_log(start: EigenPoint, end: EigenPoint, k: f64, class: CurveClass) -> MssrCurve {
    let u1 = start.u.matrix();
    let ar = so_log(&start.u.transpose().mul(&end.u)).principal;
    let a = SkewMatrix::new_unchecked(u1 * ar.matrix() * u1.transpose());
    let l: Vec<f64> = start.d.values().iter().zip(end.d.values()).map(|(x, y)| (y / x).ln()).collect();
    let length = (k * ar.half_norm_sq() + l.iter().map(|x| x * x).sum::<f64>()).sqrt();
    MssrCurve { start, end, a, l, class_label: class, length, k }
}

fn cmp0(x: f64, tol: f64, what: &str) -> Result<Ordering> {
    if x.abs() <= 0.1 * tol {
        Ok(Ordering::Equal)
    } else if x.abs() < tol {
        Err(SrError::Degenerate(format!("{what} = {x:.3e} is too close to zero to decide")))
    } else {
        Ok(if x > 0.0 { Ordering::Greater } else { Ordering::Less })
    }
}

fn m_of(o: Ordering, a: CurveClass, b: CurveClass) -> Vec<CurveClass> {
    match o {
        Ordering::Greater => vec![a],
        Ordering::Less => vec![b],
        Ordering::Equal => vec![a, b],
    }
}

pub fn stepwise_mssr(x: &SpdMatrix, y: &SpdMatrix, k: f64, tol: f64) -> Result<MssrSet> {
    if x.dim() != 3 || y.dim() != 3 {
        return Err(SrError::WrongStratum("the algorithm is specific to p = 3".into()));
    }
    let (ex, sx) = canonical_point(x, TAU_EIG)?;
    let (ey, sy) = canonical_point(y, TAU_EIG)?;
    match (sx, sy) {
        (StratumKind::Mid, StratumKind::Top) | (StratumKind::Mid, StratumKind::Mid) => run(&ex, &ey, sy, k, tol),
        (StratumKind::Top, StratumKind::Mid) => {
            let s = run(&ey, &ex, StratumKind::Top, k, tol)?;
            Ok(MssrSet {
                curves: s.curves.iter().map(|c| curve_from_right_log(c.end.clone(), c.start.clone(), k, c.class_label)).collect(),
                cardinality: s.cardinality,
                case_tag: s.case_tag.replacen("mid-top", "top-mid", 1),
                family: None,
                distance: s.distance,
            })
        }
        _ => Err(SrError::WrongStratum("not a nontrivial p = 3 case".into())),
    }
}

/// Same as [`stepwise_mssr`] but from explicit pre-images: X = F(ex) with
/// D = diag(d₁, d₂, d₂), Y = F(ey) triaxial or with Λ = diag(λ₁, λ₂, λ₂).
pub fn stepwise_mssr_from_points(ex: &EigenPoint, ey: &EigenPoint, k: f64, tol: f64) -> Result<MssrSet> {
    let mid = |d: &PosDiag| {
        let l = d.logs();
        l.len() == 3 && (l[1] - l[2]).abs() <= TAU_EIG && (l[0] - l[1]).abs() > TAU_EIG
    };
    if !mid(&ex.d) {
        return Err(SrError::WrongStratum("X must have D = diag(d1, d2, d2)".into()));
    }
    let sy = if mid(&ey.d) { StratumKind::Mid } else { StratumKind::Top };
    run(ex, ey, sy, k, tol)
}

fn run(ex: &EigenPoint, ey: &EigenPoint, sy: StratumKind, k: f64, tol: f64) -> Result<MssrSet> {
    let u = ex.u.matrix();
    let mut v = ey.u.matrix().clone();

    // Step 1
    if is_invol(&(u.transpose() * &v)) {
        for s in [[-1.0, -1.0, 1.0], [-1.0, 1.0, -1.0], [1.0, -1.0, -1.0]] {
            let vs = &v * DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&s));
            if !is_invol(&(u.transpose() * &vs)) {
                v = vs;
                break;
            }
        }
    }

    // Step 2
    let r = u.transpose() * &v;
    let th = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos();
    let a = if th > 0.0 {
        let s = 2.0 * th.sin();
        [(r[(2, 1)] - r[(1, 2)]) / s, (r[(0, 2)] - r[(2, 0)]) / s, (r[(1, 0)] - r[(0, 1)]) / s]
    } else {
        [0.0; 3]
    };

    // Step 3
    let (c, s) = ((th / 2.0).cos(), (th / 2.0).sin());
    let mut z = Complex64::new(c, s * a[0]);
    let mut w = Complex64::new(s * a[1], s * a[2]);
    let y_mid = sy == StratumKind::Mid;
    let axis = y_mid && z.norm().min(w.norm()) <= AXIS_TOL;
    if axis {
        v = u.clone();
        z = Complex64::new(1.0, 0.0);
        w = Complex64::new(0.0, 0.0);
    }
    let ctx = Ctx { u, v, d: &ex.d, lam: &ey.d, z, w, k };
    let zbw = z.conj() * w;

    let (classes, family, tag, dist) = if !y_mid {
        let l_id = ctx.length(CurveClass::A1).min(ctx.length(CurveClass::A2));
        let l_13 = ctx.length(CurveClass::B1).min(ctx.length(CurveClass::B2));
        let l_12 = ctx.length(CurveClass::C1).min(ctx.length(CurveClass::C2));
        let m = l_id.min(l_13).min(l_12);
        let e_id = cmp0(l_id - m, tol, "ell_id gap")? == Ordering::Equal;
        let e_13 = cmp0(l_13 - m, tol, "ell_13 gap")? == Ordering::Equal;
        let e_12 = cmp0(l_12 - m, tol, "ell_12 gap")? == Ordering::Equal;
        let am = || cmp0(z.norm() - w.norm(), tol, "|z|-|w|").map(|o| m_of(o, CurveClass::A1, CurveClass::A2));
        let bn = || cmp0(zbw.re, tol, "Re").map(|o| m_of(o, CurveClass::B1, CurveClass::B2));
        let cn = || cmp0(zbw.im, tol, "Im").map(|o| m_of(o, CurveClass::C1, CurveClass::C2));
        let (cls, row): (Vec<CurveClass>, &str) = match (e_id, e_13, e_12) {
            (true, false, false) => (am()?, "id"),
            (false, true, false) => (bn()?, "13"),
            (false, false, true) => (cn()?, "12"),
            (true, true, false) => ([am()?, bn()?].concat(), "id=13"),
            (true, false, true) => ([am()?, cn()?].concat(), "id=12"),
            (false, true, true) => ([bn()?, cn()?].concat(), "13=12"),
            (true, true, true) => ([am()?, bn()?, cn()?].concat(), "id=13=12"),
            (false, false, false) => unreachable!("the minimum is attained"),
        };
        (cls, None, format!("mid-top/{row}"), m)
    } else {
        let l_id = ctx.length(CurveClass::A1p).min(ctx.length(CurveClass::A2p));
        let l_13 = if axis { ctx.length(CurveClass::Cp) } else { ctx.length(CurveClass::Bp) };
        let o = cmp0(l_id - l_13, tol, "ell_id - ell_13")?;
        let a_part = || -> Result<Vec<CurveClass>> {
            if axis {
                Ok(vec![CurveClass::A1p])
            } else {
                Ok(m_of(cmp0(z.norm() - w.norm(), tol, "|z|-|w|")?, CurveClass::A1p, CurveClass::A2p))
            }
        };
        let fam = || CPrimeFamily { u: Rotation::new_unchecked(u.clone()), d: ex.d.clone(), lambda: ey.d.clone(), k };
        match o {
            Ordering::Less => (a_part()?, None, "mid-mid/id".to_string(), l_id),
            Ordering::Greater if axis => (vec![], Some(fam()), "mid-mid/13".to_string(), l_13),
            Ordering::Greater => (vec![CurveClass::Bp], None, "mid-mid/13".to_string(), l_13),
            Ordering::Equal if axis => (a_part()?, Some(fam()), "mid-mid/id=13".to_string(), l_id.min(l_13)),
            Ordering::Equal => ([a_part()?, vec![CurveClass::Bp]].concat(), None, "mid-mid/id=13".to_string(), l_id.min(l_13)),
        }
    };
    let curves: Vec<MssrCurve> = classes.iter().map(|&c| ctx.curve(c)).collect();
    let cardinality = if family.is_some() { Cardinality::Infinite } else { Cardinality::Finite(curves.len()) };
    Ok(MssrSet { curves, cardinality, case_tag: tag, family, distance: dist })
}
