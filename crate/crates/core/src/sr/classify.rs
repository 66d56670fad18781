use std::cmp::Ordering;

use num_complex::Complex64;

use super::distance::{ell_values, top_top_candidates};
use super::{canonical_point, compare, Cardinality, CPrimeFamily, CurveClass, MssrCurve, MssrSet, SrOptions, StratumKind};
use crate::error::{Result, SrError};
use crate::manifold::{is_involution, EigenPoint, PosDiag, Rotation, SpdMatrix};
use crate::quat::{lift, phi, unit, zeta_j, zeta_k, HyperComplex, Quat};
use crate::tol::AXIS_TOL;

pub fn classify_mssr(x: &SpdMatrix, y: &SpdMatrix, k: f64, tol: f64) -> Result<MssrSet> {
    classify_mssr_with(x, y, &SrOptions { k, tol_tie: tol, ..SrOptions::default() })
}

pub fn classify_mssr_with(x: &SpdMatrix, y: &SpdMatrix, opts: &SrOptions) -> Result<MssrSet> {
    if x.dim() != y.dim() {
        return Err(SrError::DimensionMismatch(format!("{} vs {}", x.dim(), y.dim())));
    }
    let (ex, sx) = canonical_point(x, opts.tol_eig)?;
    let (ey, sy) = canonical_point(y, opts.tol_eig)?;
    let k = opts.k;
    if sx == StratumKind::Bottom || sy == StratumKind::Bottom {
        // one frame serves both endpoints, so the rotation part vanishes
        let (start, end) = if sx == StratumKind::Bottom {
            let e = crate::manifold::eigen_decompose(y)?;
            (EigenPoint { u: e.u.clone(), d: ex.d.clone() }, e)
        } else {
            let e = crate::manifold::eigen_decompose(x)?;
            (e.clone(), EigenPoint { u: e.u.clone(), d: ey.d.clone() })
        };
        let c = MssrCurve::from_pair(start, end, k, CurveClass::Generic);
        let distance = c.length;
        return Ok(MssrSet { curves: vec![c], cardinality: Cardinality::Finite(1), case_tag: "bottom".into(), family: None, distance });
    }
    match (sx, sy) {
        (StratumKind::Top, StratumKind::Top) => {
            let cands = top_top_candidates(&ex, &ey, k, opts.tol_tie)?;
            let best = cands[0].1;
            let mut curves = Vec::new();
            for (g, d) in cands {
                if compare(d - best, opts.tol_tie, "top-top length gap")? == Ordering::Equal {
                    curves.push(MssrCurve::from_pair(ex.clone(), g.act_on_m(&ey), k, CurveClass::Generic));
                }
            }
            let n = curves.len();
            Ok(MssrSet { curves, cardinality: Cardinality::Finite(n), case_tag: "top-top/generic".into(), family: None, distance: best })
        }
        (StratumKind::Mid, StratumKind::Top) | (StratumKind::Mid, StratumKind::Mid) => {
            classify_mssr_from_points(&ex, &ey, k, opts.tol_tie)
        }
        (StratumKind::Top, StratumKind::Mid) => {
            let s = classify_mssr_from_points(&ey, &ex, k, opts.tol_tie)?;
            Ok(MssrSet {
                curves: s.curves.iter().map(|c| c.reversed()).collect(),
                cardinality: s.cardinality,
                case_tag: s.case_tag.replacen("mid-top", "top-mid", 1),
                family: None,
                distance: s.distance,
            })
        }
        _ => Err(SrError::Unsupported(format!(
            "p = {} with repeated but not fully isotropic eigenvalues",
            x.dim()
        ))),
    }
}

/// Minimal pairs realizing d_SR, one per curve. A C′ family contributes
/// its r = 1 member.
pub fn minimal_pairs(x: &SpdMatrix, y: &SpdMatrix, k: f64, tol: f64) -> Result<Vec<(EigenPoint, EigenPoint)>> {
    let s = classify_mssr(x, y, k, tol)?;
    let mut out: Vec<(EigenPoint, EigenPoint)> = s.curves.into_iter().map(|c| (c.start, c.end)).collect();
    if let Some(f) = s.family {
        let c = f.member(0.0);
        out.push((c.start, c.end));
    }
    Ok(out)
}

fn cquat(c: Complex64) -> Quat {
    Quat::from_complex(c)
}

/// (ζ, r_U, r_V, π_ζ·Λ) for a class, given (z, w).
fn class_data(class: CurveClass, zw: &HyperComplex, lam: &[f64]) -> (Quat, Quat, Quat, Vec<f64>) {
    let (z, w) = (zw.z, zw.w);
    let i = Complex64::i();
    let one = Quat::ONE;
    let id = lam.to_vec();
    let p13 = vec![lam[2], lam[1], lam[0]];
    let p12 = vec![lam[1], lam[0], lam[2]];
    match class {
        CurveClass::A1 => (one, cquat(unit(z)), one, id),
        CurveClass::A2 => (Quat::J, cquat(unit(w)), one, id),
        CurveClass::B1 => (zeta_j(1.0), cquat(unit(z + w)), one, p13),
        CurveClass::B2 => (zeta_j(-1.0), cquat(unit(z - w)), one, p13),
        CurveClass::C1 => (zeta_k(1.0), cquat(unit(z - i * w)), one, p12),
        CurveClass::C2 => (zeta_k(-1.0), cquat(unit(z + i * w)), one, p12),
        CurveClass::A1p => (one, one, cquat(unit(z).conj()), id),
        CurveClass::A2p => (Quat::J, one, cquat(unit(w)), id),
        CurveClass::Bp => {
            let ru = (unit(w) * unit(z)).sqrt();
            let rv = (unit(w) * unit(z).conj()).sqrt();
            (zeta_j(1.0), cquat(ru), cquat(rv), p13)
        }
        CurveClass::Cp | CurveClass::Generic => unreachable!("no single data triple"),
    }
}

/// ((U R_U, D), (V R_V φ(ζ)⁻¹, π_ζ·Λ)).
fn class_curve(class: CurveClass, ex: &EigenPoint, v: &Rotation, lam: &PosDiag, zw: &HyperComplex, k: f64) -> MssrCurve {
    let (zeta, ru, rv, pl) = class_data(class, zw, lam.values());
    let start = EigenPoint { u: ex.u.mul(&phi(&ru)), d: ex.d.clone() };
    let end = EigenPoint { u: v.mul(&phi(&rv)).mul(&phi(&zeta).transpose()), d: PosDiag::new_unchecked(pl) };
    MssrCurve::from_pair(start, end, k, class)
}

fn sign_tag(o: Ordering, name: &str) -> String {
    match o {
        Ordering::Greater => format!("{name}>0"),
        Ordering::Less => format!("{name}<0"),
        Ordering::Equal => format!("{name}=0"),
    }
}

fn abs_tag(o: Ordering) -> &'static str {
    match o {
        Ordering::Greater => "|z|>|w|",
        Ordering::Less => "|z|<|w|",
        Ordering::Equal => "|z|=|w|",
    }
}

fn pick(o: Ordering, pos: CurveClass, neg: CurveClass) -> Vec<CurveClass> {
    match o {
        Ordering::Greater => vec![pos],
        Ordering::Less => vec![neg],
        Ordering::Equal => vec![pos, neg],
    }
}

/// Classification from explicit pre-images: X in the middle stratum with
/// D = diag(d₁, d₂, d₂), Y triaxial or with Λ = diag(λ₁, λ₂, λ₂).
pub fn classify_mssr_from_points(ex: &EigenPoint, ey: &EigenPoint, k: f64, tol: f64) -> Result<MssrSet> {
    let ells0 = ell_values(ex, ey, k)?;
    let y_mid = ells0.ell_12.is_none();
    let u = &ex.u;
    let mut v = ey.u.clone();
    if is_involution(&u.transpose().mul(&v)) {
        // move to a pre-image of Y that is not antipodal to U
        let mut best = (f64::NEG_INFINITY, v.clone());
        for s in [Quat::I, Quat::J, Quat::K] {
            let cand = v.mul(&phi(&s));
            let x0 = lift(&u.transpose().mul(&cand)).re().abs();
            if x0 > best.0 {
                best = (x0, cand);
            }
        }
        v = best.1;
    }
    let mut zw = lift(&u.transpose().mul(&v)).hypercomplex();
    let mut axis = false;
    if y_mid && zw.z.norm().min(zw.w.norm()) <= AXIS_TOL {
        v = u.clone();
        zw = HyperComplex { z: Complex64::new(1.0, 0.0), w: Complex64::new(0.0, 0.0) };
        axis = true;
    }
    let ey2 = EigenPoint { u: v.clone(), d: ey.d.clone() };
    let ells = ell_values(ex, &ey2, k)?;
    let m = ells.min();
    let lam = &ey.d;
    let zw_abs = compare(zw.z.norm() - zw.w.norm(), tol, "|z| - |w|");
    let re = || compare(zw.zbar_w().re, tol, "Re(conj(z) w)");
    let im = || compare(zw.zbar_w().im, tol, "Im(conj(z) w)");

    let mut classes: Vec<CurveClass> = Vec::new();
    let mut branches: Vec<&str> = Vec::new();
    let mut subs: Vec<String> = Vec::new();
    let mut family = None;
    let prefix;
    if !y_mid {
        prefix = "mid-top";
        let ell_12 = ells.ell_12.unwrap();
        let tied = |l: f64, what: &str| -> Result<bool> { Ok(compare(l - m, tol, what)? == Ordering::Equal) };
        if tied(ells.ell_id, "ell_id - min")? {
            let o = zw_abs?;
            branches.push("id");
            subs.push(abs_tag(o).to_string());
            classes.extend(pick(o, CurveClass::A1, CurveClass::A2));
        }
        if tied(ells.ell_13, "ell_13 - min")? {
            let o = re()?;
            branches.push("13");
            subs.push(sign_tag(o, "re"));
            classes.extend(pick(o, CurveClass::B1, CurveClass::B2));
        }
        if tied(ell_12, "ell_12 - min")? {
            let o = im()?;
            branches.push("12");
            subs.push(sign_tag(o, "im"));
            classes.extend(pick(o, CurveClass::C1, CurveClass::C2));
        }
    } else {
        prefix = "mid-mid";
        let o = compare(ells.ell_id - ells.ell_13, tol, "ell_id - ell_13")?;
        if o != Ordering::Greater {
            branches.push("id");
            if axis {
                subs.push("axis".into());
                classes.push(CurveClass::A1p);
            } else {
                let a = zw_abs?;
                subs.push(abs_tag(a).to_string());
                classes.extend(pick(a, CurveClass::A1p, CurveClass::A2p));
            }
        }
        if o != Ordering::Less {
            branches.push("13");
            if axis {
                subs.push("axis".into());
                family = Some(CPrimeFamily { u: u.clone(), d: ex.d.clone(), lambda: lam.clone(), k });
            } else {
                subs.push("z,w!=0".into());
                classes.push(CurveClass::Bp);
            }
        }
    }
    subs.dedup();
    let curves: Vec<MssrCurve> = classes.iter().map(|&c| class_curve(c, ex, &v, lam, &zw, k)).collect();
    let cardinality = if family.is_some() { Cardinality::Infinite } else { Cardinality::Finite(curves.len()) };
    let case_tag = format!("{prefix}/{}/{}", branches.join("="), subs.join(","));
    Ok(MssrSet { curves, cardinality, case_tag, family, distance: m })
}
