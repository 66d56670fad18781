mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use common::{mat, rng};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use srgeom::manifold::{d_so, is_involution, so_exp, Rotation, SkewMatrix};
use srgeom::quat::*;
use srgeom::random::random_rotation;
use srgeom::signed_perm::SignedPerm;
use srgeom::SrError;

fn random_quat(r: &mut impl Rng) -> Quat {
    Quat::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
        .normalize()
}

fn about_x(t: f64) -> Rotation {
    let (s, c) = t.sin_cos();
    Rotation::new(mat(&[&[1.0, 0.0, 0.0], &[0.0, c, -s], &[0.0, s, c]])).unwrap()
}

#[test]
fn phi_table_entries() {
    assert!((phi(&Quat::ONE).matrix() - DMatrix::identity(3, 3)).amax() < 1e-15);
    let want = mat(&[&[0.0, -1.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]);
    assert!((phi(&zeta_k(1.0)).matrix() - want).amax() < 1e-15);
    let want = mat(&[&[-1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, -1.0]]);
    assert!((phi(&Quat::J).matrix() - want).amax() < 1e-15);
}

#[test]
fn phi_double_cover_and_homomorphism() {
    let mut r = rng(31);
    for _ in 0..200 {
        let (a, b) = (random_quat(&mut r), random_quat(&mut r));
        assert!((phi(&a).matrix() - phi(&-a).matrix()).amax() < 1e-15);
        let lhs = phi(&(a * b));
        let rhs = phi(&a).mul(&phi(&b));
        assert!((lhs.matrix() - rhs.matrix()).amax() < 1e-12);
        // rotation angle 2 acos|x₀|
        let angle = d_so(&Rotation::identity(3), &phi(&a));
        assert!((angle - 2.0 * a.re().abs().min(1.0).acos()).abs() < 1e-9);
    }
}

#[test]
fn half_angle_lift_examples() {
    let q = half_angle_lift(&Rotation::identity(3)).unwrap();
    assert!(q.max_abs_diff(&Quat::ONE) < 1e-15);
    let rz = so_exp(&SkewMatrix::new(mat(&[&[0.0, -FRAC_PI_2, 0.0], &[FRAC_PI_2, 0.0, 0.0], &[0.0, 0.0, 0.0]])).unwrap());
    let q = half_angle_lift(&rz).unwrap();
    assert!(q.max_abs_diff(&Quat::new(FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2)) < 1e-14);
    assert_eq!(half_angle_lift(&phi(&Quat::J)).unwrap_err(), SrError::AtCutLocus);
}

#[test]
fn half_angle_lift_round_trip() {
    let mut r = rng(32);
    let mut n = 0;
    while n < 500 {
        let u = random_rotation(&mut r, 3);
        if is_involution(&u) {
            continue;
        }
        let q = half_angle_lift(&u).unwrap();
        assert!(q.re() > 0.0);
        assert!((phi(&q).matrix() - u.matrix()).amax() < 1e-10);
        n += 1;
    }
}

#[test]
fn quat_distance_examples() {
    let mut r = rng(33);
    let q = random_quat(&mut r);
    assert!(quat_distance(&q, &q).abs() < 1e-12);
    assert!(quat_distance(&q, &-q).abs() < 1e-12);
    assert!((quat_distance(&Quat::ONE, &Quat::J) - PI).abs() < 1e-15);
    for _ in 0..200 {
        let (a, b) = (random_quat(&mut r), random_quat(&mut r));
        assert!((quat_distance(&a, &b) - d_so(&phi(&a), &phi(&b))).abs() < 1e-9);
    }
}

#[test]
fn hypercomplex_split_zero_patterns() {
    let mut r = rng(34);
    for _ in 0..50 {
        let u = random_rotation(&mut r, 3);
        let zw = hypercomplex_split(&u, &u).unwrap();
        assert!((zw.z - Complex64::new(1.0, 0.0)).norm() < 1e-12 && zw.w.norm() < 1e-12);

        let t = r.random_range(-3.0..3.0);
        let zw = hypercomplex_split(&u, &u.mul(&about_x(t))).unwrap();
        assert!(zw.w.norm() < 1e-12);

        // z = 0 forces x₀ = 0, an involution, so use the deterministic lift
        let t = r.random_range(-3.0..3.0);
        let zw = lift(&phi(&Quat::J).mul(&about_x(t))).hypercomplex();
        assert!(zw.z.norm() < 1e-12);
        assert!((zw.z.norm_sqr() + zw.w.norm_sqr() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn coset_tables_shape() {
    let (star, one) = coset_tables();
    assert_eq!((star.len(), one.len()), (6, 3));
    for e in &star {
        let want = match e.label {
            "zeta_j+" | "zeta_j-" => ZetaPerm::P13,
            "zeta_k+" | "zeta_k-" => ZetaPerm::P12,
            _ => ZetaPerm::Id,
        };
        assert_eq!(e.perm, want);
    }
    let even: Vec<DMatrix<f64>> = SignedPerm::enumerate_even(3).unwrap().iter().map(|g| g.mat()).collect();
    for e in star.iter().chain(&one) {
        let m = phi(&e.zeta);
        assert!(even.iter().any(|g| (g - m.matrix()).amax() < 1e-12), "{}", e.label);
    }
}

#[test]
fn gamma_hat_is_the_preimage_of_signed_perms() {
    let hat = gamma_hat();
    assert_eq!(hat.len(), 48);
    let even: Vec<DMatrix<f64>> = SignedPerm::enumerate_even(3).unwrap().iter().map(|g| g.mat()).collect();
    let mut hits = vec![0; even.len()];
    for q in &hat {
        assert!((q.norm() - 1.0).abs() < 1e-15);
        let m = phi(q);
        let i = even.iter().position(|g| (g - m.matrix()).amax() < 1e-12).expect("image is a signed permutation");
        hits[i] += 1;
    }
    assert!(hits.iter().all(|&h| h == 2));
}

#[test]
fn varphi_beta_examples() {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let check = |zw: HyperComplex, want: (f64, f64, f64)| {
        let got = varphi_beta(&zw);
        assert!((got.0 - want.0).abs() < 1e-12 && (got.1 - want.1).abs() < 1e-12 && (got.2 - want.2).abs() < 1e-12, "{got:?}");
    };
    check(HyperComplex { z: c(1.0, 0.0), w: c(0.0, 0.0) }, (0.0, FRAC_PI_4, FRAC_PI_4));
    check(HyperComplex { z: c(FRAC_1_SQRT_2, 0.0), w: c(FRAC_1_SQRT_2, 0.0) }, (FRAC_PI_4, 0.0, FRAC_PI_4));
    check(HyperComplex { z: c(FRAC_1_SQRT_2, 0.0), w: c(0.0, FRAC_1_SQRT_2) }, (FRAC_PI_4, FRAC_PI_4, 0.0));
    let mut r = rng(35);
    for _ in 0..200 {
        let (a, b, bp) = varphi_beta(&random_quat(&mut r).hypercomplex());
        for v in [a, b, bp] {
            assert!((-1e-15..=FRAC_PI_4 + 1e-12).contains(&v));
        }
    }
}

#[test]
fn gauge_and_component_swap_invariance() {
    let mut r = rng(36);
    for _ in 0..200 {
        let u = random_rotation(&mut r, 3);
        let v = random_rotation(&mut r, 3);
        let Ok(zw) = hypercomplex_split(&u, &v) else { continue };
        let base = varphi_beta(&zw);

        let t = r.random_range(-3.0..3.0);
        let Ok(g) = hypercomplex_split(&u.mul(&about_x(t)), &v) else { continue };
        assert!((g.z.norm() - zw.z.norm()).abs() < 1e-10);
        assert!((g.w.norm() - zw.w.norm()).abs() < 1e-10);
        assert!((g.zbar_w() - zw.zbar_w()).norm() < 1e-10);

        let Ok(s) = hypercomplex_split(&u.mul(&phi(&Quat::J)), &v) else { continue };
        // (z, w) ↦ ±(w̄, −z̄)
        let plus = (s.z - zw.w.conj()).norm() + (s.w + zw.z.conj()).norm();
        let minus = (s.z + zw.w.conj()).norm() + (s.w - zw.z.conj()).norm();
        assert!(plus.min(minus) < 1e-10);
        let swapped = varphi_beta(&s);
        assert!((swapped.0 - base.0).abs() < 1e-10);
        assert!((swapped.1 - base.1).abs() < 1e-10);
        assert!((swapped.2 - base.2).abs() < 1e-10);
    }
}

#[test]
fn square_root_branch_does_not_matter() {
    // φ(ξ^{1/2}) and φ(−ξ^{1/2}) are the same rotation
    let mut r = rng(37);
    for _ in 0..50 {
        let xi = Complex64::from_polar(1.0, r.random_range(-PI..PI));
        let s = xi.sqrt();
        let a = phi(&Quat::from_complex(s));
        let b = phi(&Quat::from_complex(-s));
        assert!((a.matrix() - b.matrix()).amax() < 1e-15);
    }
}
