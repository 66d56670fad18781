use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use srgeom::manifold::{compose_f, EigenPoint, PosDiag, SpdMatrix};
use srgeom::quat::{phi, Quat};
use srgeom::sr::{d_sr_with, SrOptions};
use tempfile::TempDir;

fn srgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srgeom")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn spd(q: Quat, logs: &[f64]) -> SpdMatrix {
    compose_f(&EigenPoint::new(phi(&q.normalize()), PosDiag::from_logs(logs)).unwrap())
}

fn rows(m: &SpdMatrix) -> Vec<Vec<f64>> {
    let m = m.matrix();
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn write_json(dir: &Path, name: &str, m: &SpdMatrix) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(&rows(m)).unwrap()).unwrap();
    path
}

fn write_text(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// X prolate with logs (1, 0, 0) in the standard frame.
fn prolate() -> SpdMatrix {
    spd(Quat::ONE, &[1.0, 0.0, 0.0])
}

#[test]
fn distance_between_coaxial_prolate_matrices() {
    let dir = TempDir::new().unwrap();
    let x = write_text(dir.path(), "x.txt", "4 0 0\n0 1 0\n0 0 1\n");
    let y = write_json(dir.path(), "y.json", &SpdMatrix::from_diag(&[9.0, 1.0, 1.0]).unwrap());
    let v = stdout_json(&srgeom(&["distance", s(&x), s(&y)]));
    assert!((v["distance"].as_f64().unwrap() - (9.0f64 / 4.0).ln()).abs() < 1e-12);
    assert!((v["distance"].as_f64().unwrap() - 0.810_930_216_216_329).abs() < 1e-12);
    assert_eq!(v["stratum_x"], "mid");
    assert_eq!(v["branch"], "id");
    assert!(v["case_tag"].is_string());
}

#[test]
fn distance_to_itself_is_zero() {
    let dir = TempDir::new().unwrap();
    let x = write_json(dir.path(), "x.json", &spd(Quat::new(0.9, 0.2, 0.3, 0.25), &[0.8, 0.3, -0.4]));
    let v = stdout_json(&srgeom(&["distance", s(&x), s(&x)]));
    assert!(v["distance"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn isotropic_endpoint_takes_the_bottom_branch() {
    let dir = TempDir::new().unwrap();
    let x = write_text(dir.path(), "x.txt", "2 0 0\n0 2 0\n0 0 2\n");
    let y = write_json(dir.path(), "y.json", &spd(Quat::new(0.6, 0.35, 0.5, 0.3), &[0.8, 0.3, -0.4]));
    let v = stdout_json(&srgeom(&["distance", s(&x), s(&y)]));
    let want = [0.8f64, 0.3, -0.4].iter().map(|l| (l - 2f64.ln()).powi(2)).sum::<f64>().sqrt();
    assert!((v["distance"].as_f64().unwrap() - want).abs() < 1e-12);
    assert_eq!(v["branch"], "bottom");
}

#[test]
fn csv_distance_has_17_digits() {
    let dir = TempDir::new().unwrap();
    let x = write_text(dir.path(), "x.txt", "4 0 0\n0 1 0\n0 0 1\n");
    let y = write_text(dir.path(), "y.txt", "9 0 0\n0 1 0\n0 0 1\n");
    let out = srgeom(&["distance", s(&x), s(&y), "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("distance,stratum_x,stratum_y,branch,case_tag"));
    let d = lines.next().unwrap().split(',').next().unwrap();
    assert_eq!(d.split('e').next().unwrap().replace(['.', '-'], "").len(), 17);
    assert!((d.parse::<f64>().unwrap() - (9.0f64 / 4.0).ln()).abs() < 1e-15);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let good = write_text(dir.path(), "good.txt", "1 0\n0 1\n");
    let ragged = write_text(dir.path(), "ragged.txt", "1 0\n0\n");
    let indefinite = write_text(dir.path(), "neg.txt", "1 0\n0 -1\n");
    assert_eq!(srgeom(&["distance", s(&good), s(&ragged)]).status.code(), Some(2));
    assert_eq!(srgeom(&["distance", s(&good), s(&indefinite)]).status.code(), Some(2));
    assert_eq!(srgeom(&["distance", s(&good)]).status.code(), Some(2));
    assert_eq!(srgeom(&["distance", s(&good), s(&good), "--samples", "1"]).status.code(), Some(2));

    // p = 4 with a repeated pair is outside the closed forms
    let a = write_text(dir.path(), "a.txt", "3 0 0 0\n0 3 0 0\n0 0 1 0\n0 0 0 1\n");
    let b = write_text(dir.path(), "b.txt", "2 0 0 0\n0 3 0 0\n0 0 5 0\n0 0 0 7\n");
    assert_eq!(srgeom(&["distance", s(&a), s(&b)]).status.code(), Some(3));
}

#[test]
fn near_tie_interpolation_is_degenerate() {
    let dir = TempDir::new().unwrap();
    let (xm, ym) = (prolate(), spd(Quat::new(0.9, 0.2, 0.3, 0.25), &[0.8, 0.3, -0.4]));
    let e = d_sr_with(&xm, &ym, &SrOptions::default()).unwrap().ells.unwrap();
    let mut ells = [e.ell_id, e.ell_13, e.ell_12.unwrap()];
    ells.sort_by(f64::total_cmp);
    let tol = format!("{}", 2.0 * (ells[1] - ells[0]));
    let (x, y) = (write_json(dir.path(), "x.json", &xm), write_json(dir.path(), "y.json", &ym));
    let out = dir.path().join("out");
    let o = srgeom(&["interpolate", s(&x), s(&y), "--out", s(&out), "--tol-tie", &tol]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("degenerate"));
}

fn read_csv(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    (header, lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect())
}

fn upper(m: &SpdMatrix) -> Vec<f64> {
    let m = m.matrix();
    vec![m[(0, 0)], m[(0, 1)], m[(0, 2)], m[(1, 1)], m[(1, 2)], m[(2, 2)]]
}

/// Runs `interpolate` and checks every file against X, Y and the sample count.
fn interpolate_run(xm: &SpdMatrix, ym: &SpdMatrix, k: f64) -> Value {
    let dir = TempDir::new().unwrap();
    let (x, y) = (write_json(dir.path(), "x.json", xm), write_json(dir.path(), "y.json", ym));
    let out = dir.path().join("curves");
    let k = k.to_string();
    let v = stdout_json(&srgeom(&["interpolate", s(&x), s(&y), "--out", s(&out), "--k", &k, "--samples", "11", "--format", "csv"]));
    let on_disk: Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(on_disk, v);
    for f in v["files"].as_array().unwrap() {
        let (header, data) = read_csv(&out.join(f["file"].as_str().unwrap()));
        assert_eq!(header, "t,x11,x12,x13,x22,x23,x33");
        assert_eq!(data.len(), 11);
        assert_eq!((data[0][0], data[10][0]), (0.0, 1.0));
        let close = |row: &[f64], m: &SpdMatrix| row[1..].iter().zip(upper(m)).all(|(a, b)| (a - b).abs() < 1e-9);
        assert!(close(&data[0], xm) && close(&data[10], ym));
        assert!((f["length"].as_f64().unwrap() - v["distance"].as_f64().unwrap()).abs() < 1e-9);
    }
    v
}

fn balanced(psi: f64) -> Quat {
    Quat::new(FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2 * psi.cos(), FRAC_1_SQRT_2 * psi.sin())
}

#[test]
fn interpolate_generic_mid_top_pair() {
    let v = interpolate_run(&prolate(), &spd(Quat::new(0.9, 0.2, 0.3, 0.25), &[0.8, 0.3, -0.4]), 1.0);
    assert_eq!(v["cardinality"], "1");
    assert_eq!(v["files"].as_array().unwrap().len(), 1);
}

#[test]
fn interpolate_balanced_mid_mid_pair() {
    let v = interpolate_run(&prolate(), &spd(balanced(0.4), &[0.6, -0.2, -0.2]), 0.1);
    assert_eq!(v["cardinality"], "2");
    let classes: Vec<&str> = v["files"].as_array().unwrap().iter().map(|f| f["class"].as_str().unwrap()).collect();
    assert_eq!(classes, ["A1'", "A2'"]);
}

#[test]
fn interpolate_family_writes_eight_members() {
    let v = interpolate_run(&prolate(), &spd(Quat::ONE, &[-0.5, 0.5, 0.5]), 0.5);
    assert_eq!(v["cardinality"], "INFINITE");
    let files = v["files"].as_array().unwrap();
    assert_eq!(files.len(), 8);
    for (j, f) in files.iter().enumerate() {
        assert_eq!(f["class"], "C'");
        assert!((f["theta"].as_f64().unwrap() - 2.0 * PI * j as f64 / 8.0).abs() < 1e-15);
    }
}

#[test]
fn interpolate_json_output() {
    let dir = TempDir::new().unwrap();
    let (x, y) = (write_json(dir.path(), "x.json", &prolate()), write_json(dir.path(), "y.json", &spd(balanced(0.4), &[0.6, -0.2, -0.2])));
    let out = dir.path().join("curves");
    let v = stdout_json(&srgeom(&["interpolate", s(&x), s(&y), "--out", s(&out), "--k", "0.1", "--samples", "5"]));
    let name = v["files"][0]["file"].as_str().unwrap();
    assert!(name.ends_with(".json"));
    let c: Value = serde_json::from_str(&std::fs::read_to_string(out.join(name)).unwrap()).unwrap();
    assert_eq!(c["t"].as_array().unwrap().len(), 5);
    let first: Vec<Vec<f64>> = serde_json::from_value(c["points"][0].clone()).unwrap();
    let want = rows(&prolate());
    assert!(first.iter().flatten().zip(want.iter().flatten()).all(|(a, b)| (a - b).abs() < 1e-9));
}

#[test]
fn interpolate_needs_an_output_directory() {
    let dir = TempDir::new().unwrap();
    let x = write_json(dir.path(), "x.json", &prolate());
    assert_eq!(srgeom(&["interpolate", s(&x), s(&x)]).status.code(), Some(2));
}

#[test]
fn classify_reports_curves() {
    let dir = TempDir::new().unwrap();
    let (x, y) = (write_json(dir.path(), "x.json", &prolate()), write_json(dir.path(), "y.json", &spd(balanced(0.4), &[0.6, -0.2, -0.2])));
    let v = stdout_json(&srgeom(&["classify", s(&x), s(&y), "--k", "0.1"]));
    assert_eq!(v["cardinality"], "2");
    assert_eq!(v["curves"].as_array().unwrap().len(), 2);
    assert_eq!(v["family"], false);
}

#[test]
fn fiber_reports() {
    let dir = TempDir::new().unwrap();
    let f = write_text(dir.path(), "f.txt", "6 0 0\n0 6 0\n0 0 2\n");
    let v = stdout_json(&srgeom(&["fiber", s(&f)]));
    assert_eq!(v["summary"], "6 components × SO(2), stratum 2+1, oblate");
    let f = write_text(dir.path(), "g.txt", "8 0 0\n0 5 0\n0 0 1\n");
    let v = stdout_json(&srgeom(&["fiber", s(&f)]));
    assert_eq!(v["components"], 24);
    assert_eq!(v["summary"], "24 points, stratum 1+1+1, triaxial");
    let f = write_text(dir.path(), "h.txt", "5 0 0\n0 5 0\n0 0 5\n");
    let v = stdout_json(&srgeom(&["fiber", s(&f)]));
    assert_eq!((v["components"].as_u64(), v["component_dim"].as_u64()), (Some(1), Some(3)));
}

#[test]
fn reduce_minus_identity() {
    let dir = TempDir::new().unwrap();
    let r = write_text(dir.path(), "r.txt", "-1 0 0 0\n0 -1 0 0\n0 0 -1 0\n0 0 0 -1\n");
    let v = stdout_json(&srgeom(&["reduce", s(&r)]));
    assert_eq!(v["sigma"], "(-,-,-,-)");
    assert_eq!(v["reducible"], true);
    assert!(v["new_distance"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn reduce_random_low_dimensional_involutions() {
    for seed in 0..5 {
        let seed = seed.to_string();
        let v = stdout_json(&srgeom(&["reduce", "--random-involution", "4", "2", "--seed", &seed]));
        assert_eq!(v["reducible"], true);
        assert!(v["sigma_level"].as_u64().unwrap() < 4);
    }
    assert_eq!(srgeom(&["reduce", "--random-involution", "4", "3"]).status.code(), Some(2));
    assert_eq!(srgeom(&["reduce"]).status.code(), Some(2));
}

#[test]
fn reduce_rejects_non_involutions() {
    let dir = TempDir::new().unwrap();
    let r = write_text(dir.path(), "r.txt", "0 -1 0\n1 0 0\n0 0 1\n");
    assert_eq!(srgeom(&["reduce", s(&r)]).status.code(), Some(2));
}

#[test]
fn scan_wprime_11() {
    let out = srgeom(&["grassmann-scan", "11", "2", "--construction", "Wprime"]);
    let v = stdout_json(&out);
    assert!((v["dist_sq_over_pi2_4"].as_f64().unwrap() - 1.0146).abs() < 1e-3);
    assert_eq!(v["reducible"], false);
    assert_eq!(v["construction"], "Wprime");
    assert_eq!(v["best_J"].as_array().unwrap().len(), 2);
}

#[test]
fn scan_random_stream_is_deterministic() {
    let args = ["grassmann-scan", "6", "2", "--count", "4", "--seed", "9", "--format", "csv"];
    let (a, b) = (srgeom(&args), srgeom(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("p,m,construction,best_J,dist_sq_over_pi2_4,reducible"));
    assert_eq!(text.lines().count(), 5);
    assert_eq!(srgeom(&["grassmann-scan", "6", "3"]).status.code(), Some(2));
    assert_eq!(srgeom(&["grassmann-scan", "6", "4", "--construction", "Wp"]).status.code(), Some(2));
}

#[test]
fn rotation_input_must_be_orthogonal() {
    let dir = TempDir::new().unwrap();
    let r = write_text(dir.path(), "r.txt", "2 0\n0 1\n");
    assert_eq!(srgeom(&["reduce", s(&r)]).status.code(), Some(2));
}
