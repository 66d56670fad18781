use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use srgeom::grassmann::{
    best_coordinate_plane, counterexample_wp, counterexample_wp_prime, phi_mp, sign_change_reducible, Involution,
    Subspace, MAX_SCAN_P,
};
use srgeom::manifold::{d_so_identity_sq, Rotation, SpdMatrix};
use srgeom::partition::{fiber_summary, shape_of, stratum_of, Shape};
use srgeom::random::{random_involution, random_subspace};
use srgeom::sr::{classify_mssr_with, d_sr_with, EllTriple, MssrCurve, SrOptions, StratumKind};
use srgeom::SrError;

use crate::error::CliError;
use crate::io::{fmt17, read_matrix, read_spd, rows_of, upper_entries, upper_header};
use crate::{Config, Construction, Format};

/// Representatives written for a one-parameter family of curves.
pub const N_FAMILY: usize = 8;

fn opts(cfg: &Config) -> SrOptions {
    SrOptions { k: cfg.k, tol_eig: cfg.tol_eig, tol_tie: cfg.tol_tie }
}

fn print_json<T: Serialize>(v: &T) -> Result<(), CliError> {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn read_pair(x: &Path, y: &Path) -> Result<(SpdMatrix, SpdMatrix), CliError> {
    let (x, y) = (read_spd(x)?, read_spd(y)?);
    if x.dim() != y.dim() {
        return Err(CliError::Parse(format!("X is {0}x{0} but Y is {1}x{1}", x.dim(), y.dim())));
    }
    Ok((x, y))
}

#[derive(Serialize)]
struct DistanceOut {
    distance: f64,
    stratum_x: StratumKind,
    stratum_y: StratumKind,
    branch: String,
    case_tag: Option<String>,
    ells: Option<EllTriple>,
}

pub fn distance(x: &Path, y: &Path, cfg: &Config) -> Result<(), CliError> {
    let (x, y) = read_pair(x, y)?;
    let o = opts(cfg);
    let r = d_sr_with(&x, &y, &o)?;
    // a near-tie only blurs the case tag, not the distance
    let case_tag = if x.dim() == 3 { classify_mssr_with(&x, &y, &o).ok().map(|s| s.case_tag) } else { None };
    let out = DistanceOut {
        distance: r.distance,
        stratum_x: r.stratum_x,
        stratum_y: r.stratum_y,
        branch: r.branch,
        case_tag,
        ells: r.ells,
    };
    match cfg.format {
        Format::Json => print_json(&out),
        Format::Csv => {
            println!("distance,stratum_x,stratum_y,branch,case_tag");
            println!(
                "{},{},{},{},{}",
                fmt17(out.distance),
                out.stratum_x,
                out.stratum_y,
                out.branch,
                csv_field(out.case_tag.as_deref().unwrap_or(""))
            );
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CurveOut {
    class: String,
    length: f64,
}

#[derive(Serialize)]
struct ClassifyOut {
    distance: f64,
    cardinality: String,
    case_tag: String,
    curves: Vec<CurveOut>,
    family: bool,
}

pub fn classify(x: &Path, y: &Path, cfg: &Config) -> Result<(), CliError> {
    let (x, y) = read_pair(x, y)?;
    let s = classify_mssr_with(&x, &y, &opts(cfg))?;
    let out = ClassifyOut {
        distance: s.distance,
        cardinality: s.cardinality.to_string(),
        case_tag: s.case_tag,
        curves: s.curves.iter().map(|c| CurveOut { class: c.class_label.to_string(), length: c.length }).collect(),
        family: s.family.is_some(),
    };
    match cfg.format {
        Format::Json => print_json(&out),
        Format::Csv => {
            println!("index,class,length,cardinality,case_tag");
            for (i, c) in out.curves.iter().enumerate() {
                println!("{},{},{},{},{}", i + 1, csv_field(&c.class), fmt17(c.length), out.cardinality, csv_field(&out.case_tag));
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct FileEntry {
    file: String,
    class: String,
    length: f64,
    /// Position on the circle for members of a family.
    theta: Option<f64>,
}

#[derive(Serialize)]
struct Manifest {
    distance: f64,
    cardinality: String,
    case_tag: String,
    k: f64,
    samples: usize,
    files: Vec<FileEntry>,
}

#[derive(Serialize)]
struct SampledCurve {
    class: String,
    length: f64,
    t: Vec<f64>,
    points: Vec<Vec<Vec<f64>>>,
}

fn write_curve(path: &Path, c: &MssrCurve, cfg: &Config) -> Result<(), CliError> {
    let n = cfg.samples;
    let ts: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let body = match cfg.format {
        Format::Csv => {
            let mut s = format!("t,{}\n", upper_header(c.start.dim()).join(","));
            for &t in &ts {
                let m = c.eval(t);
                let row: Vec<String> = std::iter::once(t).chain(upper_entries(m.matrix())).map(fmt17).collect();
                s.push_str(&row.join(","));
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let points = ts.iter().map(|&t| rows_of(c.eval(t).matrix())).collect();
            let v = SampledCurve { class: c.class_label.to_string(), length: c.length, t: ts, points };
            serde_json::to_string_pretty(&v).expect("serializable") + "\n"
        }
    };
    fs::write(path, body)?;
    Ok(())
}

pub fn interpolate(x: &Path, y: &Path, cfg: &Config) -> Result<(), CliError> {
    let out = cfg.out.as_ref().ok_or_else(|| CliError::Parse("interpolate needs --out DIR".into()))?;
    let (x, y) = read_pair(x, y)?;
    let s = classify_mssr_with(&x, &y, &opts(cfg))?;
    fs::create_dir_all(out)?;
    let ext = match cfg.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    let mut files = Vec::new();
    let mut emit = |name: String, c: &MssrCurve, theta: Option<f64>| -> Result<(), CliError> {
        write_curve(&out.join(&name), c, cfg)?;
        files.push(FileEntry { file: name, class: c.class_label.to_string(), length: c.length, theta });
        Ok(())
    };
    for (i, c) in s.curves.iter().enumerate() {
        emit(format!("curve_{:02}_{}.{ext}", i + 1, c.class_label.to_string().replace('\'', "p")), c, None)?;
    }
    if let Some(f) = &s.family {
        for j in 0..N_FAMILY {
            let theta = 2.0 * PI * j as f64 / N_FAMILY as f64;
            emit(format!("family_{:02}.{ext}", j + 1), &f.member(theta), Some(theta))?;
        }
    }
    let manifest = Manifest {
        distance: s.distance,
        cardinality: s.cardinality.to_string(),
        case_tag: s.case_tag,
        k: cfg.k,
        samples: cfg.samples,
        files,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("serializable");
    fs::write(out.join("manifest.json"), format!("{text}\n"))?;
    println!("{text}");
    Ok(())
}

#[derive(Serialize)]
struct FiberOut {
    p: usize,
    stratum: String,
    components: u128,
    component_dim: usize,
    group: String,
    shape: Option<Shape>,
    summary: String,
}

pub fn fiber(x: &Path, cfg: &Config) -> Result<(), CliError> {
    let x = read_spd(x)?;
    let f = fiber_summary(&x, cfg.tol_eig)?;
    let stratum = stratum_of(&x, cfg.tol_eig)?.to_string();
    let shape = if x.dim() == 3 { Some(shape_of(&x, cfg.tol_eig)?) } else { None };
    let group: Vec<String> =
        f.component_group_parts.parts().iter().filter(|&&k| k >= 2).map(|k| format!("SO({k})")).collect();
    let n = f.num_components;
    let head = match (group.is_empty(), n) {
        (true, 1) => "1 point".to_string(),
        (true, _) => format!("{n} points"),
        (false, 1) => format!("1 component × {}", group.join(" × ")),
        (false, _) => format!("{n} components × {}", group.join(" × ")),
    };
    let mut summary = format!("{head}, stratum {stratum}");
    if let Some(s) = shape {
        summary.push_str(&format!(", {s}"));
    }
    let out = FiberOut {
        p: x.dim(),
        stratum,
        components: n,
        component_dim: f.component_dim,
        group: if group.is_empty() { "trivial".into() } else { group.join(" × ") },
        shape,
        summary,
    };
    match cfg.format {
        Format::Json => print_json(&out),
        Format::Csv => {
            println!("p,stratum,components,component_dim,shape");
            let shape = out.shape.map(|s| s.to_string()).unwrap_or_default();
            println!("{},{},{},{},{}", out.p, out.stratum, out.components, out.component_dim, shape);
            Ok(())
        }
    }
}

pub enum InvolutionSource {
    File(PathBuf),
    Random { p: usize, m: usize, seed: u64 },
}

#[derive(Serialize)]
struct ReduceOut {
    p: usize,
    level: usize,
    reducible: bool,
    sigma: Option<String>,
    sigma_level: Option<usize>,
    old_distance: f64,
    new_distance: Option<f64>,
}

fn sign_string(s: &[i8]) -> String {
    let v: Vec<&str> = s.iter().map(|&x| if x < 0 { "-" } else { "+" }).collect();
    format!("({})", v.join(","))
}

pub fn reduce(source: InvolutionSource, cfg: &Config) -> Result<(), CliError> {
    let bad = |e: SrError| CliError::Parse(e.to_string());
    let inv = match source {
        InvolutionSource::File(path) => {
            let r = Rotation::new(read_matrix(&path)?).map_err(bad)?;
            Involution::new(r).map_err(bad)?
        }
        InvolutionSource::Random { p, m, seed } => {
            random_involution(&mut ChaCha8Rng::seed_from_u64(seed), p, m).map_err(bad)?
        }
    };
    let p = inv.dim();
    if p > MAX_SCAN_P {
        return Err(SrError::TooLarge(format!("sign-change search needs p <= {MAX_SCAN_P}, got {p}")).into());
    }
    let red = sign_change_reducible(&inv, None);
    let out = ReduceOut {
        p,
        level: inv.level(),
        reducible: red.is_some(),
        sigma: red.as_ref().map(|r| sign_string(&r.sigma.0)),
        sigma_level: red.as_ref().map(|r| r.sigma.level()),
        old_distance: red.as_ref().map_or_else(|| d_so_identity_sq(inv.rotation()).sqrt(), |r| r.old_distance),
        new_distance: red.as_ref().map(|r| r.new_distance),
    };
    match cfg.format {
        Format::Json => print_json(&out),
        Format::Csv => {
            println!("p,level,reducible,sigma,sigma_level,old_distance,new_distance");
            println!(
                "{},{},{},{},{},{},{}",
                out.p,
                out.level,
                out.reducible,
                csv_field(out.sigma.as_deref().unwrap_or("")),
                out.sigma_level.map(|l| l.to_string()).unwrap_or_default(),
                fmt17(out.old_distance),
                out.new_distance.map(fmt17).unwrap_or_default()
            );
            Ok(())
        }
    }
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct ScanRecord {
    p: usize,
    m: usize,
    construction: String,
    /// 1-based coordinate indices.
    best_J: Vec<usize>,
    dist_sq_over_pi2_4: f64,
    reducible: bool,
}

pub fn scan(p: usize, m: usize, construction: Construction, count: usize, seed: u64, cfg: &Config) -> Result<(), CliError> {
    if m == 0 || m % 2 == 1 || m > p {
        return Err(CliError::Parse(format!("m must be even with 0 < m <= p, got p = {p}, m = {m}")));
    }
    let bad = |e: SrError| CliError::Parse(e.to_string());
    let subspaces: Vec<Subspace> = match construction {
        Construction::Wp | Construction::Wprime if m != 2 => {
            return Err(CliError::Parse(format!("the {construction:?} construction is a 2-plane, got m = {m}")));
        }
        Construction::Wp => vec![counterexample_wp(p).map_err(bad)?],
        Construction::Wprime => vec![counterexample_wp_prime(p).map_err(bad)?],
        Construction::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count).map(|_| random_subspace(&mut rng, p, m)).collect::<Result<_, _>>().map_err(bad)?
        }
    };
    let name = construction.to_possible_value().expect("no skipped variants").get_name().to_string();
    if cfg.format == Format::Csv {
        println!("p,m,construction,best_J,dist_sq_over_pi2_4,reducible");
    }
    for w in &subspaces {
        let best = best_coordinate_plane(w)?;
        let rec = ScanRecord {
            p,
            m,
            construction: name.clone(),
            best_J: best.j.iter().map(|j| j + 1).collect(),
            dist_sq_over_pi2_4: best.dist * best.dist / (PI * PI / 4.0),
            reducible: sign_change_reducible(&phi_mp(w)?, None).is_some(),
        };
        match cfg.format {
            Format::Json => println!("{}", serde_json::to_string(&rec).expect("serializable")),
            Format::Csv => {
                let j: Vec<String> = rec.best_J.iter().map(|j| j.to_string()).collect();
                println!("{},{},{},{},{},{}", rec.p, rec.m, rec.construction, j.join(" "), fmt17(rec.dist_sq_over_pi2_4), rec.reducible);
            }
        }
    }
    Ok(())
}
