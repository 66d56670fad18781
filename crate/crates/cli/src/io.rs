//! Matrix input and numeric output.

use std::path::Path;

use nalgebra::DMatrix;
use srgeom::manifold::SpdMatrix;

use crate::error::CliError;

/// Reads a square matrix given either as a JSON array of rows or as
/// whitespace-separated text, one row per line.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>, CliError> {
    let text = text.trim();
    let rows: Vec<Vec<f64>> = if text.starts_with('[') {
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("bad JSON matrix: {e}")))?
    } else {
        text.lines()
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .map(|l| {
                l.split_whitespace()
                    .map(|tok| tok.parse::<f64>().map_err(|_| CliError::Parse(format!("not a number: {tok:?}"))))
                    .collect()
            })
            .collect::<Result<_, _>>()?
    };
    let p = rows.len();
    if p == 0 {
        return Err(CliError::Parse("empty matrix".into()));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != p) {
        return Err(CliError::Parse(format!("expected {p} columns, found a row with {}", r.len())));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(CliError::Parse("matrix has non-finite entries".into()));
    }
    Ok(DMatrix::from_fn(p, p, |i, j| rows[i][j]))
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    parse_matrix(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn read_spd(path: &Path) -> Result<SpdMatrix, CliError> {
    SpdMatrix::new(read_matrix(path)?).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Column names of the upper triangle, row-major: x11,x12,…,xpp.
pub fn upper_header(p: usize) -> Vec<String> {
    (0..p).flat_map(|i| (i..p).map(move |j| format!("x{}{}", i + 1, j + 1))).collect()
}

pub fn upper_entries(m: &DMatrix<f64>) -> Vec<f64> {
    let p = m.nrows();
    (0..p).flat_map(|i| (i..p).map(move |j| m[(i, j)])).collect()
}

pub fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json_agree() {
        let a = parse_matrix("2 0.5\n0.5 1\n").unwrap();
        let b = parse_matrix("[[2, 0.5], [0.5, 1]]").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ragged_rows_are_rejected() {
        assert!(matches!(parse_matrix("1 2\n3"), Err(CliError::Parse(_))));
        assert!(matches!(parse_matrix("1 2 3\n4 5 6"), Err(CliError::Parse(_))));
        assert!(matches!(parse_matrix("1 x\n0 1"), Err(CliError::Parse(_))));
        assert!(matches!(parse_matrix(""), Err(CliError::Parse(_))));
    }

    #[test]
    fn header_for_p3() {
        assert_eq!(upper_header(3).join(","), "x11,x12,x13,x22,x23,x33");
    }

    proptest::proptest! {
        #[test]
        fn fmt17_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let back: f64 = fmt17(x).parse().unwrap();
            proptest::prop_assert_eq!(back.to_bits(), x.to_bits());
        }

        #[test]
        fn text_matrix_round_trips(v in proptest::collection::vec(-1e6f64..1e6, 9)) {
            let m = DMatrix::from_row_slice(3, 3, &v);
            let text: String = rows_of(&m).iter().map(|r| r.iter().map(|&x| fmt17(x)).collect::<Vec<_>>().join(" ") + "\n").collect();
            proptest::prop_assert_eq!(parse_matrix(&text).unwrap(), m);
        }
    }
}
