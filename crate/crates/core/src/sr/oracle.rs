use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3};

use super::{canonical_point, StratumKind};
use crate::error::{Result, SrError};
use crate::manifold::SpdMatrix;
use crate::signed_perm::SignedPerm;
use crate::tol::TAU_EIG;

fn m3(m: &DMatrix<f64>) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| m[(i, j)])
}

/// Rotation about e₁ by t is E₀ + cos t·E₁ + sin t·E₂.
fn basis() -> [Matrix3<f64>; 3] {
    [
        Matrix3::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
        Matrix3::new(0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0),
        Matrix3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0),
    ]
}

/// Grid search over the fibers of X and Y for p = 3: all 24 g ∈ S̃₃⁺ and
/// `n_grid` equally spaced angles on each circle factor (rotations about
/// the simple-eigenvalue axis). The rotation distance comes from the trace
/// of R_U(α)ᵀ M R_V(β) P_gᵀ, which is bilinear in (1, cos, sin) of the two
/// angles. For each α the best grid β is the one nearest the maximizer of
/// the resulting sinusoid, so the search is exact on the grid.
pub fn brute_force_oracle(x: &SpdMatrix, y: &SpdMatrix, k: f64, n_grid: usize) -> Result<f64> {
    if x.dim() != 3 || y.dim() != 3 {
        return Err(SrError::BadDimension("the oracle is for p = 3".into()));
    }
    let n_grid = n_grid.max(1);
    let (ex, sx) = canonical_point(x, TAU_EIG)?;
    let (ey, sy) = canonical_point(y, TAU_EIG)?;
    let iso = sx == StratumKind::Bottom || sy == StratumKind::Bottom;
    let m = m3(&(ex.u.matrix().transpose() * ey.u.matrix()));
    let h = 2.0 * PI / n_grid as f64;
    let grid: Vec<(f64, f64)> = (0..n_grid).map(|i| (i as f64 * h).sin_cos()).collect();
    // (1, cos α, sin α) for the X circle; a single α = 0 when X is triaxial
    let alphas: Vec<[f64; 3]> = if sx == StratumKind::Mid {
        grid.iter().map(|&(s, c)| [1.0, c, s]).collect()
    } else {
        vec![[1.0, 1.0, 0.0]]
    };
    let y_circle = sy == StratumKind::Mid;
    let e = basis();
    let mut best = f64::INFINITY;
    for g in SignedPerm::enumerate_even(3)? {
        let lg = g.act_on_diag(&ey.d);
        let diag: f64 = ex.d.values().iter().zip(lg.values()).map(|(a, b)| (b.ln() - a.ln()).powi(2)).sum();
        if iso {
            best = best.min(diag.sqrt());
            continue;
        }
        let pt = m3(&g.mat()).transpose();
        // t[a][b] = tr(Pᵀ E_aᵀ M E_b)
        let mut t = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                t[a][b] = (pt * e[a].transpose() * m * e[b]).trace();
            }
        }
        let mut tmax = f64::NEG_INFINITY;
        for fa in &alphas {
            let c: Vec<f64> = (0..3).map(|b| (0..3).map(|a| fa[a] * t[a][b]).sum()).collect();
            let tr = if y_circle {
                let i0 = (f64::atan2(c[2], c[1]) / h).round() as i64;
                (i0 - 1..=i0 + 1)
                    .map(|i| {
                        let (s, co) = grid[i.rem_euclid(n_grid as i64) as usize];
                        c[0] + c[1] * co + c[2] * s
                    })
                    .fold(f64::NEG_INFINITY, f64::max)
            } else {
                c[0] + c[1]
            };
            tmax = tmax.max(tr);
        }
        let th = ((tmax - 1.0) / 2.0).clamp(-1.0, 1.0).acos();
        best = best.min((k * th * th + diag).sqrt());
    }
    Ok(best)
}
