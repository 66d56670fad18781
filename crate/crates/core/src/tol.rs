//! Default numerical tolerances.

pub const TAU_ORTH: f64 = 1e-9;
pub const TAU_SYM: f64 = 1e-9;
pub const TAU_EIG: f64 = 1e-8;
pub const TAU_RECON: f64 = 1e-8;
/// Absolute tolerance for ties between branch lengths and sign tests.
pub const TIE_TOL: f64 = 1e-9;
/// `min(|z|, |w|)` below this is treated as zero (same symmetry axis).
pub const AXIS_TOL: f64 = 1e-8;
/// Strict-improvement margin for sign-change reducibility.
pub const REDUCE_MARGIN: f64 = 1e-12;
