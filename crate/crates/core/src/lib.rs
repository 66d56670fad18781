//! Scaling-rotation geometry of symmetric positive-definite matrices.
//!
//! An SPD matrix X = U D Uᵀ is lifted to its fiber of eigen-decompositions
//! (U, D) ∈ SO(p) × Diag⁺(p). The scaling-rotation distance is the distance
//! between fibers, and minimal smooth scaling-rotation (MSSR) curves are
//! projections of the shortest geodesics between them.

pub mod error;
pub mod grassmann;
pub mod manifold;
pub mod partition;
pub mod quat;
pub mod random;
pub mod signed_perm;
pub mod sr;
pub mod tol;

pub use error::{Result, SrError};
