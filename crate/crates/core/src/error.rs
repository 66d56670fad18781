use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SrError {
    #[error("matrix is not symmetric positive-definite")]
    NotSpd,
    #[error("rotation is not an involution")]
    NotInvolution,
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("rotation is at the cut locus (an involution)")]
    AtCutLocus,
    #[error("wrong stratum: {0}")]
    WrongStratum(String),
    #[error("degenerate comparison: {0}")]
    Degenerate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("curves do not join the same endpoints")]
    MismatchedEndpoints,
    #[error("subspace dimension must be even")]
    OddDimension,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bad dimension: {0}")]
    BadDimension(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, SrError>;
