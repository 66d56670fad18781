use srgeom::SrError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input file or argument.
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Sr(#[from] SrError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Sr(SrError::Unsupported(_) | SrError::Degenerate(_)) => 3,
            _ => 1,
        }
    }
}
