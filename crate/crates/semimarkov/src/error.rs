use levy_core::LevyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SemiMarkovError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("wrong kernel: {0}")]
    WrongKernel(String),
    #[error("divergent occupation measure: {0}")]
    Divergence(String),
    #[error("size error: {0}")]
    Size(String),
    #[error(transparent)]
    Levy(#[from] LevyError),
    #[error(transparent)]
    Frac(#[from] fracops::FracError),
}

pub type Result<T> = std::result::Result<T, SemiMarkovError>;
