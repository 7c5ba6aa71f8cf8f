use fracops::FracError;
use levy_core::LevyError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("inversion failed: {0}")]
    Inversion(String),
    #[error(transparent)]
    Levy(#[from] LevyError),
    #[error(transparent)]
    Frac(#[from] FracError),
}

pub type Result<T> = std::result::Result<T, TransformError>;
