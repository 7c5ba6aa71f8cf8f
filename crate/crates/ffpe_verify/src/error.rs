use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Levy(#[from] levy_core::LevyError),
    #[error(transparent)]
    Transform(#[from] transforms::TransformError),
    #[error(transparent)]
    SemiMarkov(#[from] semimarkov::SemiMarkovError),
    #[error(transparent)]
    Frac(#[from] fracops::FracError),
}

pub type Result<T> = std::result::Result<T, VerifyError>;
