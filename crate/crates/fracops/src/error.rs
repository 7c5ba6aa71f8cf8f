use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FracError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("coverage error: {0}")]
    Coverage(String),
}

pub type Result<T> = std::result::Result<T, FracError>;
