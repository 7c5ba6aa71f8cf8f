use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LevyError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("invalid process spec: {0}")]
    InvalidSpec(String),
    #[error("time {t} lies beyond the path horizon D = {horizon}; extend the operational grid")]
    Horizon { t: f64, horizon: f64 },
}

pub type Result<T> = std::result::Result<T, LevyError>;
