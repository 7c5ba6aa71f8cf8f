use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Run(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed")]
    VerificationFailed,
}

impl CliError {
    /// 1 for a failed check, 2 for everything the caller has to fix.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed => 1,
            _ => 2,
        }
    }
}

macro_rules! run_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Run(e.to_string())
            }
        }
    )*};
}

run_error!(
    levy_core::LevyError,
    semimarkov::SemiMarkovError,
    transforms::TransformError,
    ffpe_verify::VerifyError
);

pub type Result<T> = std::result::Result<T, CliError>;
