use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("state is not normalized (norm² deficit {deficit:e})")]
    Normalization { deficit: f64 },

    #[error("numerical health check failed: {0}")]
    NumericalHealth(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit-code class: 1 for usage/config problems, 2 for numerical or
    /// certification failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NumericalHealth(_) => 2,
            _ => 1,
        }
    }
}
