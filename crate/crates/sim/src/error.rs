//! Errors raised by the command-line layer and their exit codes.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Error)]
pub enum SimError {
    /// Bad flags, config file contents or parameter combinations.
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] sps_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl SimError {
    pub fn config(msg: impl Into<String>) -> Self {
        SimError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io { path: path.into(), source }
    }
}

/// Exit status for a run that completed and every check passed.
pub const EXIT_OK: u8 = 0;
/// Exit status when a validation check failed.
pub const EXIT_VALIDATION_FAILED: u8 = 1;
/// Exit status for usage, configuration and input/output problems.
pub const EXIT_CONFIG: u8 = 2;
