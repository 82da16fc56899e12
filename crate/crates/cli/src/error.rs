use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("invalid scenario {path}:\n  - {}", .errors.join("\n  - "))]
    Invalid { path: String, errors: Vec<String> },

    #[error("`{command}` is not available for this scenario: {reason}")]
    Unsupported { command: &'static str, reason: String },

    #[error("sweep: {0}")]
    Sweep(String),

    #[error("thread pool: {0}")]
    ThreadPool(String),

    #[error(transparent)]
    Numerics(#[from] robin_dce::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;
