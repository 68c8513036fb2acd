//! Errors of the command-line front end and their exit codes.

use thiserror::Error;

/// Failure of an experiment run.
#[derive(Debug, Error)]
pub enum CliError {
    /// The configuration is unreadable or violates a precondition.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A computed result violates an invariant.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// A numerical routine failed.
    #[error(transparent)]
    Core(#[from] cyclicity_core::Error),
    /// Reading the configuration or writing the output failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit code: 2 for validation failures, 3 for numerical
    /// failures, 1 for i/o failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) | CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

/// Result alias for the front end.
pub type Result<T> = std::result::Result<T, CliError>;
