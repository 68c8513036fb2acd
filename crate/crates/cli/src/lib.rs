//! Command-line front end for the cyclicity experiments.
//!
//! Configurations are JSON, results are CSV tables preceded by one
//! `#`-prefixed JSON metadata line.

pub mod config;
pub mod error;
pub mod experiments;
pub mod table;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{CliError, Result};
pub use experiments::run_experiment;
pub use table::ResultTable;

/// Environment variable capping the worker thread count.
pub const THREADS_VAR: &str = "CYCLICITY_THREADS";

/// Parses a thread cap; `None` leaves the default pool size.
pub fn parse_thread_cap(value: Option<&str>) -> Result<Option<usize>> {
    match value {
        None => Ok(None),
        Some(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "{THREADS_VAR} must be a positive integer, got `{raw}`"
            ))),
        },
    }
}
