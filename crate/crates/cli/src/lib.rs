//! Config-driven runner behind the `geofix` binary.

pub mod bench;
pub mod config;
pub mod run;

pub use bench::{run_bench, BenchConfig, BenchOutcome};
pub use config::ExperimentConfig;
pub use run::{run_experiment, CheckOutcome, RunOutcome};

/// Exit status for a run that finished with at least one violated bound.
pub const EXIT_VIOLATION: u8 = 1;
/// Exit status for anything that prevented a verdict.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] geofix::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    /// A finished run with at least one failed check.
    #[error("{0}")]
    Violation(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Violation(_) => EXIT_VIOLATION,
            _ => EXIT_USAGE,
        }
    }
}
