//! Experiment harness behind the `pareto-tas` binary.
//!
//! Every subcommand is a plain function returning a report, so the binary
//! only parses flags and writes files.

pub mod bench;
pub mod instance;
pub mod output;
pub mod simulate;
pub mod solve;
pub mod verify;

use std::path::PathBuf;

pub use bench::{cmd_bench, BenchConfig, BenchReport};
pub use instance::InstanceSource;
pub use simulate::{cmd_simulate, SimulateConfig, Simulation};
pub use solve::{cmd_solve, SolveReport};
pub use verify::{cmd_verify, VerifyReport};

/// Overrides `--workers` when set.
pub const THREADS_ENV: &str = "PARETO_TAS_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] pareto_tas::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

/// Worker count: the environment variable wins over the flag; `None` lets
/// the pool pick one per core.
pub fn worker_count(flag: Option<usize>) -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV}={v:?} is not a thread count"))),
        Err(_) => Ok(flag),
    }
}
