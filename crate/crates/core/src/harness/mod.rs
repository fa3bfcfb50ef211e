//! Experiment harness: configuration, experiment runners and CSV output.

mod config;
mod experiments;
mod table;

pub mod cli;

pub use config::{
    A2aParams, A2gParams, ExperimentConfig, ExperimentKind, FadingSpec, FilterParams, Layer,
    Trajectory,
};
pub use experiments::{run_experiment, ExperimentOutput, SELFTEST_GRID};
pub use table::{emit_csv, log_regression, write_csv, LogFit, Table};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("experiment produced no rows")]
    EmptyResult,
    #[error("{experiment} failed: {message}")]
    Runtime {
        experiment: &'static str,
        message: String,
    },
    #[error("i/o error: {0}")]
    Io(String),
}

impl HarnessError {
    /// 1 for configuration problems, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            _ => 2,
        }
    }
}
