//! Experiment harness for the secrecy age toolkit: figure sweeps, the
//! method cross-check, and the transmission-probability optimizer.

pub mod cli;
pub mod config;
pub mod eval;
pub mod experiments;
pub mod export;
pub mod table;

use std::path::PathBuf;

use aoi_secrecy::{AnalyticsError, ModelError, OracleError, SimError};
use thiserror::Error;

pub use config::{ConfigError, Experiment, Method, SweepSpec};
pub use table::Table;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error("oracle: {0}")]
    Oracle(#[from] OracleError),
    #[error("simulation: {0}")]
    Sim(#[from] SimError),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

impl LabError {
    /// Whether the error stems from the inputs rather than from running.
    pub fn is_config(&self) -> bool {
        matches!(self, LabError::Config(_) | LabError::Model(_))
    }
}

/// Result of one experiment run.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub table: Table,
    /// Plain-text report.
    pub summary: String,
    /// Verdict of the experiment's checks; always true for the sweeps.
    pub passed: bool,
}

pub(crate) fn method_list(methods: &[Method]) -> String {
    methods.iter().map(|m| m.label()).collect::<Vec<_>>().join(",")
}

/// Validates `spec` and runs its experiment.
pub fn run(spec: &SweepSpec) -> Result<Outcome, LabError> {
    spec.validate()?;
    let runner = eval::Runner::new(spec.workers)?;
    log::info!("running {} on {} workers", spec.experiment, runner.workers());
    match spec.experiment {
        Experiment::Fig1 => experiments::fig1::run(spec, &runner),
        Experiment::Fig2 => experiments::fig2::run(spec, &runner),
        Experiment::Compare => experiments::compare::run(spec, &runner),
        Experiment::Optimize => experiments::optimize::run(spec, &runner),
    }
}
