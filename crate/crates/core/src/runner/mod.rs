//! Scenario runner: loads a scenario, runs seeded repetitions over its sweep
//! points, and writes per-file, per-node, per-mosaic and summary outputs.

mod output;
mod run;
pub mod scenario;
pub mod synthetic;

use std::path::Path;

use thiserror::Error;

pub use output::{
    compare_dirs, comparisons, mean_stddev, summarize, summary_csv, summary_text, write_outputs,
    SummaryRow, FAILED_MARKER,
};
pub use run::{
    rep_trace, run_rep, run_scenario, RepResult, RunOptions, ScenarioResult, SweepPoint,
    WindowMosaics,
};
pub use scenario::{PolicyChoice, Scenario, SyntheticTrace};
pub use synthetic::synthetic_trace;

use crate::simnet::ConfigError;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("no repetition completed")]
    NoCompletedReps,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Summary { path: String, message: String },
}

impl RunError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        RunError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
