//! Experiment harness: JSON configs, seeded replications run in parallel,
//! CSV traces and summaries, SVG charts and reference bound curves.

pub mod cli;
pub mod config;
pub mod curves;
pub mod error;
pub mod output;
pub mod runner;
pub mod setup;
pub mod summary;
pub mod svg;
pub mod sweep;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use runner::{run_experiment, Experiment, RunOptions};
pub use summary::{log_checkpoints, SummaryTable};
