//! Experiment harness for [`cslce_core`]: configuration, dataset files,
//! seeded Monte-Carlo trials and CSV results. The `cslce` binary wraps it.

pub mod config;
mod error;
pub mod experiment;
pub mod io;
pub mod score;

pub use config::{ExperimentConfig, Settings};
pub use error::{BenchError, Result};
pub use experiment::{run_experiment, sample_seeds, Report};
