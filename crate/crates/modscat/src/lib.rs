//! Experiment runner for the modified-scattering diagnostics: configuration,
//! initial data, observers, artifacts and randomized inequality checks.

// Negated comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod fit;
pub mod initial;
pub mod propcheck;
pub mod runner;

pub use config::ExperimentConfig;
pub use error::RunError;
pub use runner::{contrast_experiment, run_experiment, run_sweep, simulate, RunOutcome};
