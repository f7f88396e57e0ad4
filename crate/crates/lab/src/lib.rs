//! Experiment runner for the `dampwave-core` solvers: flat configuration
//! files, the canonical decay experiments, CSV artifacts and pass/fail
//! verdicts.

pub mod config;
pub mod experiments;
pub mod record;
pub mod report;
pub mod suite;
pub mod trials;

pub use config::{ConfigError, ExperimentConfig, ExperimentKind};
pub use experiments::{run_experiment, Outcome};
pub use report::Verdict;

/// Exit status for configuration errors.
pub const EXIT_CONFIG: i32 = 2;
