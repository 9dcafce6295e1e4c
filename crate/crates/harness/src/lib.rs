//! Experiment runner for evaluating agents against a ground-truth world.

pub mod config;
pub mod offline;
pub mod report;
pub mod runner;

pub use config::{load_config, ExperimentConfig, LoadedConfig};
pub use report::EvaluationReport;
pub use runner::run_experiment;
