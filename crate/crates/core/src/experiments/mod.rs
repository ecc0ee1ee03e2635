//! Experiment configuration, sweeps, and result tables.

pub mod config;
pub mod output;
pub mod runner;

pub use config::{ExperimentConfig, Format, Mode, Task};
pub use output::{write_results, ResultRecord, ResultTable, RunMetadata, COLUMNS};
pub use runner::{repetition_state, run, run_advantage_map, run_crossover, run_sweep_n, run_sweep_shots};
