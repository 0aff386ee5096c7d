//! Experiment orchestration: seeded batches of runs, statistics, report
//! files, and an exhaustive-search oracle for validating the optimizers.

mod config;
mod experiment;
mod oracle;
mod report;

pub use config::{DataSource, ExperimentConfig, Mode, CONFIG_KEYS};
pub use experiment::{
    discover, multi_run_representative, run_experiment, run_experiment_on, Dataset, Discovery, RunSettings, Sidecar,
    RECOVERY_DIGITS,
};
pub use oracle::{brute_force_oracle, equation_count, OracleResult, ORACLE_BUDGET};
pub use report::{emit_reports, mean_variance, ExperimentReport, RunRecord, RunStats};
