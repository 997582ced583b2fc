//! Seeded experiment orchestration: configuration, trial runs, result files,
//! manifests, summary tables, plot data and theory audits.

pub mod config;
pub mod experiment;
pub mod records;
pub mod runner;
pub mod summary;

pub use config::{ExperimentConfig, KernelChoice, OBJECTIVE_IDS};
pub use experiment::{
    config_from_manifest, is_manifest, read_manifest, run_experiment, run_experiment_with,
    ExperimentOutcome, MANIFEST_NAME,
};
pub use records::{load_results, read_trial, render_trial, trial_file_name, TrialRecord};
pub use runner::{prepare_trial, run_prepared, run_trial, TrialResult, TrialSetup};
pub use summary::{
    curve, emit_plotdata, mean_and_se, summarize, verify_theory, SummaryRow, SummaryTable,
    TheoryAudit, TheoryRow,
};
