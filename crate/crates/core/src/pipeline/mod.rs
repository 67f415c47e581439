//! End-to-end experiments: data generation, training, optimization,
//! simulator validation and reporting.

mod config;
mod experiment;
mod manifest;
mod report;
pub mod stages;
mod stats;
mod svg;

pub use config::{load_config, parse_config, Algorithm, ExperimentConfig};
pub use experiment::{
    generate_databases, optimize_trial, optimize_trials, run_experiment, run_experiment_with, run_trial, seeds,
    summarize, train_config, train_models, trial_keys, validate_on_simulator, validate_record, validate_trials,
    Artifacts, CellSummary, Databases, Experiment, Normalizers, PairSummary, TrialFailure, TrialKey, TrialRecord,
    TrialSet, Validation,
};
pub use manifest::{read_manifest, sha256_hex, FileDigest, RunManifest, MANIFEST_FILE, SEED_DERIVATION};
pub use report::{emit_report, render_report, summary_csv, trace_file_name, SUMMARY_HEADER};
pub use stats::{mean, median, quantile, sign_test, SignTest};
