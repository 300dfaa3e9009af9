//! Orchestration of the full iterative loop: boosting, model selection,
//! explanation, pruning, convergence, multi-seed evaluation, and the
//! statistical comparison of runs.

mod audit;
mod config;
mod iterate;
mod run;
mod stats;

pub use audit::AuditLog;
pub use config::{config_hash, RunConfig};
pub use iterate::{converged, run_iteration, ConvergenceDecision, IterationState, SplitFrame};
pub use run::{
    compare_methods, extract_feature_matrix, run, run_on_matrix, run_report_on_matrix,
    ComparisonBlock, RepeatSummary, RunReport, SeedMetrics, SeedRunOutcome,
};
pub use stats::{compare_metric_samples, welch_ttest, TTestResult, ALPHA};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("unknown config key {0:?}")]
    UnknownConfigKey(String),
    #[error("active feature set has {active} features, below the combination size {p}")]
    ActiveSetTooSmall { active: usize, p: usize },
    #[error("statistical comparison needs at least 2 repeats per run, got {0}")]
    InsufficientRepeats(usize),
    #[error("t-test sample too small: {0} values")]
    SampleTooSmall(usize),
    #[error("leakage audit failure: {0}")]
    LeakageDetected(String),
    #[error(transparent)]
    Dataset(#[from] crate::dataset_io::DatasetError),
    #[error(transparent)]
    Feature(#[from] crate::acoustic_features::FeatureError),
    #[error(transparent)]
    Boost(#[from] crate::feature_boosting::BoostError),
    #[error(transparent)]
    Model(#[from] crate::classifiers::ModelError),
    #[error(transparent)]
    Explain(#[from] crate::explainability::ExplainError),
    #[error("io error at {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}
