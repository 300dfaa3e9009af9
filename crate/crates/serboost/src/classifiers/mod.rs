//! The classification registry: six deterministic trainable models behind
//! one interface, with stratified cross-validation, grid search, and
//! macro-averaged evaluation metrics.

mod bayes;
mod cv;
mod grid;
mod knn;
mod logistic;
mod metrics;
mod model;
mod spec;
mod tree;

pub use cv::{cross_validate, stratified_folds, CvReport};
pub use grid::{grid_search, GridRow, GridSearchReport};
pub use metrics::{evaluate, MetricsReport};
pub use model::{predict, predict_proba, train, FittedParams, Table, TrainedModel};
pub use spec::{ModelKind, ModelSpec};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("training data has a single class")]
    SingleClass,
    #[error("non-finite value in training data at row {row}, column {col}")]
    NonFiniteInput { row: usize, col: usize },
    #[error("input schema does not match training columns: {detail}")]
    SchemaMismatch { detail: String },
    #[error("invalid hyperparameter {name}={value} for {kind:?}")]
    InvalidHyperparameter {
        kind: spec::ModelKind,
        name: String,
        value: f64,
    },
    #[error("empty input")]
    EmptyInput,
    #[error("model serialization: {0}")]
    Serialization(String),
}
