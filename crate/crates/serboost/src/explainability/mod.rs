//! Shapley attribution over boosted columns, global importance
//! aggregation, and back-mapping to original features via PCA loadings.

mod importance;
mod shapley;
mod value;

pub use importance::{
    backmap, global_importance, EstimatorInfo, FeatureImportance, ImportanceEntry,
    ImportanceReport,
};
pub use shapley::{shapley_exact, shapley_permutation, ShapleyAttribution, EXACT_COLUMN_CAP};
pub use value::{coalition_value, ValueFunction};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExplainError {
    #[error("coalition columns do not match the model schema: {detail}")]
    SchemaMismatch { detail: String },
    #[error("{d} columns exceed the exact-enumeration cap of {cap}")]
    TooManyColumns { d: usize, cap: usize },
    #[error("missing provenance for column {column}")]
    MissingProvenance { column: String },
    #[error("no samples to explain")]
    EmptyInput,
    #[error("permutation count {0} is below the minimum of 10")]
    TooFewPermutations(usize),
}
