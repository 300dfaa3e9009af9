//! Feature boosting: variance-ratio scoring of feature combinations,
//! retention thresholding, per-combination PCA, and boosted-dataset
//! assembly.

mod boosted;
mod combos;
mod pca;
mod select;
mod vrc;

pub use boosted::{build_boosted, column_name, BoostedDataset, ColumnProvenance};
pub use combos::{sample_combinations, FeatureCombination, SampledCombinations};
pub use pca::{pca_fit, project, PrincipalBasis, EV_RETAIN_PERCENT};
pub use select::{score_and_select, CombinationReport, SelectionOutcome};
pub use vrc::vrc;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoostError {
    #[error("degenerate class structure: N={n}, E={e}")]
    DegenerateClasses { n: usize, e: usize },
    #[error("full-set VRC is infinite; combinations cannot be compared against it")]
    NonFiniteReference,
    #[error("no combination improves on the full feature set")]
    NoImprovingCombination,
    #[error("infeasible combination request: {detail}")]
    InfeasibleRequest { detail: String },
    #[error("PCA needs at least 2 rows, got {rows}")]
    DegenerateInput { rows: usize },
    #[error("shape mismatch: basis dimension {expected}, data width {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("no retained combinations to build a boosted dataset from")]
    EmptySelection,
}
