//! Speech emotion recognition by iterative feature boosting.
//!
//! The pipeline extracts a 90-dimensional acoustic feature vector per
//! recording, searches feature combinations with a variance-ratio sparsity
//! criterion, projects the retained combinations with PCA, classifies
//! emotions with an ensemble-model registry, attributes predictions with
//! Shapley values, and feeds the attributions back to prune weak features
//! until convergence.

pub mod acoustic_features;
pub mod classifiers;
pub mod dataset_io;
pub mod explainability;
pub mod feature_boosting;
pub mod pipeline;
pub mod rng;
