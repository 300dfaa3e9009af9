//! Hyperparameter grid search scored by cross-validated macro F1.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::cv::{cross_validate, CvReport};
use super::model::Table;
use super::spec::{ModelKind, ModelSpec};
use super::ModelError;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub spec: ModelSpec,
    pub mean_macro_f1: f64,
    pub std_macro_f1: f64,
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchReport {
    pub rows: Vec<GridRow>,
    pub best: ModelSpec,
    pub evaluated: usize,
    pub total_candidates: usize,
}

/// Cartesian product of the value lists, in lexicographic parameter order.
fn expand(kind: ModelKind, seed: u64, grid: &BTreeMap<String, Vec<f64>>) -> Vec<ModelSpec> {
    let mut specs = vec![ModelSpec::new(kind, seed)];
    for (name, values) in grid {
        let mut next = Vec::with_capacity(specs.len() * values.len());
        for spec in &specs {
            for &v in values {
                next.push(spec.clone().with(name, v));
            }
        }
        specs = next;
    }
    specs
}

/// Search the grid; `max_candidates` (if set and smaller) subsamples the
/// candidate list with a seed-derived RNG before evaluation. The winner is
/// the highest mean macro F1; exact ties go to the lexicographically
/// smallest hyperparameter map.
#[allow(clippy::too_many_arguments)]
pub fn grid_search(
    kind: ModelKind,
    grid: &BTreeMap<String, Vec<f64>>,
    x: &Table,
    y: &[String],
    folds: usize,
    seed: u64,
    max_candidates: Option<usize>,
) -> Result<GridSearchReport, ModelError> {
    let mut candidates = expand(kind, seed, grid);
    let total_candidates = candidates.len();
    if let Some(cap) = max_candidates {
        if cap < candidates.len() {
            use rand::seq::SliceRandom;
            let mut r = rng::stage_rng(seed, "grid_subsample", 0);
            candidates.shuffle(&mut r);
            candidates.truncate(cap);
            // Restore a stable evaluation order.
            candidates.sort_by(|a, b| format!("{:?}", a.hyperparameters).cmp(&format!("{:?}", b.hyperparameters)));
        }
    }

    let mut rows: Vec<GridRow> = Vec::with_capacity(candidates.len());
    for spec in &candidates {
        let report: CvReport = cross_validate(spec, x, y, folds, seed)?;
        rows.push(GridRow {
            spec: spec.clone(),
            mean_macro_f1: report.mean_macro_f1,
            std_macro_f1: report.std_macro_f1,
            mean_accuracy: report.mean_accuracy,
        });
    }
    rows.sort_by(|a, b| {
        b.mean_macro_f1
            .partial_cmp(&a.mean_macro_f1)
            .unwrap()
            .then_with(|| {
                format!("{:?}", a.spec.hyperparameters).cmp(&format!("{:?}", b.spec.hyperparameters))
            })
    });
    let best = rows[0].spec.clone();
    Ok(GridSearchReport {
        evaluated: rows.len(),
        rows,
        best,
        total_candidates,
    })
}
