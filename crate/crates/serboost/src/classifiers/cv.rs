//! Stratified k-fold cross-validation.

use serde::{Deserialize, Serialize};

use super::metrics::{evaluate, MetricsReport};
use super::model::{predict, train, Table};
use super::spec::ModelSpec;
use super::ModelError;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub spec: ModelSpec,
    pub requested_folds: usize,
    /// Folds actually used; smaller than requested when the smallest class
    /// cannot populate every fold.
    pub folds: usize,
    pub fold_metrics: Vec<MetricsReport>,
    pub mean_accuracy: f64,
    pub mean_macro_f1: f64,
    pub std_macro_f1: f64,
    pub warnings: Vec<String>,
}

/// Deterministic stratified fold assignment: shuffle each class's row
/// indices with a seed derived from the class index, then deal them
/// round-robin across folds. Returns per-fold row-index sets.
pub fn stratified_folds(labels: &[String], folds: usize, seed: u64) -> Vec<Vec<usize>> {
    use rand::seq::SliceRandom;
    let mut classes: Vec<String> = labels.to_vec();
    classes.sort();
    classes.dedup();
    let mut assignment = vec![Vec::new(); folds];
    for (ci, class) in classes.iter().enumerate() {
        let mut rows: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|(_, l)| *l == class)
            .map(|(i, _)| i)
            .collect();
        let mut r = rng::stage_rng(seed, "stratified_folds", ci as u64);
        rows.shuffle(&mut r);
        for (j, row) in rows.into_iter().enumerate() {
            assignment[j % folds].push(row);
        }
    }
    for fold in &mut assignment {
        fold.sort_unstable();
    }
    assignment
}

/// k-fold CV with per-fold training via the shared registry. The fold
/// count is clamped so every fold holds at least one sample of every
/// class; a warning records any clamp.
pub fn cross_validate(
    spec: &ModelSpec,
    x: &Table,
    y: &[String],
    requested_folds: usize,
    seed: u64,
) -> Result<CvReport, ModelError> {
    if x.rows.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    let mut classes: Vec<String> = y.to_vec();
    classes.sort();
    classes.dedup();
    if classes.len() < 2 {
        return Err(ModelError::SingleClass);
    }
    let min_class = classes
        .iter()
        .map(|c| y.iter().filter(|l| *l == c).count())
        .min()
        .unwrap();
    let mut warnings = Vec::new();
    let folds = requested_folds.min(min_class).max(2);
    if folds != requested_folds {
        warnings.push(format!(
            "requested {requested_folds} folds, clamped to {folds} (smallest class has {min_class} samples)"
        ));
    }

    let fold_rows = stratified_folds(y, folds, seed);
    let mut fold_metrics = Vec::with_capacity(folds);
    for held_out in &fold_rows {
        let held: std::collections::BTreeSet<usize> = held_out.iter().copied().collect();
        let mut train_rows = Vec::new();
        let mut train_labels = Vec::new();
        let mut test_rows = Vec::new();
        let mut test_labels = Vec::new();
        for i in 0..x.n_rows() {
            if held.contains(&i) {
                test_rows.push(x.rows[i].clone());
                test_labels.push(y[i].clone());
            } else {
                train_rows.push(x.rows[i].clone());
                train_labels.push(y[i].clone());
            }
        }
        let model = train(
            spec,
            &Table::new(x.columns.clone(), train_rows),
            &train_labels,
        )?;
        let preds = predict(&model, &Table::new(x.columns.clone(), test_rows))?;
        fold_metrics.push(evaluate(&classes, &test_labels, &preds));
    }

    let f1s: Vec<f64> = fold_metrics.iter().map(|m| m.macro_f1).collect();
    let mean_macro_f1 = f1s.iter().sum::<f64>() / f1s.len() as f64;
    let var = f1s
        .iter()
        .map(|f| (f - mean_macro_f1) * (f - mean_macro_f1))
        .sum::<f64>()
        / f1s.len() as f64;
    let mean_accuracy =
        fold_metrics.iter().map(|m| m.accuracy).sum::<f64>() / fold_metrics.len() as f64;

    Ok(CvReport {
        spec: spec.clone(),
        requested_folds,
        folds,
        fold_metrics,
        mean_accuracy,
        mean_macro_f1,
        std_macro_f1: var.sqrt(),
        warnings,
    })
}
