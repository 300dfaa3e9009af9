//! One iteration of the loop — boosting, model selection, explanation,
//! pruning — plus the convergence check.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::acoustic_features::{zscore_apply, zscore_fit, FeatureMatrix};
use crate::classifiers::{
    cross_validate, evaluate, predict, train, MetricsReport, ModelKind, ModelSpec, Table,
};
use crate::explainability::{backmap, global_importance, ImportanceReport};
use crate::feature_boosting::{
    build_boosted, pca_fit, sample_combinations, score_and_select, BoostedDataset,
    CombinationReport, PrincipalBasis,
};
use crate::rng;

use super::audit::AuditLog;
use super::config::RunConfig;
use super::PipelineError;

/// The three data partitions over original feature columns.
#[derive(Debug, Clone)]
pub struct SplitFrame {
    pub train: FeatureMatrix,
    pub validation: FeatureMatrix,
    pub test: FeatureMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelCvRow {
    pub model: String,
    pub mean_macro_f1: f64,
    pub std_macro_f1: f64,
    pub mean_accuracy: f64,
    pub folds: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationState {
    /// 1-based iteration number.
    pub iteration: usize,
    /// Indices into the full original column list.
    pub active_indices: Vec<usize>,
    pub active_features: Vec<String>,
    pub vrc_all: f64,
    pub alpha: f64,
    pub combination_reports: Vec<CombinationReport>,
    pub boosted_columns: Vec<String>,
    pub model_table: Vec<ModelCvRow>,
    pub best_spec: ModelSpec,
    pub validation_metrics: MetricsReport,
    pub importance: ImportanceReport,
    /// Feature names pruned at the end of this iteration.
    pub pruned: Vec<String>,
    pub next_active_indices: Vec<usize>,
}

fn to_table(b: &BoostedDataset) -> Table {
    Table::new(b.columns.clone(), b.rows.clone())
}

fn encode(labels: &[String], classes: &[String]) -> Vec<usize> {
    labels
        .iter()
        .map(|l| classes.iter().position(|c| c == l).expect("label in classes"))
        .collect()
}

/// Class-balanced seeded row subset of at most `cap` rows.
fn balanced_subset(labels: &[String], cap: usize, seed: u64, stage: &str) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut classes: Vec<String> = labels.to_vec();
    classes.sort();
    classes.dedup();
    let mut per_class: Vec<Vec<usize>> = classes
        .iter()
        .map(|c| {
            labels
                .iter()
                .enumerate()
                .filter(|(_, l)| *l == c)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    for (ci, rows) in per_class.iter_mut().enumerate() {
        let mut r = rng::stage_rng(seed, stage, ci as u64);
        rows.shuffle(&mut r);
    }
    // Round-robin across classes until the cap.
    let mut out = Vec::new();
    let mut depth = 0;
    while out.len() < cap.min(labels.len()) {
        let mut progressed = false;
        for rows in &per_class {
            if let Some(&i) = rows.get(depth) {
                out.push(i);
                progressed = true;
                if out.len() == cap {
                    break;
                }
            }
        }
        if !progressed {
            break;
        }
        depth += 1;
    }
    out.sort_unstable();
    out
}

pub(crate) fn base_spec(kind: ModelKind, config: &RunConfig, seed: u64) -> ModelSpec {
    let spec = ModelSpec::new(kind, seed);
    match kind {
        ModelKind::ExtraTrees | ModelKind::RandomForest => {
            spec.with("n_trees", config.n_trees as f64)
        }
        _ => spec,
    }
}

pub fn run_iteration(
    frame: &SplitFrame,
    active: &[usize],
    iteration: usize,
    prev_backmapped: Option<&BTreeMap<String, f64>>,
    config: &RunConfig,
    audit: &mut AuditLog,
) -> Result<IterationState, PipelineError> {
    if active.len() < config.p {
        return Err(PipelineError::ActiveSetTooSmall {
            active: active.len(),
            p: config.p,
        });
    }

    // Normalization fitted on the training partition only.
    let train_a = frame.train.select_columns(active);
    let val_a = frame.validation.select_columns(active);
    audit.record_fit("zscore_fit", &train_a.paths);
    let norm = zscore_fit(&train_a);
    let train_n = zscore_apply(&norm, &train_a);
    let val_n = zscore_apply(&norm, &val_a);

    let classes = train_n.classes();
    let train_labels_idx = encode(&train_n.labels, &classes);

    // Guided sampling from iteration 2 onward: previous back-mapped
    // importance as weights; uniform when absent or all-zero.
    let weights: Option<Vec<f64>> = prev_backmapped.and_then(|imp| {
        let w: Vec<f64> = train_n
            .columns
            .iter()
            .map(|name| imp.get(name).copied().unwrap_or(0.0))
            .collect();
        if w.iter().any(|&v| v > 0.0) {
            Some(w)
        } else {
            None
        }
    });
    let combos = sample_combinations(
        &train_n.columns,
        config.p,
        config.m,
        rng::derive_seed(config.seed, "sample_combinations", iteration as u64),
        weights.as_deref(),
    )?;

    audit.record_fit("combination_selection", &train_n.paths);
    let selection = score_and_select(
        &train_n.rows,
        &train_labels_idx,
        &combos.combinations,
        config.epsilon,
    )?;
    let retained: Vec<CombinationReport> = selection.retained().cloned().collect();
    if retained.is_empty() {
        return Err(crate::feature_boosting::BoostError::NoImprovingCombination.into());
    }

    audit.record_fit("pca_fit", &train_n.paths);
    let bases: Vec<PrincipalBasis> = retained
        .iter()
        .map(|r| {
            let sub: Vec<Vec<f64>> = train_n
                .rows
                .iter()
                .map(|row| r.combination.indices.iter().map(|&i| row[i]).collect())
                .collect();
            pca_fit(&sub)
        })
        .collect::<Result<_, _>>()?;
    let boosted_train = build_boosted(&train_n.rows, &train_n.labels, &retained, &bases)?;
    let boosted_val = build_boosted(&val_n.rows, &val_n.labels, &retained, &bases)?;
    let train_table = to_table(&boosted_train);

    // Train the registry, rank by 10-fold CV macro F1.
    let mut model_table = Vec::new();
    let mut best: Option<(usize, f64, f64)> = None; // (row, f1, acc)
    for (mi, &kind) in config.models.iter().enumerate() {
        let spec = base_spec(
            kind,
            config,
            rng::derive_seed(config.seed, "model_train", (iteration * 100 + mi) as u64),
        );
        audit.record_fit(&format!("cv_{}", kind.name()), &train_n.paths);
        let report = cross_validate(
            &spec,
            &train_table,
            &train_n.labels,
            config.folds,
            rng::derive_seed(config.seed, "cv_folds", iteration as u64),
        )?;
        model_table.push((
            spec,
            ModelCvRow {
                model: kind.name().to_string(),
                mean_macro_f1: report.mean_macro_f1,
                std_macro_f1: report.std_macro_f1,
                mean_accuracy: report.mean_accuracy,
                folds: report.folds,
            },
        ));
        let row = model_table.len() - 1;
        let (f1, acc) = (report.mean_macro_f1, report.mean_accuracy);
        let better = match best {
            None => true,
            Some((_, bf1, bacc)) => f1 > bf1 || (f1 == bf1 && acc > bacc),
        };
        if better {
            best = Some((row, f1, acc));
        }
    }
    let best_row = best.expect("at least one model").0;
    let best_spec = model_table[best_row].0.clone();
    let model_table: Vec<ModelCvRow> = model_table.into_iter().map(|(_, r)| r).collect();

    audit.record_fit("best_model_train", &train_n.paths);
    let best_model = train(&best_spec, &train_table, &train_n.labels)?;
    let val_preds = predict(&best_model, &to_table(&boosted_val))?;
    let validation_metrics = evaluate(&classes, &val_n.labels, &val_preds);

    // Explain the best model on training rows only.
    let bg_rows = balanced_subset(
        &boosted_train.labels,
        config.shapley_background,
        rng::derive_seed(config.seed, "shap_background", iteration as u64),
        "shap_background",
    );
    let sample_rows = balanced_subset(
        &boosted_train.labels,
        config.shapley_samples,
        rng::derive_seed(config.seed, "shap_samples", iteration as u64),
        "shap_samples",
    );
    let background: Vec<Vec<f64>> = bg_rows.iter().map(|&i| boosted_train.rows[i].clone()).collect();
    let samples: Vec<Vec<f64>> = sample_rows
        .iter()
        .map(|&i| boosted_train.rows[i].clone())
        .collect();
    let mut importance: ImportanceReport = global_importance(
        &best_model,
        &background,
        &samples,
        config.shapley_permutations,
        rng::derive_seed(config.seed, "shapley", iteration as u64),
    )?;
    let backmapped = backmap(&importance, &boosted_train.provenance)?;
    importance.backmapped = Some(backmapped.clone());

    // Prune the bottom fraction of active features by back-mapped
    // importance; features in no retained combination score 0.
    let by_name: BTreeMap<&str, f64> = backmapped
        .iter()
        .map(|f| (f.feature.as_str(), f.importance))
        .collect();
    let mut ranked: Vec<(usize, &str, f64)> = active
        .iter()
        .zip(&train_n.columns)
        .map(|(&gi, name)| (gi, name.as_str(), by_name.get(name.as_str()).copied().unwrap_or(0.0)))
        .collect();
    ranked.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap().then(a.1.cmp(b.1)));
    let mut n_prune = ((config.prune_fraction * active.len() as f64).floor() as usize).max(1);
    n_prune = n_prune.min(active.len() - config.p);
    let pruned: Vec<String> = ranked[..n_prune].iter().map(|(_, n, _)| n.to_string()).collect();
    let pruned_set: std::collections::BTreeSet<usize> =
        ranked[..n_prune].iter().map(|(gi, _, _)| *gi).collect();
    let next_active_indices: Vec<usize> = active
        .iter()
        .copied()
        .filter(|gi| !pruned_set.contains(gi))
        .collect();

    let state = IterationState {
        iteration,
        active_indices: active.to_vec(),
        active_features: train_n.columns.clone(),
        vrc_all: selection.vrc_all,
        alpha: selection.alpha,
        combination_reports: selection.reports,
        boosted_columns: boosted_train.columns.clone(),
        model_table,
        best_spec,
        validation_metrics,
        importance,
        pruned,
        next_active_indices,
    };
    Ok(state)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvergenceDecision {
    /// "feature_fixpoint", "validation_drop", or "iteration_cap".
    pub rule: String,
    pub at_iteration: usize,
}

/// Check the convergence rules against the iteration history (latest
/// iteration last). Returns `None` while the loop should continue.
pub fn converged(history: &[IterationState], config: &RunConfig) -> Option<ConvergenceDecision> {
    let last = history.last()?;
    if last.next_active_indices == last.active_indices {
        return Some(ConvergenceDecision {
            rule: "feature_fixpoint".into(),
            at_iteration: last.iteration,
        });
    }
    if history.len() >= 2 {
        let best_before = history[..history.len() - 1]
            .iter()
            .map(|s| s.validation_metrics.macro_f1)
            .fold(f64::NEG_INFINITY, f64::max);
        if last.validation_metrics.macro_f1 < best_before - config.delta {
            return Some(ConvergenceDecision {
                rule: "validation_drop".into(),
                at_iteration: last.iteration,
            });
        }
    }
    if last.iteration >= config.max_iterations {
        return Some(ConvergenceDecision {
            rule: "iteration_cap".into(),
            at_iteration: last.iteration,
        });
    }
    None
}
