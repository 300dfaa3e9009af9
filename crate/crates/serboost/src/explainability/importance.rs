//! Global importance aggregation and back-mapping through PCA loadings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::shapley::{shapley_exact, shapley_permutation, EXACT_COLUMN_CAP};
use super::value::ValueFunction;
use super::ExplainError;
use crate::classifiers::TrainedModel;
use crate::feature_boosting::ColumnProvenance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceEntry {
    pub column: String,
    pub mean_abs_phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureImportance {
    pub feature: String,
    pub importance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorInfo {
    pub method: String,
    pub permutations: Option<usize>,
    pub seed: u64,
    pub background_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    /// Per class, mean |phi| per column in model-column order.
    pub per_class: BTreeMap<String, Vec<ImportanceEntry>>,
    /// Mean over classes, in model-column order.
    pub pooled: Vec<ImportanceEntry>,
    /// Column names by pooled importance descending; ties keep column
    /// order.
    pub ranking: Vec<String>,
    /// Present once `backmap` has been applied.
    pub backmapped: Option<Vec<FeatureImportance>>,
    pub estimator: EstimatorInfo,
}

impl ImportanceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Explain `samples` for every class of `model` and aggregate mean |phi|.
/// Uses exact enumeration when the column count allows it, otherwise the
/// permutation estimator.
pub fn global_importance(
    model: &TrainedModel,
    background: &[Vec<f64>],
    samples: &[Vec<f64>],
    n_permutations: usize,
    seed: u64,
) -> Result<ImportanceReport, ExplainError> {
    if samples.is_empty() {
        return Err(ExplainError::EmptyInput);
    }
    let d = model.columns.len();
    let exact = d <= EXACT_COLUMN_CAP;

    let mut per_class = BTreeMap::new();
    let mut pooled = vec![0.0; d];
    for (ci, class) in model.classes.iter().enumerate() {
        let vf = ValueFunction::new(model, ci, background)?;
        let mut mean_abs = vec![0.0; d];
        for x in samples {
            let attribution = if exact {
                shapley_exact(&vf, x)?
            } else {
                shapley_permutation(&vf, x, n_permutations, seed)?
            };
            for (k, phi) in attribution.phi.iter().enumerate() {
                mean_abs[k] += phi.abs() / samples.len() as f64;
            }
        }
        for k in 0..d {
            pooled[k] += mean_abs[k] / model.classes.len() as f64;
        }
        per_class.insert(
            class.clone(),
            model
                .columns
                .iter()
                .zip(&mean_abs)
                .map(|(c, &v)| ImportanceEntry {
                    column: c.clone(),
                    mean_abs_phi: v,
                })
                .collect(),
        );
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| pooled[b].partial_cmp(&pooled[a]).unwrap().then(a.cmp(&b)));
    let ranking = order.iter().map(|&i| model.columns[i].clone()).collect();

    Ok(ImportanceReport {
        per_class,
        pooled: model
            .columns
            .iter()
            .zip(&pooled)
            .map(|(c, &v)| ImportanceEntry {
                column: c.clone(),
                mean_abs_phi: v,
            })
            .collect(),
        ranking,
        backmapped: None,
        estimator: EstimatorInfo {
            method: if exact { "exact" } else { "permutation" }.to_string(),
            permutations: if exact { None } else { Some(n_permutations) },
            seed,
            background_size: background.len(),
        },
    })
}

/// Distribute each PC column's pooled importance over the original
/// features of its combination, weighted by |loading| normalized within
/// the component. Conserves total importance mass by construction.
/// Returns importances in descending order, ties by feature name.
pub fn backmap(
    report: &ImportanceReport,
    provenance: &BTreeMap<String, ColumnProvenance>,
) -> Result<Vec<FeatureImportance>, ExplainError> {
    let mut by_feature: BTreeMap<String, f64> = BTreeMap::new();
    for entry in &report.pooled {
        let p = provenance
            .get(&entry.column)
            .ok_or_else(|| ExplainError::MissingProvenance {
                column: entry.column.clone(),
            })?;
        let total_abs: f64 = p.loading.iter().map(|l| l.abs()).sum();
        for (name, loading) in p.combination.names.iter().zip(&p.loading) {
            let weight = if total_abs > 0.0 {
                loading.abs() / total_abs
            } else {
                // Degenerate all-zero loading: split equally.
                1.0 / p.loading.len() as f64
            };
            *by_feature.entry(name.clone()).or_insert(0.0) += entry.mean_abs_phi * weight;
        }
    }
    let mut out: Vec<FeatureImportance> = by_feature
        .into_iter()
        .map(|(feature, importance)| FeatureImportance {
            feature,
            importance,
        })
        .collect();
    out.sort_by(|a, b| {
        b.importance
            .partial_cmp(&a.importance)
            .unwrap()
            .then_with(|| a.feature.cmp(&b.feature))
    });
    Ok(out)
}
