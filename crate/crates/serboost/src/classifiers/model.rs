//! Training, probability prediction, and versioned model serialization.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bayes::GaussianNb;
use super::knn::KNearest;
use super::logistic::Logistic;
use super::spec::{ModelKind, ModelSpec};
use super::tree::{grow, Node, SplitStrategy, TreeConfig};
use super::ModelError;
use crate::rng;

/// A named-column numeric table; the common input type for every model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<f64>>) -> Table {
        Table { columns, rows }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FittedParams {
    Forest { trees: Vec<Node> },
    Tree { root: Node },
    Knn(KNearest),
    Gnb(GaussianNb),
    Logistic(Logistic),
    Dummy { class_frequencies: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub spec: ModelSpec,
    /// Sorted distinct training labels; probability column order.
    pub classes: Vec<String>,
    pub columns: Vec<String>,
    pub params: FittedParams,
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct VersionedModel {
    version: u32,
    model: TrainedModel,
}

impl TrainedModel {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&VersionedModel {
            version: MODEL_FORMAT_VERSION,
            model: self.clone(),
        })
        .expect("model serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<TrainedModel, ModelError> {
        let v: VersionedModel =
            serde_json::from_str(s).map_err(|e| ModelError::Serialization(e.to_string()))?;
        if v.version != MODEL_FORMAT_VERSION {
            return Err(ModelError::Serialization(format!(
                "unsupported model format version {}",
                v.version
            )));
        }
        Ok(v.model)
    }
}

fn encode_labels(y: &[String]) -> (Vec<String>, Vec<usize>) {
    let mut classes = y.to_vec();
    classes.sort();
    classes.dedup();
    let encoded = y
        .iter()
        .map(|l| classes.iter().position(|c| c == l).unwrap())
        .collect();
    (classes, encoded)
}

fn check_finite(x: &Table) -> Result<(), ModelError> {
    for (row, r) in x.rows.iter().enumerate() {
        for (col, v) in r.iter().enumerate() {
            if !v.is_finite() {
                return Err(ModelError::NonFiniteInput { row, col });
            }
        }
    }
    Ok(())
}

fn tree_config(spec: &ModelSpec) -> TreeConfig {
    TreeConfig {
        min_leaf: spec.param_usize("min_leaf", 1),
        max_depth: spec.param_usize("max_depth", 10_000),
    }
}

/// Fit a model. Deterministic given (spec, x, y): every tree derives its
/// own seed from the spec seed and tree index, so results are independent
/// of scheduling and training-row order (for the non-bootstrap models).
pub fn train(spec: &ModelSpec, x: &Table, y: &[String]) -> Result<TrainedModel, ModelError> {
    spec.validate()?;
    if x.rows.is_empty() {
        return Err(ModelError::EmptyInput);
    }
    check_finite(x)?;
    let (classes, labels) = encode_labels(y);
    if classes.len() < 2 {
        return Err(ModelError::SingleClass);
    }
    let n_classes = classes.len();
    let n = x.n_rows();
    let d = x.columns.len();
    let all_rows: Vec<usize> = (0..n).collect();

    let params = match spec.kind {
        ModelKind::DecisionTree => {
            let config = tree_config(spec);
            let root = grow::<rand_chacha::ChaCha8Rng>(
                &x.rows,
                &labels,
                &all_rows,
                n_classes,
                &config,
                &mut SplitStrategy::Exhaustive,
                0,
            );
            FittedParams::Tree { root }
        }
        ModelKind::ExtraTrees => {
            let n_trees = spec.param_usize("n_trees", 300);
            let k = spec.param_usize("k_candidates", (d as f64).sqrt().ceil() as usize);
            let config = tree_config(spec);
            let trees: Vec<Node> = (0..n_trees)
                .into_par_iter()
                .map(|t| {
                    let mut r = rng::stage_rng(spec.seed, "extra_trees", t as u64);
                    grow(
                        &x.rows,
                        &labels,
                        &all_rows,
                        n_classes,
                        &config,
                        &mut SplitStrategy::RandomCuts { k, rng: &mut r },
                        0,
                    )
                })
                .collect();
            FittedParams::Forest { trees }
        }
        ModelKind::RandomForest => {
            let n_trees = spec.param_usize("n_trees", 300);
            let k = spec.param_usize("k_candidates", (d as f64).sqrt().ceil() as usize);
            let config = tree_config(spec);
            let trees: Vec<Node> = (0..n_trees)
                .into_par_iter()
                .map(|t| {
                    let mut r = rng::stage_rng(spec.seed, "random_forest", t as u64);
                    use rand::Rng;
                    let bootstrap: Vec<usize> = (0..n).map(|_| r.gen_range(0..n)).collect();
                    grow(
                        &x.rows,
                        &labels,
                        &bootstrap,
                        n_classes,
                        &config,
                        &mut SplitStrategy::FeatureSubset { k, rng: &mut r },
                        0,
                    )
                })
                .collect();
            FittedParams::Forest { trees }
        }
        ModelKind::KNearest => FittedParams::Knn(KNearest::fit(spec, x, &labels)),
        ModelKind::GaussianNaiveBayes => FittedParams::Gnb(GaussianNb::fit(&x.rows, &labels, n_classes)),
        ModelKind::LogisticRegression => {
            FittedParams::Logistic(Logistic::fit(spec, &x.rows, &labels, n_classes))
        }
        ModelKind::Dummy => {
            let mut freq = vec![0.0; n_classes];
            for &l in &labels {
                freq[l] += 1.0 / n as f64;
            }
            FittedParams::Dummy {
                class_frequencies: freq,
            }
        }
    };

    Ok(TrainedModel {
        spec: spec.clone(),
        classes,
        columns: x.columns.clone(),
        params,
    })
}

fn normalize_row(counts: &[f64]) -> Vec<f64> {
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        vec![1.0 / counts.len() as f64; counts.len()]
    } else {
        counts.iter().map(|c| c / total).collect()
    }
}

/// One-hot of the majority class of a leaf-count vector, ties to the
/// lowest class index.
fn majority_vote(counts: &[f64]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

/// Per-class probabilities, rows summing to 1. Input columns must match
/// training columns exactly.
pub fn predict_proba(model: &TrainedModel, x: &Table) -> Result<Vec<Vec<f64>>, ModelError> {
    if x.columns != model.columns {
        return Err(ModelError::SchemaMismatch {
            detail: format!(
                "expected columns {:?}, got {:?}",
                model.columns, x.columns
            ),
        });
    }
    let n_classes = model.classes.len();
    let proba = match &model.params {
        FittedParams::Tree { root } => x
            .rows
            .iter()
            .map(|r| normalize_row(root.leaf_counts(r)))
            .collect(),
        FittedParams::Forest { trees } => x
            .rows
            .iter()
            .map(|r| {
                // Majority vote per tree, averaged over the forest.
                let mut votes = vec![0.0; n_classes];
                for tree in trees {
                    votes[majority_vote(tree.leaf_counts(r))] += 1.0;
                }
                normalize_row(&votes)
            })
            .collect(),
        FittedParams::Knn(knn) => knn.predict_proba(&x.rows, n_classes),
        FittedParams::Gnb(gnb) => gnb.predict_proba(&x.rows),
        FittedParams::Logistic(lr) => lr.predict_proba(&x.rows),
        FittedParams::Dummy { class_frequencies } => x
            .rows
            .iter()
            .map(|_| class_frequencies.clone())
            .collect(),
    };
    Ok(proba)
}

/// Argmax class names; probability ties resolve to the lowest class index.
pub fn predict(model: &TrainedModel, x: &Table) -> Result<Vec<String>, ModelError> {
    Ok(predict_proba(model, x)?
        .into_iter()
        .map(|p| {
            let mut best = 0;
            for (i, &v) in p.iter().enumerate() {
                if v > p[best] {
                    best = i;
                }
            }
            model.classes[best].clone()
        })
        .collect())
}
