//! Model specifications: kind, typed hyperparameters, seed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    ExtraTrees,
    RandomForest,
    DecisionTree,
    KNearest,
    GaussianNaiveBayes,
    LogisticRegression,
    /// Majority-class baseline.
    Dummy,
}

impl ModelKind {
    pub const REGISTRY: [ModelKind; 7] = [
        ModelKind::ExtraTrees,
        ModelKind::RandomForest,
        ModelKind::DecisionTree,
        ModelKind::KNearest,
        ModelKind::GaussianNaiveBayes,
        ModelKind::LogisticRegression,
        ModelKind::Dummy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::ExtraTrees => "extra_trees",
            ModelKind::RandomForest => "random_forest",
            ModelKind::DecisionTree => "decision_tree",
            ModelKind::KNearest => "k_nearest",
            ModelKind::GaussianNaiveBayes => "gaussian_nb",
            ModelKind::LogisticRegression => "logistic_regression",
            ModelKind::Dummy => "dummy",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::REGISTRY
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown model kind {s:?}"))
    }
}

/// A trainable model description. Hyperparameters are a name -> value map;
/// integer-valued parameters are stored as exact floats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub hyperparameters: BTreeMap<String, f64>,
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, seed: u64) -> ModelSpec {
        ModelSpec {
            kind,
            hyperparameters: BTreeMap::new(),
            seed,
        }
    }

    pub fn with(mut self, name: &str, value: f64) -> ModelSpec {
        self.hyperparameters.insert(name.to_string(), value);
        self
    }

    pub fn param(&self, name: &str, default: f64) -> f64 {
        self.hyperparameters.get(name).copied().unwrap_or(default)
    }

    pub fn param_usize(&self, name: &str, default: usize) -> usize {
        self.param(name, default as f64).round().max(0.0) as usize
    }

    /// Validate hyperparameter ranges for the kind.
    pub fn validate(&self) -> Result<(), ModelError> {
        let invalid = |name: &str, value: f64| ModelError::InvalidHyperparameter {
            kind: self.kind,
            name: name.to_string(),
            value,
        };
        let positive_int = |name: &str| -> Result<(), ModelError> {
            if let Some(&v) = self.hyperparameters.get(name) {
                if v < 1.0 || v.fract() != 0.0 {
                    return Err(invalid(name, v));
                }
            }
            Ok(())
        };
        match self.kind {
            ModelKind::ExtraTrees | ModelKind::RandomForest => {
                positive_int("n_trees")?;
                positive_int("min_leaf")?;
                positive_int("max_depth")?;
            }
            ModelKind::DecisionTree => {
                positive_int("min_leaf")?;
                positive_int("max_depth")?;
            }
            ModelKind::KNearest => positive_int("k")?,
            ModelKind::GaussianNaiveBayes | ModelKind::Dummy => {}
            ModelKind::LogisticRegression => {
                for name in ["learning_rate", "epochs", "l2"] {
                    if let Some(&v) = self.hyperparameters.get(name) {
                        if v <= 0.0 && name != "l2" || v < 0.0 {
                            return Err(invalid(name, v));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
