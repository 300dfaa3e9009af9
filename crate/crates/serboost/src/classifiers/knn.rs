//! k-nearest-neighbour classifier over Euclidean distance.

use serde::{Deserialize, Serialize};

use super::model::Table;
use super::spec::ModelSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KNearest {
    k: usize,
    rows: Vec<Vec<f64>>,
    labels: Vec<usize>,
}

impl KNearest {
    pub fn fit(spec: &ModelSpec, x: &Table, labels: &[usize]) -> KNearest {
        KNearest {
            k: spec.param_usize("k", 5).max(1),
            rows: x.rows.clone(),
            labels: labels.to_vec(),
        }
    }

    /// Probabilities are neighbour-vote fractions. Distance ties break on
    /// the lower training-row index so results do not depend on sort
    /// stability quirks.
    pub fn predict_proba(&self, x: &[Vec<f64>], n_classes: usize) -> Vec<Vec<f64>> {
        let k = self.k.min(self.rows.len());
        x.iter()
            .map(|q| {
                let mut dist: Vec<(f64, usize)> = self
                    .rows
                    .iter()
                    .enumerate()
                    .map(|(i, r)| {
                        let d2: f64 = r.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
                        (d2, i)
                    })
                    .collect();
                dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
                let mut votes = vec![0.0; n_classes];
                for &(_, i) in dist.iter().take(k) {
                    votes[self.labels[i]] += 1.0 / k as f64;
                }
                votes
            })
            .collect()
    }
}
