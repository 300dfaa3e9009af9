//! Multinomial logistic regression trained by full-batch gradient descent.

use serde::{Deserialize, Serialize};

use super::spec::ModelSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Logistic {
    /// weights[class][feature].
    weights: Vec<Vec<f64>>,
    /// bias[class].
    bias: Vec<f64>,
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| (l - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / z).collect()
}

impl Logistic {
    /// Zero-initialized weights make training deterministic without any
    /// RNG; L2 applies to weights only, not the bias.
    pub fn fit(spec: &ModelSpec, rows: &[Vec<f64>], labels: &[usize], n_classes: usize) -> Logistic {
        let lr = spec.param("learning_rate", 0.1);
        let epochs = spec.param_usize("epochs", 500);
        let l2 = spec.param("l2", 1e-4);
        let n = rows.len();
        let d = rows[0].len();
        let mut weights = vec![vec![0.0; d]; n_classes];
        let mut bias = vec![0.0; n_classes];

        for _ in 0..epochs {
            let mut grad_w = vec![vec![0.0; d]; n_classes];
            let mut grad_b = vec![0.0; n_classes];
            for (r, &l) in rows.iter().zip(labels) {
                let logits: Vec<f64> = (0..n_classes)
                    .map(|c| {
                        bias[c] + weights[c].iter().zip(r).map(|(w, x)| w * x).sum::<f64>()
                    })
                    .collect();
                let p = softmax(&logits);
                for c in 0..n_classes {
                    let err = p[c] - if c == l { 1.0 } else { 0.0 };
                    grad_b[c] += err;
                    for j in 0..d {
                        grad_w[c][j] += err * r[j];
                    }
                }
            }
            for c in 0..n_classes {
                bias[c] -= lr * grad_b[c] / n as f64;
                for j in 0..d {
                    weights[c][j] -= lr * (grad_w[c][j] / n as f64 + l2 * weights[c][j]);
                }
            }
        }
        Logistic { weights, bias }
    }

    pub fn predict_proba(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        x.iter()
            .map(|r| {
                let logits: Vec<f64> = self
                    .weights
                    .iter()
                    .zip(&self.bias)
                    .map(|(w, b)| b + w.iter().zip(r).map(|(wi, xi)| wi * xi).sum::<f64>())
                    .collect();
                softmax(&logits)
            })
            .collect()
    }
}
