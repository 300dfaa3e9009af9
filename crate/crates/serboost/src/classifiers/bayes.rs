//! Gaussian naive Bayes with per-class diagonal covariances.

use serde::{Deserialize, Serialize};

/// Variance floor: keeps log-densities finite on constant features.
const VAR_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    /// log prior per class.
    log_priors: Vec<f64>,
    /// means[class][feature].
    means: Vec<Vec<f64>>,
    /// variances[class][feature], floored.
    variances: Vec<Vec<f64>>,
}

impl GaussianNb {
    pub fn fit(rows: &[Vec<f64>], labels: &[usize], n_classes: usize) -> GaussianNb {
        let n = rows.len();
        let d = rows[0].len();
        let mut counts = vec![0usize; n_classes];
        let mut means = vec![vec![0.0; d]; n_classes];
        for (r, &l) in rows.iter().zip(labels) {
            counts[l] += 1;
            for j in 0..d {
                means[l][j] += r[j];
            }
        }
        for c in 0..n_classes {
            for j in 0..d {
                means[c][j] /= counts[c].max(1) as f64;
            }
        }
        let mut variances = vec![vec![0.0; d]; n_classes];
        for (r, &l) in rows.iter().zip(labels) {
            for j in 0..d {
                let diff = r[j] - means[l][j];
                variances[l][j] += diff * diff;
            }
        }
        for c in 0..n_classes {
            for j in 0..d {
                variances[c][j] = (variances[c][j] / counts[c].max(1) as f64).max(VAR_FLOOR);
            }
        }
        let log_priors = counts
            .iter()
            .map(|&c| ((c.max(1)) as f64 / n as f64).ln())
            .collect();
        GaussianNb {
            log_priors,
            means,
            variances,
        }
    }

    pub fn predict_proba(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let n_classes = self.log_priors.len();
        x.iter()
            .map(|r| {
                let log_post: Vec<f64> = (0..n_classes)
                    .map(|c| {
                        let mut lp = self.log_priors[c];
                        for (j, &v) in r.iter().enumerate() {
                            let var = self.variances[c][j];
                            let diff = v - self.means[c][j];
                            lp += -0.5 * ((2.0 * std::f64::consts::PI * var).ln()
                                + diff * diff / var);
                        }
                        lp
                    })
                    .collect();
                // Log-sum-exp normalization.
                let max = log_post.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let exps: Vec<f64> = log_post.iter().map(|&l| (l - max).exp()).collect();
                let z: f64 = exps.iter().sum();
                exps.into_iter().map(|e| e / z).collect()
            })
            .collect()
    }
}
