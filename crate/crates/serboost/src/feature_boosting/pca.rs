//! Per-combination PCA via cyclic Jacobi eigendecomposition of the sample
//! covariance, with a fixed sign convention for reproducible bases.

use serde::{Deserialize, Serialize};

use super::BoostError;

/// Cumulative explained-variance level that fixes the retained rank.
pub const EV_RETAIN_PERCENT: f64 = 95.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrincipalBasis {
    /// p x p orthonormal matrix; column j is the j-th principal component.
    pub eigenvectors: Vec<Vec<f64>>,
    /// Descending, clamped at 0.
    pub eigenvalues: Vec<f64>,
    /// Percent of variance per component; sums to 100.
    pub explained: Vec<f64>,
    /// Number of components kept: smallest r with cumulative explained
    /// variance >= 95%, floored at 2 (1 when p = 1).
    pub retained_rank: usize,
    /// Column means used for centering.
    pub means: Vec<f64>,
}

impl PrincipalBasis {
    pub fn dim(&self) -> usize {
        self.means.len()
    }

    /// Column j of the eigenvector matrix (the loading vector of PC j).
    pub fn loading(&self, j: usize) -> Vec<f64> {
        (0..self.dim()).map(|k| self.eigenvectors[k][j]).collect()
    }
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations, run until the
/// off-diagonal Frobenius norm falls below 1e-12 (relative to the matrix
/// scale).
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale: f64 = a
        .iter()
        .flatten()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(1e-300);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off < 1e-12 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let eigenvalues: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    (eigenvalues, v)
}

/// Fit a principal basis on an N x p submatrix (training rows only).
pub fn pca_fit(x_sub: &[Vec<f64>]) -> Result<PrincipalBasis, BoostError> {
    let n = x_sub.len();
    if n < 2 {
        return Err(BoostError::DegenerateInput { rows: n });
    }
    let p = x_sub[0].len();
    let means: Vec<f64> = (0..p)
        .map(|j| x_sub.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    // Sample covariance.
    let mut cov = vec![vec![0.0; p]; p];
    for r in x_sub {
        for i in 0..p {
            let di = r[i] - means[i];
            for (j, cj) in cov[i].iter_mut().enumerate().skip(i) {
                *cj += di * (r[j] - means[j]);
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            cov[i][j] = cov[j][i];
        }
        for j in i..p {
            cov[i][j] /= (n - 1) as f64;
        }
    }
    for i in 0..p {
        for j in 0..i {
            cov[i][j] = cov[j][i];
        }
    }

    let (raw_values, raw_vectors) = jacobi_eigen(cov);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| raw_values[b].partial_cmp(&raw_values[a]).unwrap());

    let mut eigenvalues = Vec::with_capacity(p);
    let mut eigenvectors = vec![vec![0.0; p]; p];
    for (new_j, &old_j) in order.iter().enumerate() {
        let lambda = raw_values[old_j];
        eigenvalues.push(if lambda < 0.0 { 0.0 } else { lambda });
        // Sign convention: the largest-|entry| coordinate is positive.
        let col: Vec<f64> = (0..p).map(|k| raw_vectors[k][old_j]).collect();
        let dominant = col
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .map(|(k, _)| k)
            .unwrap_or(0);
        let flip = if col[dominant] < 0.0 { -1.0 } else { 1.0 };
        for k in 0..p {
            eigenvectors[k][new_j] = flip * col[k];
        }
    }

    let total: f64 = eigenvalues.iter().sum();
    let explained: Vec<f64> = if total > 0.0 {
        eigenvalues.iter().map(|l| l / total * 100.0).collect()
    } else {
        // Constant data: all the (zero) variance sits in the first axis.
        let mut ev = vec![0.0; p];
        ev[0] = 100.0;
        ev
    };

    let floor = if p == 1 { 1 } else { 2 };
    let mut cumulative = 0.0;
    let mut rank = p;
    for (j, e) in explained.iter().enumerate() {
        cumulative += e;
        if cumulative >= EV_RETAIN_PERCENT {
            rank = j + 1;
            break;
        }
    }
    let retained_rank = rank.max(floor).min(p);

    Ok(PrincipalBasis {
        eigenvectors,
        eigenvalues,
        explained,
        retained_rank,
        means,
    })
}

/// Project rows onto the first `retained_rank` components.
pub fn project(basis: &PrincipalBasis, x_sub: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, BoostError> {
    let p = basis.dim();
    if x_sub.iter().any(|r| r.len() != p) {
        return Err(BoostError::ShapeMismatch {
            expected: p,
            got: x_sub.first().map_or(0, |r| r.len()),
        });
    }
    Ok(x_sub
        .iter()
        .map(|r| {
            (0..basis.retained_rank)
                .map(|j| {
                    (0..p)
                        .map(|k| (r[k] - basis.means[k]) * basis.eigenvectors[k][j])
                        .sum()
                })
                .collect()
        })
        .collect())
}
