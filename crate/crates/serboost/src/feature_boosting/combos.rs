//! Seeded generation of distinct p-feature combinations, uniform or
//! importance-weighted.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::BoostError;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureCombination {
    /// Sorted, distinct column indices into the active feature set.
    pub indices: Vec<usize>,
    pub names: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SampledCombinations {
    pub combinations: Vec<FeatureCombination>,
    /// Set when the requested m exceeded C(n, p) and the sampler fell back
    /// to exhaustive enumeration.
    pub clamped_to_exhaustive: bool,
}

/// C(n, p) capped at u64::MAX.
fn binomial(n: usize, p: usize) -> u128 {
    if p > n {
        return 0;
    }
    let p = p.min(n - p);
    let mut acc: u128 = 1;
    for i in 0..p {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX as u128;
        }
    }
    acc
}

fn enumerate_all(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..p).collect();
    loop {
        out.push(current.clone());
        // Next lexicographic combination.
        let mut i = p;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if current[i] != i + n - p {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        current[i] += 1;
        for j in i + 1..p {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// Weighted sampling of p distinct indices without replacement,
/// proportional to `weights` (Efraimidis-Spirakis exponential keys).
fn weighted_subset(n: usize, p: usize, weights: &[f64], r: &mut impl Rng) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize)> = (0..n)
        .map(|i| {
            let w = weights[i].max(1e-12);
            let u: f64 = r.gen_range(f64::EPSILON..1.0);
            (-u.ln() / w, i)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut idx: Vec<usize> = keyed[..p].iter().map(|(_, i)| *i).collect();
    idx.sort_unstable();
    idx
}

fn uniform_subset(n: usize, p: usize, r: &mut impl Rng) -> Vec<usize> {
    let mut chosen = BTreeSet::new();
    while chosen.len() < p {
        chosen.insert(r.gen_range(0..n));
    }
    chosen.into_iter().collect()
}

/// Draw `m` distinct sorted p-subsets of the active features.
///
/// Uniform seeded sampling by default; proportional to `guided_weights`
/// when the feedback loop provides back-mapped importances. Falls back to
/// exhaustive enumeration when C(n, p) <= m, flagging the clamp.
pub fn sample_combinations(
    feature_names: &[String],
    p: usize,
    m: usize,
    seed: u64,
    guided_weights: Option<&[f64]>,
) -> Result<SampledCombinations, BoostError> {
    let n = feature_names.len();
    if p == 0 || p > n {
        return Err(BoostError::InfeasibleRequest {
            detail: format!("p={p} outside 1..={n}"),
        });
    }
    if m == 0 {
        return Err(BoostError::InfeasibleRequest {
            detail: "m must be at least 1".into(),
        });
    }
    let total = binomial(n, p);
    let make = |index_sets: Vec<Vec<usize>>, clamped| SampledCombinations {
        combinations: index_sets
            .into_iter()
            .map(|indices| FeatureCombination {
                names: indices.iter().map(|&i| feature_names[i].clone()).collect(),
                indices,
            })
            .collect(),
        clamped_to_exhaustive: clamped,
    };

    if total <= m as u128 {
        return Ok(make(enumerate_all(n, p), total < m as u128));
    }

    let mut r = rng::stage_rng(seed, "sample_combinations", 0);
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut out = Vec::with_capacity(m);
    // Highly concentrated guided weights can make distinct subsets rare
    // even when C(n, p) is huge, so the rejection loop carries a draw
    // budget; whatever distinct set it has gathered by then is returned.
    let mut budget = 50usize.saturating_mul(m);
    while out.len() < m && budget > 0 {
        budget -= 1;
        let idx = match guided_weights {
            Some(w) => weighted_subset(n, p, w, &mut r),
            None => uniform_subset(n, p, &mut r),
        };
        if seen.insert(idx.clone()) {
            out.push(idx);
        }
    }
    Ok(make(out, false))
}
