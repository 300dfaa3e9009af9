//! Combination scoring and retention: sigma improvements against the full
//! active set and the mean-of-positive threshold.

use serde::{Deserialize, Serialize};

use super::combos::FeatureCombination;
use super::vrc::vrc;
use super::BoostError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CombinationReport {
    pub combination: FeatureCombination,
    pub vrc_combo: f64,
    pub vrc_all: f64,
    pub sigma: f64,
    pub retained: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionOutcome {
    /// All scored combinations, retained ones first by sigma descending,
    /// then the rest by sigma descending.
    pub reports: Vec<CombinationReport>,
    pub alpha: f64,
    pub vrc_all: f64,
}

impl SelectionOutcome {
    pub fn retained(&self) -> impl Iterator<Item = &CombinationReport> {
        self.reports.iter().filter(|r| r.retained)
    }
}

/// Score every combination by its VRC improvement over the full active
/// set and retain those at or above `alpha = mean(nonnegative sigmas) +
/// epsilon`.
///
/// Fails with `NoImprovingCombination` when no combination has a
/// non-negative sigma, and with `NonFiniteReference` when the full-set
/// VRC is the infinite sentinel.
pub fn score_and_select(
    rows: &[Vec<f64>],
    labels: &[usize],
    combos: &[FeatureCombination],
    epsilon: f64,
) -> Result<SelectionOutcome, BoostError> {
    let vrc_all = vrc(rows, labels)?;
    if !vrc_all.is_finite() {
        return Err(BoostError::NonFiniteReference);
    }

    let mut reports: Vec<CombinationReport> = combos
        .iter()
        .map(|combo| {
            let sub: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| combo.indices.iter().map(|&i| r[i]).collect())
                .collect();
            let vrc_combo = vrc(&sub, labels)?;
            Ok(CombinationReport {
                combination: combo.clone(),
                vrc_combo,
                vrc_all,
                sigma: vrc_combo - vrc_all,
                retained: false,
            })
        })
        .collect::<Result<_, BoostError>>()?;

    let positives: Vec<f64> = reports
        .iter()
        .map(|r| r.sigma)
        .filter(|&s| s >= 0.0)
        .collect();
    if positives.is_empty() {
        return Err(BoostError::NoImprovingCombination);
    }
    let alpha = positives.iter().sum::<f64>() / positives.len() as f64 + epsilon;
    for r in &mut reports {
        r.retained = r.sigma >= alpha;
    }
    reports.sort_by(|a, b| {
        b.retained
            .cmp(&a.retained)
            .then(b.sigma.partial_cmp(&a.sigma).unwrap_or(std::cmp::Ordering::Equal))
            .then(a.combination.indices.cmp(&b.combination.indices))
    });
    Ok(SelectionOutcome {
        reports,
        alpha,
        vrc_all,
    })
}
