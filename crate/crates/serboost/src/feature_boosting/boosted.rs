//! Assembly of the boosted dataset: principal components of the retained
//! combinations, with full provenance per column.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::combos::FeatureCombination;
use super::pca::{project, PrincipalBasis};
use super::select::CombinationReport;
use super::BoostError;

/// Where a boosted column came from: combination, component index, and
/// the loading vector tying it back to original features.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnProvenance {
    /// 1-based retained-combination number (sigma-descending order).
    pub combination_number: usize,
    pub combination: FeatureCombination,
    /// 1-based component index within the combination.
    pub component: usize,
    pub loading: Vec<f64>,
    pub eigenvalue: f64,
    pub explained_percent: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoostedDataset {
    /// Column names `PC_{i}_{j}`.
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    pub provenance: BTreeMap<String, ColumnProvenance>,
}

impl BoostedDataset {
    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }
}

pub fn column_name(combination_number: usize, component: usize) -> String {
    format!("PC_{combination_number}_{component}")
}

/// Build the boosted dataset from retained combination reports (sigma
/// descending) and their fitted bases. `bases[k]` must correspond to
/// `retained[k]`. Column order is combinations by sigma descending, then
/// components ascending.
pub fn build_boosted(
    rows: &[Vec<f64>],
    labels: &[String],
    retained: &[CombinationReport],
    bases: &[PrincipalBasis],
) -> Result<BoostedDataset, BoostError> {
    if retained.is_empty() {
        return Err(BoostError::EmptySelection);
    }
    debug_assert_eq!(retained.len(), bases.len());

    let mut columns = Vec::new();
    let mut provenance = BTreeMap::new();
    let mut out_rows: Vec<Vec<f64>> = vec![Vec::new(); rows.len()];
    for (k, (report, basis)) in retained.iter().zip(bases).enumerate() {
        let combination_number = k + 1;
        let sub: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| report.combination.indices.iter().map(|&i| r[i]).collect())
            .collect();
        let projected = project(basis, &sub)?;
        for j in 0..basis.retained_rank {
            let name = column_name(combination_number, j + 1);
            provenance.insert(
                name.clone(),
                ColumnProvenance {
                    combination_number,
                    combination: report.combination.clone(),
                    component: j + 1,
                    loading: basis.loading(j),
                    eigenvalue: basis.eigenvalues[j],
                    explained_percent: basis.explained[j],
                },
            );
            columns.push(name);
        }
        for (row, pc) in out_rows.iter_mut().zip(&projected) {
            row.extend_from_slice(pc);
        }
    }

    Ok(BoostedDataset {
        columns,
        rows: out_rows,
        labels: labels.to_vec(),
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature_boosting::pca::pca_fit;
    use rand::Rng;

    fn report(indices: &[usize], sigma: f64) -> CombinationReport {
        CombinationReport {
            combination: FeatureCombination {
                indices: indices.to_vec(),
                names: indices.iter().map(|i| format!("f{i}")).collect(),
            },
            vrc_combo: sigma,
            vrc_all: 0.0,
            sigma,
            retained: true,
        }
    }

    fn random_rows(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = crate::rng::stage_rng(seed, "boosted_rows", 0);
        (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect())
            .collect()
    }

    #[test]
    fn naming_rule_and_column_count() {
        let rows = random_rows(30, 6, 1);
        let labels = vec!["x".to_string(); 30];
        let retained = vec![report(&[0, 1], 5.0), report(&[2, 3, 4], 3.0)];
        let mut b1 = pca_fit(
            &rows.iter().map(|r| vec![r[0], r[1]]).collect::<Vec<_>>(),
        )
        .unwrap();
        b1.retained_rank = 2;
        let mut b2 = pca_fit(
            &rows.iter().map(|r| vec![r[2], r[3], r[4]]).collect::<Vec<_>>(),
        )
        .unwrap();
        b2.retained_rank = 3;
        let boosted = build_boosted(&rows, &labels, &retained, &[b1, b2]).unwrap();
        assert_eq!(
            boosted.columns,
            vec!["PC_1_1", "PC_1_2", "PC_2_1", "PC_2_2", "PC_2_3"]
        );
        assert_eq!(boosted.rows[0].len(), 5);
    }

    #[test]
    fn provenance_lookup() {
        let rows = random_rows(20, 5, 2);
        let labels = vec!["x".to_string(); 20];
        let retained = vec![report(&[0, 1], 5.0), report(&[2, 4], 3.0)];
        let b1 = pca_fit(&rows.iter().map(|r| vec![r[0], r[1]]).collect::<Vec<_>>()).unwrap();
        let b2 = pca_fit(&rows.iter().map(|r| vec![r[2], r[4]]).collect::<Vec<_>>()).unwrap();
        let expected_loading = b2.loading(0);
        let boosted = build_boosted(&rows, &labels, &retained, &[b1, b2]).unwrap();
        let p = &boosted.provenance["PC_2_1"];
        assert_eq!(p.combination_number, 2);
        assert_eq!(p.component, 1);
        assert_eq!(p.combination.indices, vec![2, 4]);
        assert_eq!(p.loading, expected_loading);
        // Every column is traceable.
        for c in &boosted.columns {
            assert!(boosted.provenance.contains_key(c));
        }
    }

    #[test]
    fn empty_selection_rejected() {
        let rows = random_rows(10, 3, 3);
        let labels = vec!["x".to_string(); 10];
        assert!(matches!(
            build_boosted(&rows, &labels, &[], &[]),
            Err(BoostError::EmptySelection)
        ));
    }
}
