//! Variance Ratio Criterion: between-class over within-class scatter,
//! normalized by degrees of freedom (the Calinski-Harabasz index).

use std::collections::BTreeMap;

use super::BoostError;

/// Pairwise (cascade) summation; keeps the result stable under row
/// permutations to well below 1e-12 relative.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Compute the VRC of labeled rows.
///
/// Returns `f64::INFINITY` when the within-class scatter vanishes.
/// Requires at least two classes, every class non-empty, and N > E.
pub fn vrc(rows: &[Vec<f64>], labels: &[usize]) -> Result<f64, BoostError> {
    let n = rows.len();
    debug_assert_eq!(n, labels.len());
    let mut class_rows: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        class_rows.entry(l).or_default().push(i);
    }
    let e = class_rows.len();
    if e < 2 || n <= e {
        return Err(BoostError::DegenerateClasses { n, e });
    }
    let d = rows[0].len();

    let centroid = |members: &[usize]| -> Vec<f64> {
        let mut c = vec![0.0; d];
        for j in 0..d {
            let col: Vec<f64> = members.iter().map(|&i| rows[i][j]).collect();
            c[j] = pairwise_sum(&col) / members.len() as f64;
        }
        c
    };
    let all: Vec<usize> = (0..n).collect();
    let global = centroid(&all);

    let mut between_terms = Vec::with_capacity(e);
    let mut within_terms = Vec::with_capacity(n);
    for members in class_rows.values() {
        let ce = centroid(members);
        let dist2: f64 = ce.iter().zip(&global).map(|(a, b)| (a - b) * (a - b)).sum();
        between_terms.push(members.len() as f64 * dist2);
        for &i in members {
            let w: f64 = rows[i].iter().zip(&ce).map(|(a, b)| (a - b) * (a - b)).sum();
            within_terms.push(w);
        }
    }
    let between = pairwise_sum(&between_terms) / (e - 1) as f64;
    let within = pairwise_sum(&within_terms) / (n - e) as f64;
    if within <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(between / within)
}
