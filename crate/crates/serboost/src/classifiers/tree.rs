//! Decision-tree machinery shared by the single tree, random forest, and
//! extremely randomized trees.

use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        /// Class counts of the training rows that reached this leaf.
        counts: Vec<f64>,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<Node>,
        right: Box<Node>,
    },
}

impl Node {
    pub fn leaf_counts<'a>(&'a self, row: &[f64]) -> &'a [f64] {
        match self {
            Node::Leaf { counts } => counts,
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if row[*feature] <= *threshold {
                    left.leaf_counts(row)
                } else {
                    right.leaf_counts(row)
                }
            }
        }
    }

    /// True when no split references `feature`.
    pub fn ignores_feature(&self, feature: usize) -> bool {
        match self {
            Node::Leaf { .. } => true,
            Node::Split {
                feature: f,
                left,
                right,
                ..
            } => *f != feature && left.ignores_feature(feature) && right.ignores_feature(feature),
        }
    }
}

fn gini(counts: &[f64]) -> f64 {
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    1.0 - counts.iter().map(|c| (c / total).powi(2)).sum::<f64>()
}

/// Weighted Gini impurity of a candidate split.
fn split_impurity(left: &[f64], right: &[f64]) -> f64 {
    let nl: f64 = left.iter().sum();
    let nr: f64 = right.iter().sum();
    let n = nl + nr;
    (nl * gini(left) + nr * gini(right)) / n
}

fn class_counts(rows: &[usize], labels: &[usize], n_classes: usize) -> Vec<f64> {
    let mut counts = vec![0.0; n_classes];
    for &i in rows {
        counts[labels[i]] += 1.0;
    }
    counts
}

fn is_pure(counts: &[f64]) -> bool {
    counts.iter().filter(|&&c| c > 0.0).count() <= 1
}

pub struct TreeConfig {
    pub min_leaf: usize,
    pub max_depth: usize,
}

/// How split candidates are generated at each node.
pub enum SplitStrategy<'a, R: Rng> {
    /// Scan all features, all midpoints between consecutive distinct
    /// values (CART).
    Exhaustive,
    /// Best of `k` features (drawn without replacement), each scanned
    /// exhaustively (random forest).
    FeatureSubset { k: usize, rng: &'a mut R },
    /// `k` fully random candidates: random feature, cut point uniform in
    /// the node's value range (extremely randomized trees).
    RandomCuts { k: usize, rng: &'a mut R },
}

struct Candidate {
    feature: usize,
    threshold: f64,
    impurity: f64,
}

fn best_exhaustive_for_feature(
    x: &[Vec<f64>],
    labels: &[usize],
    rows: &[usize],
    n_classes: usize,
    feature: usize,
) -> Option<Candidate> {
    let mut values: Vec<(f64, usize)> = rows.iter().map(|&i| (x[i][feature], labels[i])).collect();
    values.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let total = class_counts(rows, labels, n_classes);
    let mut left = vec![0.0; n_classes];
    let mut best: Option<Candidate> = None;
    for w in 0..values.len() - 1 {
        left[values[w].1] += 1.0;
        if values[w].0 == values[w + 1].0 {
            continue;
        }
        let right: Vec<f64> = total.iter().zip(&left).map(|(t, l)| t - l).collect();
        let impurity = split_impurity(&left, &right);
        let threshold = (values[w].0 + values[w + 1].0) / 2.0;
        let better = best.as_ref().is_none_or(|b| impurity < b.impurity - 1e-15);
        if better {
            best = Some(Candidate {
                feature,
                threshold,
                impurity,
            });
        }
    }
    best
}

fn node_range(x: &[Vec<f64>], rows: &[usize], feature: usize) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &i in rows {
        lo = lo.min(x[i][feature]);
        hi = hi.max(x[i][feature]);
    }
    (lo, hi)
}

/// Recursively grow a tree on the given rows.
pub fn grow<R: Rng>(
    x: &[Vec<f64>],
    labels: &[usize],
    rows: &[usize],
    n_classes: usize,
    config: &TreeConfig,
    strategy: &mut SplitStrategy<'_, R>,
    depth: usize,
) -> Node {
    let counts = class_counts(rows, labels, n_classes);
    if is_pure(&counts) || rows.len() < 2 * config.min_leaf.max(1) || depth >= config.max_depth {
        return Node::Leaf { counts };
    }

    let best = match strategy {
        SplitStrategy::Exhaustive => {
            let d = x[0].len();
            (0..d)
                .filter_map(|f| best_exhaustive_for_feature(x, labels, rows, n_classes, f))
                .min_by(|a, b| {
                    a.impurity
                        .partial_cmp(&b.impurity)
                        .unwrap()
                        .then(a.feature.cmp(&b.feature))
                })
        }
        SplitStrategy::FeatureSubset { k, rng } => {
            let d = x[0].len();
            let k = (*k).min(d).max(1);
            let mut features: Vec<usize> = (0..d).collect();
            // Partial Fisher-Yates for the first k picks.
            for i in 0..k {
                let j = rng.gen_range(i..d);
                features.swap(i, j);
            }
            features.truncate(k);
            features.sort_unstable();
            features
                .into_iter()
                .filter_map(|f| best_exhaustive_for_feature(x, labels, rows, n_classes, f))
                .min_by(|a, b| {
                    a.impurity
                        .partial_cmp(&b.impurity)
                        .unwrap()
                        .then(a.feature.cmp(&b.feature))
                })
        }
        SplitStrategy::RandomCuts { k, rng } => {
            let d = x[0].len();
            let mut best: Option<Candidate> = None;
            for _ in 0..*k {
                let feature = rng.gen_range(0..d);
                let (lo, hi) = node_range(x, rows, feature);
                if hi <= lo {
                    continue;
                }
                let threshold = rng.gen_range(lo..hi);
                let mut left = vec![0.0; n_classes];
                let mut right = vec![0.0; n_classes];
                for &i in rows {
                    if x[i][feature] <= threshold {
                        left[labels[i]] += 1.0;
                    } else {
                        right[labels[i]] += 1.0;
                    }
                }
                if left.iter().sum::<f64>() == 0.0 || right.iter().sum::<f64>() == 0.0 {
                    continue;
                }
                let impurity = split_impurity(&left, &right);
                if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                    best = Some(Candidate {
                        feature,
                        threshold,
                        impurity,
                    });
                }
            }
            best
        }
    };

    let Some(candidate) = best else {
        return Node::Leaf { counts };
    };

    let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
        .iter()
        .partition(|&&i| x[i][candidate.feature] <= candidate.threshold);
    if left_rows.len() < config.min_leaf
        || right_rows.len() < config.min_leaf
        || left_rows.is_empty()
        || right_rows.is_empty()
    {
        return Node::Leaf { counts };
    }

    Node::Split {
        feature: candidate.feature,
        threshold: candidate.threshold,
        left: Box::new(grow(
            x, labels, &left_rows, n_classes, config, strategy, depth + 1,
        )),
        right: Box::new(grow(
            x, labels, &right_rows, n_classes, config, strategy, depth + 1,
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_node_is_leaf() {
        let x = vec![vec![0.0], vec![1.0]];
        let labels = vec![0, 0];
        let node = grow::<rand_chacha::ChaCha8Rng>(
            &x,
            &labels,
            &[0, 1],
            1,
            &TreeConfig {
                min_leaf: 1,
                max_depth: usize::MAX,
            },
            &mut SplitStrategy::Exhaustive,
            0,
        );
        assert!(matches!(node, Node::Leaf { .. }));
    }

    #[test]
    fn separable_data_splits_cleanly() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let labels: Vec<usize> = (0..10).map(|i| usize::from(i >= 5)).collect();
        let rows: Vec<usize> = (0..10).collect();
        let node = grow::<rand_chacha::ChaCha8Rng>(
            &x,
            &labels,
            &rows,
            2,
            &TreeConfig {
                min_leaf: 1,
                max_depth: usize::MAX,
            },
            &mut SplitStrategy::Exhaustive,
            0,
        );
        match &node {
            Node::Split { feature, threshold, .. } => {
                assert_eq!(*feature, 0);
                assert_eq!(*threshold, 4.5);
            }
            Node::Leaf { .. } => panic!("expected a split"),
        }
        for i in 0..10 {
            let counts = node.leaf_counts(&x[i]);
            let predicted = counts
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            assert_eq!(predicted, labels[i]);
        }
    }

    #[test]
    fn ignores_feature_detection() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 0.0]).collect();
        let labels: Vec<usize> = (0..10).map(|i| usize::from(i >= 5)).collect();
        let rows: Vec<usize> = (0..10).collect();
        let node = grow::<rand_chacha::ChaCha8Rng>(
            &x,
            &labels,
            &rows,
            2,
            &TreeConfig {
                min_leaf: 1,
                max_depth: usize::MAX,
            },
            &mut SplitStrategy::Exhaustive,
            0,
        );
        assert!(node.ignores_feature(1));
        assert!(!node.ignores_feature(0));
    }
}
