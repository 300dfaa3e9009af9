//! Deterministic stratified 80/10/10 splitting.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::corpus::{Corpus, CorpusItem};
use super::DatasetError;
use crate::rng;

pub const TRAIN_FRACTION: f64 = 0.8;
pub const VAL_FRACTION: f64 = 0.1;
pub const TEST_FRACTION: f64 = 0.1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitCorpus {
    pub train: Corpus,
    pub validation: Corpus,
    pub test: Corpus,
    pub fractions: (f64, f64, f64),
    pub seed: u64,
}

/// JSON split manifest, stable key order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitManifest {
    pub seed: u64,
    pub fractions: (f64, f64, f64),
    pub items: Vec<ManifestItem>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestItem {
    pub path: String,
    pub label: String,
    pub partition: String,
}

impl SplitCorpus {
    pub fn manifest(&self) -> SplitManifest {
        let mut items = Vec::new();
        for (corpus, partition) in [
            (&self.train, "train"),
            (&self.validation, "validation"),
            (&self.test, "test"),
        ] {
            for it in &corpus.items {
                items.push(ManifestItem {
                    path: it.path.display().to_string(),
                    label: it.label.name.clone(),
                    partition: partition.to_string(),
                });
            }
        }
        items.sort_by(|a, b| a.path.cmp(&b.path));
        SplitManifest {
            seed: self.seed,
            fractions: self.fractions,
            items,
        }
    }
}

/// Per-class partition counts by largest-remainder rounding, leftover to
/// the largest fractional remainder with ties resolved train > val > test.
pub(crate) fn partition_counts(n: usize) -> (usize, usize, usize) {
    let quotas = [
        TRAIN_FRACTION * n as f64,
        VAL_FRACTION * n as f64,
        TEST_FRACTION * n as f64,
    ];
    let mut counts = [0usize; 3];
    let mut remainders = [0f64; 3];
    for i in 0..3 {
        counts[i] = quotas[i].floor() as usize;
        remainders[i] = quotas[i] - quotas[i].floor();
    }
    let mut leftover = n - counts.iter().sum::<usize>();
    while leftover > 0 {
        let mut best = 0;
        for i in 1..3 {
            if remainders[i] > remainders[best] + 1e-12 {
                best = i;
            }
        }
        counts[best] += 1;
        remainders[best] = -1.0;
        leftover -= 1;
    }
    (counts[0], counts[1], counts[2])
}

/// Split a corpus 80/10/10 per class with a seeded shuffle inside each
/// class. The same seed always produces the same assignment.
pub fn stratified_split(c: &Corpus, seed: u64) -> Result<SplitCorpus, DatasetError> {
    for (label, &count) in &c.class_counts {
        if count < 3 {
            return Err(DatasetError::ClassTooSmall {
                label: label.clone(),
                count,
            });
        }
    }

    let mut train: Vec<CorpusItem> = Vec::new();
    let mut val: Vec<CorpusItem> = Vec::new();
    let mut test: Vec<CorpusItem> = Vec::new();
    for (class_idx, class_name) in c.labels.names.iter().enumerate() {
        let mut members: Vec<CorpusItem> = c
            .items
            .iter()
            .filter(|it| &it.label.name == class_name)
            .cloned()
            .collect();
        if members.is_empty() {
            continue;
        }
        let mut r = rng::stage_rng(seed, "stratified_split", class_idx as u64);
        members.shuffle(&mut r);
        let (n_train, n_val, _n_test) = partition_counts(members.len());
        for (i, item) in members.into_iter().enumerate() {
            if i < n_train {
                train.push(item);
            } else if i < n_train + n_val {
                val.push(item);
            } else {
                test.push(item);
            }
        }
    }
    let sort = |v: &mut Vec<CorpusItem>| v.sort_by(|a, b| a.path.cmp(&b.path));
    sort(&mut train);
    sort(&mut val);
    sort(&mut test);

    Ok(SplitCorpus {
        train: Corpus::from_items(c.kind, c.labels.clone(), train),
        validation: Corpus::from_items(c.kind, c.labels.clone(), val),
        test: Corpus::from_items(c.kind, c.labels.clone(), test),
        fractions: (TRAIN_FRACTION, VAL_FRACTION, TEST_FRACTION),
        seed,
    })
}
