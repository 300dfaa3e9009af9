//! Corpus scanning: recursive WAV discovery with per-kind label parsing.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use super::label::{parse_label, parse_speaker, CorpusKind, EmotionLabel, LabelSet};
use super::DatasetError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusItem {
    pub path: PathBuf,
    pub label: EmotionLabel,
    pub speaker: Option<String>,
}

/// A scanned corpus: deterministically ordered items plus per-class counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub kind: CorpusKind,
    pub labels: LabelSet,
    pub items: Vec<CorpusItem>,
    pub class_counts: BTreeMap<String, usize>,
}

impl Corpus {
    pub fn total(&self) -> usize {
        self.items.len()
    }

    pub fn class_count(&self) -> usize {
        self.class_counts.len()
    }

    pub(crate) fn from_items(kind: CorpusKind, labels: LabelSet, items: Vec<CorpusItem>) -> Corpus {
        let mut class_counts = BTreeMap::new();
        for it in &items {
            *class_counts.entry(it.label.name.clone()).or_insert(0) += 1;
        }
        Corpus {
            kind,
            labels,
            items,
            class_counts,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkippedFile {
    pub path: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanOutcome {
    pub corpus: Corpus,
    pub skipped: Vec<SkippedFile>,
}

/// Recursively scan `root` for WAV files labeled by `kind`'s convention.
///
/// Items are ordered lexicographically by path so the result does not
/// depend on filesystem enumeration order. Files whose names fail label
/// parsing land in the skip report instead of being dropped silently.
pub fn scan_corpus(root: &Path, kind: CorpusKind) -> Result<ScanOutcome, DatasetError> {
    let mut paths: Vec<PathBuf> = Vec::new();
    let mut skipped: Vec<SkippedFile> = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| DatasetError::Io {
            path: root.display().to_string(),
            source: e.into(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let p = entry.into_path();
        let is_wav = p
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("wav"));
        if is_wav {
            paths.push(p);
        } else {
            skipped.push(SkippedFile {
                path: p,
                reason: "not a .wav file".into(),
            });
        }
    }
    paths.sort();
    skipped.sort_by(|a, b| a.path.cmp(&b.path));

    let mut parsed: Vec<(PathBuf, EmotionLabel, Option<String>)> = Vec::new();
    for p in paths {
        match parse_label(&p, kind) {
            Ok(label) => {
                let speaker = parse_speaker(&p, kind);
                parsed.push((p, label, speaker));
            }
            Err(e) => skipped.push(SkippedFile {
                path: p,
                reason: e.to_string(),
            }),
        }
    }
    if parsed.is_empty() {
        return Err(DatasetError::EmptyCorpus(root.display().to_string()));
    }

    // For GENERIC corpora the label set is the sorted set of directory
    // names; re-index labels against it.
    let labels = match LabelSet::for_kind(kind) {
        Some(set) => set,
        None => {
            let mut names: Vec<String> = parsed.iter().map(|(_, l, _)| l.name.clone()).collect();
            names.sort();
            names.dedup();
            LabelSet { names }
        }
    };
    let items: Vec<CorpusItem> = parsed
        .into_iter()
        .map(|(path, label, speaker)| {
            let label = labels
                .label(&label.name)
                .expect("parsed label must be in the corpus label set");
            CorpusItem {
                path,
                label,
                speaker,
            }
        })
        .collect();

    Ok(ScanOutcome {
        corpus: Corpus::from_items(kind, labels, items),
        skipped,
    })
}
