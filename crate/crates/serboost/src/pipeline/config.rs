//! Run configuration: flat key = value file, validation, and hashing.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifiers::ModelKind;
use crate::dataset_io::CorpusKind;

use super::PipelineError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Corpus root directory; unused by tabular entry points.
    pub root: PathBuf,
    pub kind: CorpusKind,
    /// Output directory; the run directory is created inside it.
    pub out_dir: PathBuf,
    pub seed: u64,
    /// Combination size.
    pub p: usize,
    /// Number of combinations sampled per iteration.
    pub m: usize,
    /// Retention-threshold offset.
    pub epsilon: f64,
    pub folds: usize,
    /// Registry subset to train each iteration.
    pub models: Vec<ModelKind>,
    /// Hyperparameter grid for the final grid search, applied to the
    /// winning model kind.
    pub grid: BTreeMap<String, Vec<f64>>,
    /// Trees per forest for the tree ensembles.
    pub n_trees: usize,
    pub shapley_permutations: usize,
    /// Background rows for the value function (class-balanced cap).
    pub shapley_background: usize,
    /// Training rows explained per iteration (cap).
    pub shapley_samples: usize,
    /// Fraction of active features pruned per iteration.
    pub prune_fraction: f64,
    pub max_iterations: usize,
    /// Validation-F1 degradation tolerance for convergence.
    pub delta: f64,
    /// Seeded repeats of the whole evaluation.
    pub repeat: usize,
    /// Decode failures tolerated during extraction.
    pub max_skip: usize,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            root: PathBuf::new(),
            kind: CorpusKind::Generic,
            out_dir: PathBuf::from("runs"),
            seed: 0,
            p: 10,
            m: 500,
            epsilon: 0.0,
            folds: 10,
            models: ModelKind::REGISTRY.to_vec(),
            grid: BTreeMap::new(),
            n_trees: 300,
            shapley_permutations: 200,
            shapley_background: 100,
            shapley_samples: 50,
            prune_fraction: 0.10,
            max_iterations: 10,
            delta: 0.005,
            repeat: 10,
            max_skip: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let fail = |msg: String| Err(PipelineError::InvalidConfig(msg));
        if !(self.prune_fraction > 0.0 && self.prune_fraction < 1.0) {
            return fail(format!(
                "prune_fraction must be in (0, 1), got {}",
                self.prune_fraction
            ));
        }
        if self.max_iterations < 1 {
            return fail("max_iterations must be at least 1".into());
        }
        if self.delta < 0.0 {
            return fail(format!("delta must be non-negative, got {}", self.delta));
        }
        if self.p < 1 {
            return fail("p must be at least 1".into());
        }
        if self.m < 1 {
            return fail("m must be at least 1".into());
        }
        if self.folds < 2 {
            return fail("folds must be at least 2".into());
        }
        if self.repeat < 1 {
            return fail("repeat must be at least 1".into());
        }
        if self.models.is_empty() {
            return fail("models must name at least one registry entry".into());
        }
        if self.n_trees < 1 {
            return fail("n_trees must be at least 1".into());
        }
        if self.shapley_permutations < 10 {
            return fail("shapley_permutations must be at least 10".into());
        }
        if self.shapley_background < 1 || self.shapley_samples < 1 {
            return fail("shapley_background and shapley_samples must be at least 1".into());
        }
        Ok(())
    }

    /// Parse a flat `key = value` file ('#' comments, blank lines
    /// allowed). Unknown keys are an error naming the key.
    pub fn from_file(path: &Path) -> Result<RunConfig, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        RunConfig::from_str_content(&text)
    }

    pub fn from_str_content(text: &str) -> Result<RunConfig, PipelineError> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(PipelineError::InvalidConfig(format!(
                    "line {}: expected key = value, got {raw:?}",
                    lineno + 1
                )));
            };
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Apply one key/value override (shared by the file parser and CLI
    /// flags).
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), PipelineError> {
        let bad = |detail: String| PipelineError::InvalidConfig(detail);
        let parse_f64 = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| bad(format!("{key}: expected a number, got {v:?}")))
        };
        let parse_usize = |v: &str| {
            v.parse::<usize>()
                .map_err(|_| bad(format!("{key}: expected an integer, got {v:?}")))
        };
        match key {
            "root" => self.root = PathBuf::from(value),
            "kind" => {
                self.kind = value
                    .parse()
                    .map_err(|e: String| PipelineError::InvalidConfig(format!("kind: {e}")))?
            }
            "out_dir" => self.out_dir = PathBuf::from(value),
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| bad(format!("seed: expected an integer, got {value:?}")))?
            }
            "p" => self.p = parse_usize(value)?,
            "m" => self.m = parse_usize(value)?,
            "epsilon" => self.epsilon = parse_f64(value)?,
            "folds" => self.folds = parse_usize(value)?,
            "models" => {
                self.models = value
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse()
                            .map_err(|e: String| PipelineError::InvalidConfig(format!("models: {e}")))
                    })
                    .collect::<Result<_, _>>()?
            }
            "n_trees" => self.n_trees = parse_usize(value)?,
            "shapley_permutations" => self.shapley_permutations = parse_usize(value)?,
            "shapley_background" => self.shapley_background = parse_usize(value)?,
            "shapley_samples" => self.shapley_samples = parse_usize(value)?,
            "prune_fraction" => self.prune_fraction = parse_f64(value)?,
            "max_iterations" => self.max_iterations = parse_usize(value)?,
            "delta" => self.delta = parse_f64(value)?,
            "repeat" => self.repeat = parse_usize(value)?,
            "max_skip" => self.max_skip = parse_usize(value)?,
            k if k.starts_with("grid.") => {
                let param = k.trim_start_matches("grid.").to_string();
                let values = value
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|_| bad(format!("{key}: bad number {s:?}")))
                    })
                    .collect::<Result<Vec<f64>, _>>()?;
                if values.is_empty() {
                    return Err(bad(format!("{key}: empty value list")));
                }
                self.grid.insert(param, values);
            }
            other => return Err(PipelineError::UnknownConfigKey(other.to_string())),
        }
        Ok(())
    }
}

/// Stable 64-bit hash of the canonical JSON form; names run directories.
pub fn config_hash(cfg: &RunConfig) -> u64 {
    let canonical = serde_json::to_string(cfg).expect("config serialization cannot fail");
    // FNV-1a, matching the seed-derivation primitive.
    let mut h: u64 = 0xcbf29ce484222325;
    for b in canonical.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
