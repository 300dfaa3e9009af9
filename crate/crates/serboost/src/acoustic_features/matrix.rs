//! The N x 90 feature table with labels, CSV persistence, and z-score
//! normalization fitted on the training partition only.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::manifest::FeatureManifest;
use super::FeatureError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub manifest_version: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    pub paths: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(manifest: &FeatureManifest) -> FeatureMatrix {
        FeatureMatrix {
            manifest_version: manifest.version.clone(),
            columns: manifest.names(),
            rows: Vec::new(),
            labels: Vec::new(),
            paths: Vec::new(),
        }
    }

    pub fn push(&mut self, values: Vec<f64>, label: String, path: String) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(values);
        self.labels.push(label);
        self.paths.push(path);
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    /// Distinct labels in sorted order.
    pub fn classes(&self) -> Vec<String> {
        let mut c = self.labels.clone();
        c.sort();
        c.dedup();
        c
    }

    /// Restrict to a subset of columns by index.
    pub fn select_columns(&self, indices: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            manifest_version: self.manifest_version.clone(),
            columns: indices.iter().map(|&i| self.columns[i].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| indices.iter().map(|&i| r[i]).collect())
                .collect(),
            labels: self.labels.clone(),
            paths: self.paths.clone(),
        }
    }

    /// Serialize to CSV with a `label` and `path` column appended; floats
    /// carry 17 significant digits so a round trip is exact.
    pub fn to_csv(&self, path: &Path) -> Result<(), FeatureError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| FeatureError::Csv(e.to_string()))?;
        let mut header = self.columns.clone();
        header.push("label".into());
        header.push("path".into());
        w.write_record(&header).map_err(|e| FeatureError::Csv(e.to_string()))?;
        for ((row, label), src) in self.rows.iter().zip(&self.labels).zip(&self.paths) {
            let mut rec: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            rec.push(label.clone());
            rec.push(src.clone());
            w.write_record(&rec).map_err(|e| FeatureError::Csv(e.to_string()))?;
        }
        w.flush().map_err(|e| FeatureError::Csv(e.to_string()))?;
        Ok(())
    }

    /// Load a CSV written by [`Self::to_csv`]. The manifest version must
    /// match the expected manifest.
    pub fn from_csv(path: &Path, manifest: &FeatureManifest) -> Result<FeatureMatrix, FeatureError> {
        let mut r = csv::Reader::from_path(path).map_err(|e| FeatureError::Csv(e.to_string()))?;
        let header: Vec<String> = r
            .headers()
            .map_err(|e| FeatureError::Csv(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let expected = manifest.names();
        if header.len() != expected.len() + 2
            || header[..expected.len()] != expected[..]
            || header[expected.len()] != "label"
            || header[expected.len() + 1] != "path"
        {
            return Err(FeatureError::ManifestMismatch {
                expected: manifest.version.clone(),
            });
        }
        let mut out = FeatureMatrix::new(manifest);
        for rec in r.records() {
            let rec = rec.map_err(|e| FeatureError::Csv(e.to_string()))?;
            let values: Result<Vec<f64>, _> = rec
                .iter()
                .take(expected.len())
                .map(|s| s.parse::<f64>().map_err(|e| FeatureError::Csv(e.to_string())))
                .collect();
            out.push(
                values?,
                rec[expected.len()].to_string(),
                rec[expected.len() + 1].to_string(),
            );
        }
        Ok(out)
    }
}

/// Fit per-column mean and population std on the training matrix.
/// Near-constant columns (std < 1e-12) get divisor 1.
pub fn zscore_fit(train: &FeatureMatrix) -> Normalization {
    let n = train.n_rows() as f64;
    let d = train.n_cols();
    let mut means = vec![0.0; d];
    let mut stds = vec![0.0; d];
    for j in 0..d {
        let mean = train.rows.iter().map(|r| r[j]).sum::<f64>() / n;
        let var = train.rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
        means[j] = mean;
        let std = var.sqrt();
        stds[j] = if std < 1e-12 { 1.0 } else { std };
    }
    Normalization { means, stds }
}

/// Apply fitted normalization to any matrix with the same columns.
pub fn zscore_apply(params: &Normalization, m: &FeatureMatrix) -> FeatureMatrix {
    let mut out = m.clone();
    for row in &mut out.rows {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (*v - params.means[j]) / params.stds[j];
        }
    }
    out
}
