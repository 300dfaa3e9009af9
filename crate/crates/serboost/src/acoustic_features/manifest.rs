//! The ordered 90-feature manifest.
//!
//! Construction rule: 9 frame-level descriptor series, each summarized by
//! 9 statistics (81 features), plus 9 per-recording scalars. The mean of
//! the mel-frequency-flux series is named plain `mff`; every other series
//! feature is `{stat}_{series}`.

use serde::{Deserialize, Serialize};

use super::stats::STAT_NAMES;

pub const MANIFEST_VERSION: &str = "serboost-features-v1";
pub const N_FEATURES: usize = 90;

/// Series short names, in manifest order.
pub const SERIES_NAMES: [&str; 9] = [
    "fft", "pitch", "energy", "zcr", "centroid", "rolloff", "mff", "mfcc", "dmfcc",
];

/// Per-recording scalar names, in manifest order.
pub const SCALAR_NAMES: [&str; 9] = [
    "shimmer",
    "jitter",
    "duration_s",
    "voiced_ratio",
    "speech_rate_proxy",
    "pause_ratio",
    "hnr_proxy",
    "peak_amplitude",
    "dynamic_range_db",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub name: String,
    /// Series short name, or "scalar".
    pub descriptor: String,
    /// Statistic name, or "value" for scalars.
    pub statistic: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureManifest {
    pub version: String,
    pub entries: Vec<ManifestEntry>,
    /// Caveats about descriptor choices the source material leaves open.
    pub notes: Vec<String>,
}

impl FeatureManifest {
    /// The canonical 90-entry manifest.
    pub fn standard() -> FeatureManifest {
        let mut entries = Vec::with_capacity(N_FEATURES);
        for series in SERIES_NAMES {
            for stat in STAT_NAMES {
                let name = if series == "mff" && stat == "mean" {
                    "mff".to_string()
                } else {
                    format!("{stat}_{series}")
                };
                entries.push(ManifestEntry {
                    name,
                    descriptor: series.to_string(),
                    statistic: stat.to_string(),
                });
            }
        }
        for scalar in SCALAR_NAMES {
            entries.push(ManifestEntry {
                name: scalar.to_string(),
                descriptor: "scalar".to_string(),
                statistic: "value".to_string(),
            });
        }
        debug_assert_eq!(entries.len(), N_FEATURES);
        FeatureManifest {
            version: MANIFEST_VERSION.to_string(),
            entries,
            notes: vec![
                "rhythm descriptors speech_rate_proxy and pause_ratio are energy-envelope stand-ins".into(),
            ],
        }
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.iter().map(|e| e.name.clone()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_ninety_unique_names() {
        let m = FeatureManifest::standard();
        assert_eq!(m.entries.len(), 90);
        let mut names = m.names();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 90);
    }

    #[test]
    fn reference_names_resolve() {
        let m = FeatureManifest::standard();
        for name in [
            "q1_fft",
            "mff",
            "median_fft",
            "q1_pitch",
            "q3_pitch",
            "mean_fft",
            "minv_mfcc",
            "shimmer",
            "mean_pitch",
            "skew_mfcc",
        ] {
            let hits = m.entries.iter().filter(|e| e.name == name).count();
            assert_eq!(hits, 1, "feature {name}");
        }
    }
}
