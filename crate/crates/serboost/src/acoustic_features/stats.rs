//! Summary statistics over frame-level descriptor series.

use super::FeatureError;

pub const STAT_NAMES: [&str; 9] = [
    "mean", "median", "std", "minv", "maxv", "q1", "q3", "skew", "kurt",
];

/// The nine per-series statistics, in [`STAT_NAMES`] order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub q1: f64,
    pub q3: f64,
    pub skew: f64,
    pub kurtosis: f64,
}

impl Summary {
    pub fn zeros() -> Summary {
        Summary {
            mean: 0.0,
            median: 0.0,
            std: 0.0,
            min: 0.0,
            max: 0.0,
            q1: 0.0,
            q3: 0.0,
            skew: 0.0,
            kurtosis: 0.0,
        }
    }

    pub fn as_array(&self) -> [f64; 9] {
        [
            self.mean,
            self.median,
            self.std,
            self.min,
            self.max,
            self.q1,
            self.q3,
            self.skew,
            self.kurtosis,
        ]
    }
}

/// Quantile by linear interpolation between closest ranks on sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Compute mean, median, population std, min, max, quartiles, and
/// moment-based skew/excess-kurtosis. Skew and kurtosis are 0 when the
/// population std is below 1e-12.
pub fn summarize(values: &[f64]) -> Result<Summary, FeatureError> {
    if values.is_empty() {
        return Err(FeatureError::EmptySeries);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = m2.sqrt();

    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (skew, kurtosis) = if std < 1e-12 {
        (0.0, 0.0)
    } else {
        let m3 = values.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
        let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
        (m3 / std.powi(3), m4 / (m2 * m2) - 3.0)
    };

    Ok(Summary {
        mean,
        median: quantile(&sorted, 0.5),
        std,
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        q1: quantile(&sorted, 0.25),
        q3: quantile(&sorted, 0.75),
        skew,
        kurtosis,
    })
}
