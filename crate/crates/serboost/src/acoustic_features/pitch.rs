//! Fundamental-frequency tracking by normalized autocorrelation.

use crate::dataset_io::CANONICAL_RATE;

pub const PITCH_FRAME_MS: usize = 40;
pub const PITCH_HOP_MS: usize = 10;
pub const F0_MIN: f64 = 50.0;
pub const F0_MAX: f64 = 400.0;
pub const VOICING_THRESHOLD: f64 = 0.3;

/// Per-frame pitch track. Unvoiced frames carry 0 Hz.
#[derive(Debug, Clone)]
pub struct PitchTrack {
    /// F0 in Hz per frame, 0 for unvoiced frames.
    pub f0: Vec<f64>,
    /// Best normalized autocorrelation peak per frame, in [0, 1].
    pub peak: Vec<f64>,
}

impl PitchTrack {
    pub fn voiced_values(&self) -> Vec<f64> {
        self.f0.iter().copied().filter(|&f| f > 0.0).collect()
    }

    pub fn voiced_ratio(&self) -> f64 {
        if self.f0.is_empty() {
            0.0
        } else {
            self.f0.iter().filter(|&&f| f > 0.0).count() as f64 / self.f0.len() as f64
        }
    }

    /// Mean autocorrelation peak over voiced frames; 0 when none.
    pub fn harmonicity(&self) -> f64 {
        let voiced: Vec<f64> = self
            .f0
            .iter()
            .zip(&self.peak)
            .filter(|(f, _)| **f > 0.0)
            .map(|(_, p)| *p)
            .collect();
        if voiced.is_empty() {
            0.0
        } else {
            voiced.iter().sum::<f64>() / voiced.len() as f64
        }
    }
}

/// Normalized autocorrelation r(lag) = sum x[n]x[n+lag] / sum x[n]^2.
fn normalized_autocorr(frame: &[f64], lag: usize) -> f64 {
    let energy: f64 = frame.iter().map(|v| v * v).sum();
    if energy < 1e-12 {
        return 0.0;
    }
    let num: f64 = (0..frame.len() - lag).map(|n| frame[n] * frame[n + lag]).sum();
    num / energy
}

/// Track F0 over un-windowed 40 ms frames hopped by 10 ms. A frame is
/// voiced when its best normalized autocorrelation peak in the 50-400 Hz
/// lag range reaches 0.3; unvoiced frames emit 0.
pub fn pitch_track(samples: &[f64]) -> PitchTrack {
    let sr = f64::from(CANONICAL_RATE);
    let frame_len = PITCH_FRAME_MS * CANONICAL_RATE as usize / 1000;
    let hop = PITCH_HOP_MS * CANONICAL_RATE as usize / 1000;
    let lag_min = (sr / F0_MAX).floor() as usize;
    let lag_max = (sr / F0_MIN).ceil() as usize;

    let mut f0 = Vec::new();
    let mut peak = Vec::new();
    if samples.len() >= frame_len {
        let n_frames = (samples.len() - frame_len) / hop + 1;
        for i in 0..n_frames {
            let frame = &samples[i * hop..i * hop + frame_len];
            let mut best_lag = 0usize;
            let mut best_val = 0.0f64;
            for lag in lag_min..=lag_max.min(frame_len - 1) {
                let r = normalized_autocorr(frame, lag);
                if r > best_val {
                    best_val = r;
                    best_lag = lag;
                }
            }
            if best_val >= VOICING_THRESHOLD && best_lag > 0 {
                f0.push(sr / best_lag as f64);
                peak.push(best_val);
            } else {
                f0.push(0.0);
                peak.push(best_val);
            }
        }
    }
    PitchTrack { f0, peak }
}
