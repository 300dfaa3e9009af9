//! Mel filterbank, MFCCs, and mel-frequency flux.

use super::dsp::{spectrum, FFT_LEN};
use super::FeatureError;
use crate::dataset_io::CANONICAL_RATE;

pub const N_FILTERS: usize = 26;
pub const N_MFCC: usize = 13;
pub const LOG_FLOOR: f64 = 1e-10;

fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular mel filterbank over FFT bins 0..=256, spanning 0-8000 Hz.
pub fn mel_filterbank() -> Vec<Vec<f64>> {
    let sr = f64::from(CANONICAL_RATE);
    let low = hz_to_mel(0.0);
    let high = hz_to_mel(sr / 2.0);
    let points: Vec<f64> = (0..N_FILTERS + 2)
        .map(|i| {
            let mel = low + (high - low) * i as f64 / (N_FILTERS + 1) as f64;
            mel_to_hz(mel) * FFT_LEN as f64 / sr
        })
        .collect();
    let n_bins = FFT_LEN / 2 + 1;
    (0..N_FILTERS)
        .map(|m| {
            let (l, c, r) = (points[m], points[m + 1], points[m + 2]);
            (0..n_bins)
                .map(|k| {
                    let k = k as f64;
                    if k < l || k > r {
                        0.0
                    } else if k <= c {
                        if c > l { (k - l) / (c - l) } else { 0.0 }
                    } else if r > c {
                        (r - k) / (r - c)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Log mel-band energies for each windowed frame.
pub fn log_mel_energies(frames: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let bank = mel_filterbank();
    frames
        .iter()
        .map(|frame| {
            let mag = spectrum(frame);
            let power: Vec<f64> = mag.iter().map(|m| m * m).collect();
            bank.iter()
                .map(|filt| {
                    let e: f64 = filt.iter().zip(&power).map(|(f, p)| f * p).sum();
                    e.max(LOG_FLOOR).ln()
                })
                .collect()
        })
        .collect()
}

/// Orthonormal DCT-II of a vector, first `n_out` coefficients.
pub fn dct2_orthonormal(x: &[f64], n_out: usize) -> Vec<f64> {
    let n = x.len() as f64;
    (0..n_out)
        .map(|k| {
            let scale = if k == 0 { (1.0 / n).sqrt() } else { (2.0 / n).sqrt() };
            let sum: f64 = x
                .iter()
                .enumerate()
                .map(|(i, &v)| v * (std::f64::consts::PI * k as f64 * (2 * i + 1) as f64 / (2.0 * n)).cos())
                .sum();
            scale * sum
        })
        .collect()
}

/// 13 MFCCs per frame from 26 log mel energies.
pub fn mfcc(frames: &[Vec<f64>]) -> Vec<Vec<f64>> {
    log_mel_energies(frames)
        .iter()
        .map(|logmel| dct2_orthonormal(logmel, N_MFCC))
        .collect()
}

/// First-order coefficient deltas: d[t] = c[t] - c[t-1], first frame 0.
pub fn deltas(coeffs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    coeffs
        .iter()
        .enumerate()
        .map(|(t, c)| {
            if t == 0 {
                vec![0.0; c.len()]
            } else {
                c.iter().zip(&coeffs[t - 1]).map(|(a, b)| a - b).collect()
            }
        })
        .collect()
}

/// Per-frame Euclidean distance between consecutive log-mel vectors; the
/// first frame's flux is 0.
pub fn mel_flux(log_mel: &[Vec<f64>]) -> Result<Vec<f64>, FeatureError> {
    if log_mel.len() < 2 {
        return Err(FeatureError::SignalTooShort {
            have: log_mel.len(),
            need: 2,
        });
    }
    Ok(log_mel
        .iter()
        .enumerate()
        .map(|(t, v)| {
            if t == 0 {
                0.0
            } else {
                v.iter()
                    .zip(&log_mel[t - 1])
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            }
        })
        .collect())
}
