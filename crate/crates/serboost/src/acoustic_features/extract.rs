//! Per-recording feature extraction: frame-level descriptor series
//! summarized by statistics, plus voice-quality scalars.

use super::dsp::{frame_raw, frame_signal, spectrum};
use super::manifest::{FeatureManifest, N_FEATURES};
use super::mel::{deltas, log_mel_energies, mel_flux, mfcc};
use super::pitch::pitch_track;
use super::stats::{summarize, Summary};
use super::voice;
use super::FeatureError;
use crate::dataset_io::{Waveform, CANONICAL_RATE};

/// Minimum canonical duration: one 25 ms frame for every series plus two
/// frames of flux comfortably fit in 0.2 s.
pub const MIN_DURATION_S: f64 = 0.2;

#[derive(Debug, Clone)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub source: String,
    pub label: String,
}

fn frame_samples(ms: usize) -> usize {
    ms * CANONICAL_RATE as usize / 1000
}

fn spectral_centroid(mag: &[f64]) -> f64 {
    let total: f64 = mag.iter().sum();
    if total < 1e-12 {
        return 0.0;
    }
    let hz_per_bin = f64::from(CANONICAL_RATE) / 512.0;
    mag.iter()
        .enumerate()
        .map(|(k, &m)| k as f64 * hz_per_bin * m)
        .sum::<f64>()
        / total
}

fn spectral_rolloff(mag: &[f64], fraction: f64) -> f64 {
    let total: f64 = mag.iter().map(|m| m * m).sum();
    if total < 1e-12 {
        return 0.0;
    }
    let hz_per_bin = f64::from(CANONICAL_RATE) / 512.0;
    let mut acc = 0.0;
    for (k, &m) in mag.iter().enumerate() {
        acc += m * m;
        if acc >= fraction * total {
            return k as f64 * hz_per_bin;
        }
    }
    (mag.len() - 1) as f64 * hz_per_bin
}

fn zero_crossing_rate(frame: &[f64]) -> f64 {
    if frame.len() < 2 {
        return 0.0;
    }
    let crossings = frame
        .windows(2)
        .filter(|w| (w[0] >= 0.0) != (w[1] >= 0.0))
        .count();
    crossings as f64 / (frame.len() - 1) as f64
}

fn summarize_or_zero(values: &[f64]) -> Summary {
    if values.is_empty() {
        Summary::zeros()
    } else {
        summarize(values).expect("non-empty series")
    }
}

/// Extract the 90-value feature vector in manifest order.
///
/// The waveform must be canonical (16 kHz mono) and at least 0.2 s long.
/// All outputs are finite; degenerate inputs (silence, fully unvoiced
/// audio) follow the documented imputation-to-zero rules.
pub fn extract_feature_vector(
    w: &Waveform,
    manifest: &FeatureManifest,
) -> Result<Vec<f64>, FeatureError> {
    debug_assert_eq!(w.sample_rate, CANONICAL_RATE);
    debug_assert_eq!(w.channels, 1);
    if w.duration_s() < MIN_DURATION_S {
        return Err(FeatureError::SignalTooShort {
            have: w.samples.len(),
            need: (MIN_DURATION_S * f64::from(CANONICAL_RATE)) as usize,
        });
    }
    let frame_len = frame_samples(super::dsp::FRAME_MS);
    let hop = frame_samples(super::dsp::HOP_MS);

    // Windowed frames drive the spectral series; raw frames drive energy
    // and zero crossings.
    let windowed = frame_signal(&w.samples, frame_len, hop)?;
    let raw = frame_raw(&w.samples, frame_len, hop)?;

    let spectra: Vec<Vec<f64>> = windowed.iter().map(|f| spectrum(f)).collect();
    let fft_series: Vec<f64> = spectra
        .iter()
        .map(|mag| mag.iter().sum::<f64>() / mag.len() as f64)
        .collect();
    let centroid_series: Vec<f64> = spectra.iter().map(|m| spectral_centroid(m)).collect();
    let rolloff_series: Vec<f64> = spectra.iter().map(|m| spectral_rolloff(m, 0.85)).collect();

    // Frame power, not its root: the energy statistics then scale with the
    // square of a uniform gain.
    let energy_series: Vec<f64> = raw
        .iter()
        .map(|f| f.iter().map(|v| v * v).sum::<f64>() / f.len() as f64)
        .collect();
    let rms_envelope: Vec<f64> = energy_series.iter().map(|e| e.sqrt()).collect();
    let zcr_series: Vec<f64> = raw.iter().map(|f| zero_crossing_rate(f)).collect();

    let logmel = log_mel_energies(&windowed);
    let mff_series = mel_flux(&logmel)?;
    let mfcc_frames = mfcc(&windowed);
    let dmfcc_frames = deltas(&mfcc_frames);
    let mfcc_flat: Vec<f64> = mfcc_frames.iter().flatten().copied().collect();
    let dmfcc_flat: Vec<f64> = dmfcc_frames.iter().flatten().copied().collect();

    let track = pitch_track(&w.samples);
    let pitch_series = track.voiced_values();

    let series: [&[f64]; 9] = [
        &fft_series,
        &pitch_series,
        &energy_series,
        &zcr_series,
        &centroid_series,
        &rolloff_series,
        &mff_series,
        &mfcc_flat,
        &dmfcc_flat,
    ];

    let mut values = Vec::with_capacity(N_FEATURES);
    for s in series {
        values.extend_from_slice(&summarize_or_zero(s).as_array());
    }
    let peak_amplitude = w.samples.iter().cloned().fold(0.0f64, |a, v| a.max(v.abs()));
    values.push(voice::shimmer(&w.samples, &track));
    values.push(voice::jitter(&w.samples, &track));
    values.push(w.duration_s());
    values.push(track.voiced_ratio());
    values.push(voice::speech_rate_proxy(&rms_envelope, w.duration_s()));
    values.push(voice::pause_ratio(&rms_envelope));
    values.push(track.harmonicity());
    values.push(peak_amplitude);
    values.push(voice::dynamic_range_db(&rms_envelope));

    debug_assert_eq!(values.len(), manifest.entries.len());
    for v in &mut values {
        if !v.is_finite() {
            *v = 0.0;
        }
    }
    Ok(values)
}
