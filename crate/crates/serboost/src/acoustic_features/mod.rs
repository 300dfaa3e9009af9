//! The 90-dimensional acoustic feature set: short-time descriptor series
//! summarized by statistics, voice-quality scalars, and z-score
//! normalization.

mod dsp;
mod extract;
mod manifest;
mod matrix;
mod mel;
mod pitch;
mod stats;
mod voice;

pub use dsp::{fft_complex, fft_magnitudes, frame_count, frame_signal, spectrum, FFT_LEN};
pub use extract::{extract_feature_vector, FeatureVector, MIN_DURATION_S};
pub use manifest::{FeatureManifest, ManifestEntry, MANIFEST_VERSION, N_FEATURES};
pub use matrix::{zscore_apply, zscore_fit, FeatureMatrix, Normalization};
pub use mel::{log_mel_energies, mel_flux, mfcc, N_FILTERS, N_MFCC};
pub use pitch::{pitch_track, PitchTrack, VOICING_THRESHOLD};
pub use stats::{summarize, Summary, STAT_NAMES};
pub use voice::{jitter, shimmer};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("signal too short: {have} samples, need {need}")]
    SignalTooShort { have: usize, need: usize },
    #[error("empty descriptor series")]
    EmptySeries,
    #[error("csv error: {0}")]
    Csv(String),
    #[error("feature matrix does not match manifest {expected}")]
    ManifestMismatch { expected: String },
}
