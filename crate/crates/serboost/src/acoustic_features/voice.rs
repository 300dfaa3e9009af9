//! Per-recording voice-quality scalars: shimmer, jitter, and the
//! rhythm/energy descriptors.

use super::pitch::PitchTrack;
use crate::dataset_io::CANONICAL_RATE;

/// Per-cycle peak amplitudes and peak positions, segmented at the median
/// voiced pitch period. Empty when fewer than two cycles are detectable.
pub(crate) fn cycle_peaks(samples: &[f64], track: &PitchTrack) -> (Vec<f64>, Vec<usize>) {
    let mut voiced = track.voiced_values();
    if voiced.is_empty() {
        return (Vec::new(), Vec::new());
    }
    voiced.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_f0 = voiced[voiced.len() / 2];
    let period = (f64::from(CANONICAL_RATE) / median_f0).round() as usize;
    if period == 0 || samples.len() < 2 * period {
        return (Vec::new(), Vec::new());
    }
    let mut amps = Vec::new();
    let mut positions = Vec::new();
    let mut start = 0usize;
    while start + period <= samples.len() {
        let cycle = &samples[start..start + period];
        // Positive peak per cycle: the |max| would be ambiguous for
        // odd-symmetric waveforms where peak and trough magnitudes tie.
        let (off, amp) = cycle
            .iter()
            .enumerate()
            .map(|(i, &v)| (i, v.max(0.0)))
            .fold((0, 0.0f64), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        amps.push(amp);
        positions.push(start + off);
        start += period;
    }
    (amps, positions)
}

/// Local shimmer: mean(|A_{t+1} - A_t|) / mean(A_t) over consecutive
/// pitch-cycle peak amplitudes. Returns 0 when undefined.
pub fn shimmer(samples: &[f64], track: &PitchTrack) -> f64 {
    let (amps, _) = cycle_peaks(samples, track);
    relative_consecutive_variation(&amps)
}

/// Local jitter: the period analog of shimmer, over consecutive
/// peak-to-peak spacings. Returns 0 when undefined.
pub fn jitter(samples: &[f64], track: &PitchTrack) -> f64 {
    let (_, positions) = cycle_peaks(samples, track);
    if positions.len() < 3 {
        return 0.0;
    }
    let periods: Vec<f64> = positions.windows(2).map(|w| (w[1] - w[0]) as f64).collect();
    relative_consecutive_variation(&periods)
}

fn relative_consecutive_variation(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mean: f64 = values.iter().sum::<f64>() / values.len() as f64;
    if mean < 1e-12 {
        return 0.0;
    }
    let diff: f64 = values.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>()
        / (values.len() - 1) as f64;
    diff / mean
}

/// Energy peaks per second: strict local maxima of the frame RMS envelope
/// above 10% of the envelope peak.
pub fn speech_rate_proxy(rms: &[f64], duration_s: f64) -> f64 {
    if rms.len() < 3 || duration_s <= 0.0 {
        return 0.0;
    }
    let peak = rms.iter().cloned().fold(0.0f64, f64::max);
    if peak < 1e-10 {
        return 0.0;
    }
    let threshold = 0.1 * peak;
    let count = rms
        .windows(3)
        .filter(|w| w[1] > w[0] && w[1] > w[2] && w[1] > threshold)
        .count();
    count as f64 / duration_s
}

/// Fraction of frames with RMS below 5% of the envelope peak. Silence
/// (zero peak) counts as all pause.
pub fn pause_ratio(rms: &[f64]) -> f64 {
    if rms.is_empty() {
        return 0.0;
    }
    let peak = rms.iter().cloned().fold(0.0f64, f64::max);
    if peak < 1e-10 {
        return 1.0;
    }
    let threshold = 0.05 * peak;
    rms.iter().filter(|&&e| e < threshold).count() as f64 / rms.len() as f64
}

/// dB span between the loudest frame and the 10th-percentile frame RMS.
pub fn dynamic_range_db(rms: &[f64]) -> f64 {
    if rms.is_empty() {
        return 0.0;
    }
    let peak = rms.iter().cloned().fold(0.0f64, f64::max);
    if peak < 1e-10 {
        return 0.0;
    }
    let mut sorted = rms.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let floor = sorted[(0.1 * (sorted.len() - 1) as f64).round() as usize].max(1e-10);
    20.0 * (peak / floor).log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acoustic_features::pitch::pitch_track;

    fn vowel(f0: f64, seconds: f64, amp_of_cycle: impl Fn(usize) -> f64) -> Vec<f64> {
        let sr = f64::from(CANONICAL_RATE);
        let period = (sr / f0).round() as usize;
        (0..(seconds * sr) as usize)
            .map(|n| {
                let t = n as f64 / sr;
                let a = amp_of_cycle(n / period);
                // A few harmonics for a speech-like cycle shape.
                a * (0.6 * (2.0 * std::f64::consts::PI * f0 * t).sin()
                    + 0.3 * (2.0 * std::f64::consts::PI * 2.0 * f0 * t).sin()
                    + 0.1 * (2.0 * std::f64::consts::PI * 3.0 * f0 * t).sin())
            })
            .collect()
    }

    #[test]
    fn periodic_vowel_low_shimmer() {
        let v = vowel(160.0, 1.0, |_| 0.8);
        let track = pitch_track(&v);
        assert!(shimmer(&v, &track) < 0.01);
        assert!(jitter(&v, &track) < 0.02);
    }

    #[test]
    fn amplitude_modulated_vowel_shimmer_band() {
        // Peak amplitude alternating 1.0 / 1.2 per cycle: mean |dA| = 0.2,
        // mean A = 1.1, expected shimmer about 0.18.
        let v = vowel(160.0, 1.0, |c| if c % 2 == 0 { 1.0 } else { 1.2 });
        let track = pitch_track(&v);
        let s = shimmer(&v, &track);
        assert!((0.15..=0.25).contains(&s), "shimmer {s}");

        // Oracle recomputation from the extracted cycle peaks.
        let (amps, _) = cycle_peaks(&v, &track);
        let mean_a = amps.iter().sum::<f64>() / amps.len() as f64;
        let mean_d = amps.windows(2).map(|w| (w[1] - w[0]).abs()).sum::<f64>()
            / (amps.len() - 1) as f64;
        assert!((s - mean_d / mean_a).abs() < 1e-12);
    }

    #[test]
    fn silence_is_degenerate_zero() {
        let silence = vec![0.0; 16000];
        let track = pitch_track(&silence);
        assert_eq!(shimmer(&silence, &track), 0.0);
        assert_eq!(jitter(&silence, &track), 0.0);
        assert_eq!(speech_rate_proxy(&vec![0.0; 100], 1.0), 0.0);
        assert_eq!(pause_ratio(&vec![0.0; 100]), 1.0);
        assert_eq!(dynamic_range_db(&vec![0.0; 100]), 0.0);
    }

    #[test]
    fn rhythm_descriptors_behave() {
        // Envelope with 4 energy bursts over 1 s.
        let mut rms = vec![0.001; 100];
        for center in [10, 35, 60, 85] {
            for k in 0..5 {
                rms[center - 2 + k] = 0.5 - 0.1 * (k as f64 - 2.0).abs();
            }
        }
        assert_eq!(speech_rate_proxy(&rms, 1.0), 4.0);
        assert!(pause_ratio(&rms) > 0.5);
        assert!(dynamic_range_db(&rms) > 20.0);
    }
}
