//! Sample-rate conversion to the canonical 16 kHz mono format.
//!
//! The resampler is a 64-tap windowed-sinc interpolator with a Kaiser
//! window, evaluated directly at each output position. Downsampling sets
//! the sinc cutoff to the output Nyquist so aliases are suppressed.

use super::wav::Waveform;

pub const CANONICAL_RATE: u32 = 16000;

const TAPS: usize = 64;
const KAISER_BETA: f64 = 8.0;

/// Zeroth-order modified Bessel function, power series.
fn bessel_i0(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let half_x = x / 2.0;
    for k in 1..=30 {
        term *= (half_x / k as f64).powi(2);
        sum += term;
        if term < 1e-16 * sum {
            break;
        }
    }
    sum
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0
    } else {
        let px = std::f64::consts::PI * x;
        px.sin() / px
    }
}

/// Resample a mono signal from `from_rate` to `to_rate`.
pub fn resample(samples: &[f64], from_rate: u32, to_rate: u32) -> Vec<f64> {
    if from_rate == to_rate {
        return samples.to_vec();
    }
    let ratio = f64::from(to_rate) / f64::from(from_rate);
    // Cutoff at the lower Nyquist, normalized to input sample units.
    let cutoff = 0.5 * ratio.min(1.0);
    let half = TAPS as f64 / 2.0;
    let i0_beta = bessel_i0(KAISER_BETA);
    let out_len = (samples.len() as f64 * ratio).round() as usize;
    let mut out = Vec::with_capacity(out_len);
    for n in 0..out_len {
        let pos = n as f64 / ratio;
        let center = pos.floor() as isize;
        let mut acc = 0.0;
        let mut wsum = 0.0;
        for k in -(TAPS as isize / 2)..=(TAPS as isize / 2) {
            let idx = center + k;
            let t = pos - idx as f64;
            if t.abs() > half {
                continue;
            }
            let kaiser = bessel_i0(KAISER_BETA * (1.0 - (t / half).powi(2)).max(0.0).sqrt()) / i0_beta;
            let w = 2.0 * cutoff * sinc(2.0 * cutoff * t) * kaiser;
            // Clamp-to-edge padding at the boundaries.
            let s = if idx < 0 {
                samples[0]
            } else if idx as usize >= samples.len() {
                samples[samples.len() - 1]
            } else {
                samples[idx as usize]
            };
            acc += w * s;
            wsum += w;
        }
        // Normalizing by the window sum keeps DC exact for any ratio.
        out.push(if wsum.abs() > 1e-12 { acc / wsum } else { 0.0 });
    }
    out
}

/// Convert any decoded waveform to 16 kHz mono.
///
/// A waveform already in canonical form is returned unchanged, bit for bit.
pub fn to_canonical(w: &Waveform) -> Waveform {
    if w.channels == 1 && w.sample_rate == CANONICAL_RATE {
        return w.clone();
    }
    let mono = w.downmix();
    let samples = resample(&mono.samples, mono.sample_rate, CANONICAL_RATE);
    Waveform::mono(samples, CANONICAL_RATE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_path_is_bitwise() {
        let w = Waveform::mono(vec![0.1, -0.2, 0.3], CANONICAL_RATE);
        let c = to_canonical(&w);
        assert_eq!(c, w);
    }

    #[test]
    fn dc_preserved_at_half_rate() {
        let w = Waveform::mono(vec![0.5; 32000], 32000);
        let c = to_canonical(&w);
        assert_eq!(c.sample_rate, CANONICAL_RATE);
        assert_eq!(c.samples.len(), 16000);
        for &s in &c.samples[100..c.samples.len() - 100] {
            assert!((s - 0.5).abs() < 1e-3, "got {s}");
        }
    }

    #[test]
    fn duration_preserved_within_one_sample() {
        let w = Waveform::mono(vec![0.0; 44100], 44100);
        let c = to_canonical(&w);
        assert!((c.duration_s() - 1.0).abs() <= 1.0 / 16000.0);
    }

    #[test]
    fn sine_spectral_peak_survives_48k_to_16k() {
        let rate = 48000u32;
        let samples: Vec<f64> = (0..rate)
            .map(|n| (2.0 * std::f64::consts::PI * 1000.0 * f64::from(n) / f64::from(rate)).sin())
            .collect();
        let c = to_canonical(&Waveform::mono(samples, rate));
        // 1024-point FFT of a mid-signal slice.
        let slice = &c.samples[4000..4000 + 1024];
        let spec = crate::acoustic_features::fft_magnitudes(slice, 1024);
        let peak_bin = spec
            .iter()
            .enumerate()
            .skip(1)
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        let expected = (1000.0_f64 * 1024.0 / 16000.0).round() as usize;
        assert!(
            (peak_bin as isize - expected as isize).abs() <= 1,
            "peak bin {peak_bin}, expected {expected}"
        );
    }
}
