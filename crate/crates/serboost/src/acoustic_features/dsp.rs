//! Short-time analysis primitives: pre-emphasis, framing, windowing, and a
//! radix-2 FFT.

use super::FeatureError;

pub const FRAME_MS: usize = 25;
pub const HOP_MS: usize = 10;
pub const PRE_EMPHASIS: f64 = 0.97;
pub const FFT_LEN: usize = 512;

/// y[n] = x[n] - 0.97 x[n-1], first sample passed through.
pub fn pre_emphasize(samples: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut prev = 0.0;
    for &s in samples {
        out.push(s - PRE_EMPHASIS * prev);
        prev = s;
    }
    out
}

pub fn hamming(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.54 - 0.46 * (2.0 * std::f64::consts::PI * n as f64 / (len - 1) as f64).cos())
        .collect()
}

/// Number of frames for a signal of `signal_len` samples.
pub fn frame_count(signal_len: usize, frame_len: usize, hop: usize) -> usize {
    if signal_len < frame_len {
        0
    } else {
        (signal_len - frame_len) / hop + 1
    }
}

/// Cut a signal into overlapping frames without windowing.
pub fn frame_raw(samples: &[f64], frame_len: usize, hop: usize) -> Result<Vec<Vec<f64>>, FeatureError> {
    let n = frame_count(samples.len(), frame_len, hop);
    if n == 0 {
        return Err(FeatureError::SignalTooShort {
            have: samples.len(),
            need: frame_len,
        });
    }
    Ok((0..n)
        .map(|i| samples[i * hop..i * hop + frame_len].to_vec())
        .collect())
}

/// Pre-emphasized, Hamming-windowed frames at the canonical 25 ms / 10 ms
/// configuration (frame and hop given in samples).
pub fn frame_signal(samples: &[f64], frame_len: usize, hop: usize) -> Result<Vec<Vec<f64>>, FeatureError> {
    let emphasized = pre_emphasize(samples);
    let mut frames = frame_raw(&emphasized, frame_len, hop)?;
    let window = hamming(frame_len);
    for frame in &mut frames {
        for (s, w) in frame.iter_mut().zip(&window) {
            *s *= w;
        }
    }
    Ok(frames)
}

/// In-place iterative radix-2 Cooley-Tukey FFT over (re, im) pairs.
/// `re.len()` must be a power of two.
pub fn fft_complex(re: &mut [f64], im: &mut [f64]) {
    let n = re.len();
    debug_assert!(n.is_power_of_two());
    debug_assert_eq!(n, im.len());

    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            re.swap(i, j);
            im.swap(i, j);
        }
    }

    let mut len = 2;
    while len <= n {
        let ang = -2.0 * std::f64::consts::PI / len as f64;
        let (wr, wi) = (ang.cos(), ang.sin());
        let mut i = 0;
        while i < n {
            let mut cur_r = 1.0;
            let mut cur_i = 0.0;
            for k in 0..len / 2 {
                let (ur, ui) = (re[i + k], im[i + k]);
                let (vr, vi) = (
                    re[i + k + len / 2] * cur_r - im[i + k + len / 2] * cur_i,
                    re[i + k + len / 2] * cur_i + im[i + k + len / 2] * cur_r,
                );
                re[i + k] = ur + vr;
                im[i + k] = ui + vi;
                re[i + k + len / 2] = ur - vr;
                im[i + k + len / 2] = ui - vi;
                let next_r = cur_r * wr - cur_i * wi;
                cur_i = cur_r * wi + cur_i * wr;
                cur_r = next_r;
            }
            i += len;
        }
        len <<= 1;
    }
}

/// Magnitudes of the first `n/2 + 1` bins of an `n`-point FFT of `frame`
/// zero-padded to `n`.
pub fn fft_magnitudes(frame: &[f64], n: usize) -> Vec<f64> {
    debug_assert!(n.is_power_of_two() && frame.len() <= n);
    let mut re = vec![0.0; n];
    let mut im = vec![0.0; n];
    re[..frame.len()].copy_from_slice(frame);
    fft_complex(&mut re, &mut im);
    (0..=n / 2).map(|k| (re[k] * re[k] + im[k] * im[k]).sqrt()).collect()
}

/// 257-bin magnitude spectrum of one windowed frame (512-point FFT).
pub fn spectrum(frame: &[f64]) -> Vec<f64> {
    fft_magnitudes(frame, FFT_LEN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    /// O(n^2) DFT oracle.
    fn naive_dft(x: &[f64]) -> Vec<(f64, f64)> {
        let n = x.len();
        (0..n)
            .map(|k| {
                let mut re = 0.0;
                let mut im = 0.0;
                for (t, &v) in x.iter().enumerate() {
                    let ang = -2.0 * std::f64::consts::PI * k as f64 * t as f64 / n as f64;
                    re += v * ang.cos();
                    im += v * ang.sin();
                }
                (re, im)
            })
            .collect()
    }

    #[test]
    fn framing_arithmetic() {
        // 16000 samples at 25 ms / 10 ms -> 98 frames of 400, hop 160.
        let frames = frame_signal(&vec![0.1; 16000], 400, 160).unwrap();
        assert_eq!(frames.len(), 98);
        assert_eq!(frames[0].len(), 400);
    }

    #[test]
    fn zero_signal_zero_frames() {
        let frames = frame_signal(&vec![0.0; 1200], 400, 160).unwrap();
        assert!(frames.iter().flatten().all(|&s| s == 0.0));
    }

    #[test]
    fn exact_length_single_frame() {
        let frames = frame_signal(&vec![0.5; 400], 400, 160).unwrap();
        assert_eq!(frames.len(), 1);
        assert!(matches!(
            frame_signal(&vec![0.5; 399], 400, 160),
            Err(FeatureError::SignalTooShort { .. })
        ));
    }

    #[test]
    fn sine_peak_bin() {
        let frame: Vec<f64> = (0..400)
            .map(|n| (2.0 * std::f64::consts::PI * 1000.0 * n as f64 / 16000.0).sin())
            .collect();
        let mag = spectrum(&frame);
        assert_eq!(mag.len(), 257);
        let peak = mag
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(peak, 32); // round(1000 * 512 / 16000)
    }

    #[test]
    fn zero_frame_zero_magnitudes() {
        assert!(spectrum(&vec![0.0; 400]).iter().all(|&m| m == 0.0));
    }

    #[test]
    fn fft_matches_naive_dft() {
        let mut rng = crate::rng::stage_rng(11, "fft_test", 0);
        for _ in 0..20 {
            let x: Vec<f64> = (0..512).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let oracle = naive_dft(&x);
            let mut re = x.clone();
            let mut im = vec![0.0; 512];
            fft_complex(&mut re, &mut im);
            let scale: f64 = oracle.iter().map(|(r, i)| r.hypot(*i)).fold(0.0, f64::max);
            for (k, (or, oi)) in oracle.iter().enumerate() {
                assert!((re[k] - or).abs() / scale < 1e-6);
                assert!((im[k] - oi).abs() / scale < 1e-6);
            }
        }
    }

    #[test]
    fn parseval() {
        let mut rng = crate::rng::stage_rng(12, "parseval", 0);
        let x: Vec<f64> = (0..512).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut re = x.clone();
        let mut im = vec![0.0; 512];
        fft_complex(&mut re, &mut im);
        let freq: f64 = re.iter().zip(&im).map(|(r, i)| r * r + i * i).sum();
        let time: f64 = x.iter().map(|v| v * v).sum();
        assert!((freq - 512.0 * time).abs() / (512.0 * time) < 1e-6);
    }
}
