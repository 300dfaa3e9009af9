//! Minimal RIFF/WAVE reader and writer.
//!
//! Supports PCM 16-bit and IEEE float 32-bit, 1-2 channels. Anything else
//! is rejected with a dedicated error rather than decoded approximately.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use super::DatasetError;

/// A decoded audio signal. After [`super::to_canonical`] the invariants are
/// `sample_rate == 16000` and `channels == 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    /// Interleaved samples in [-1, 1].
    pub samples: Vec<f64>,
    pub sample_rate: u32,
    pub channels: u16,
}

impl Waveform {
    pub fn mono(samples: Vec<f64>, sample_rate: u32) -> Self {
        Waveform {
            samples,
            sample_rate,
            channels: 1,
        }
    }

    /// Number of frames (samples per channel).
    pub fn frames(&self) -> usize {
        self.samples.len() / self.channels as usize
    }

    pub fn duration_s(&self) -> f64 {
        self.frames() as f64 / f64::from(self.sample_rate)
    }

    /// Average the channels into one.
    pub fn downmix(&self) -> Waveform {
        if self.channels == 1 {
            return self.clone();
        }
        let ch = self.channels as usize;
        let mono = self
            .samples
            .chunks_exact(ch)
            .map(|frame| frame.iter().sum::<f64>() / ch as f64)
            .collect();
        Waveform::mono(mono, self.sample_rate)
    }
}

fn read_u16(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn read_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

/// Decode a WAV file into a [`Waveform`] with amplitudes in [-1, 1].
pub fn load_wav(path: &Path) -> Result<Waveform, DatasetError> {
    let bytes = fs::read(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode_wav(&bytes)
}

pub(crate) fn decode_wav(bytes: &[u8]) -> Result<Waveform, DatasetError> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(DatasetError::MalformedContainer(
            "missing RIFF/WAVE header".into(),
        ));
    }

    let mut fmt: Option<(u16, u16, u32, u16)> = None; // (format, channels, rate, bits)
    let mut data: Option<&[u8]> = None;
    let mut at = 12;
    while at + 8 <= bytes.len() {
        let id = &bytes[at..at + 4];
        let size = read_u32(bytes, at + 4) as usize;
        let body_start = at + 8;
        if body_start + size > bytes.len() {
            return Err(DatasetError::MalformedContainer(format!(
                "chunk {:?} overruns file",
                String::from_utf8_lossy(id)
            )));
        }
        let body = &bytes[body_start..body_start + size];
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(DatasetError::MalformedContainer("fmt chunk too short".into()));
                }
                let mut format = read_u16(body, 0);
                let channels = read_u16(body, 2);
                let rate = read_u32(body, 4);
                let bits = read_u16(body, 14);
                // WAVE_FORMAT_EXTENSIBLE carries the real format in the
                // first two bytes of the sub-format GUID.
                if format == 0xFFFE && size >= 26 {
                    format = read_u16(body, 24);
                }
                fmt = Some((format, channels, rate, bits));
            }
            b"data" => data = Some(body),
            _ => {}
        }
        // Chunks are word-aligned.
        at = body_start + size + (size & 1);
    }

    let (format, channels, rate, bits) =
        fmt.ok_or_else(|| DatasetError::MalformedContainer("no fmt chunk".into()))?;
    let data = data.ok_or_else(|| DatasetError::MalformedContainer("no data chunk".into()))?;
    if !(1..=2).contains(&channels) {
        return Err(DatasetError::UnsupportedEncoding(format!(
            "{channels} channels"
        )));
    }
    if rate == 0 {
        return Err(DatasetError::MalformedContainer("zero sample rate".into()));
    }

    let samples: Vec<f64> = match (format, bits) {
        (1, 16) => data
            .chunks_exact(2)
            .map(|b| f64::from(i16::from_le_bytes([b[0], b[1]])) / 32768.0)
            .collect(),
        (3, 32) => data
            .chunks_exact(4)
            .map(|b| f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]])))
            .collect(),
        (fmt_tag, bits) => {
            return Err(DatasetError::UnsupportedEncoding(format!(
                "format tag {fmt_tag}, {bits} bits"
            )))
        }
    };
    if samples.is_empty() {
        return Err(DatasetError::EmptyAudio);
    }
    Ok(Waveform {
        samples,
        sample_rate: rate,
        channels,
    })
}

/// Write a mono waveform as PCM 16-bit WAV. Samples are clamped to [-1, 1]
/// and rounded to the nearest 16-bit code.
pub fn write_wav_pcm16(path: &Path, w: &Waveform) -> Result<(), DatasetError> {
    let io_err = |source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    };
    let ch = w.channels;
    let rate = w.sample_rate;
    let data_len = (w.samples.len() * 2) as u32;
    let byte_rate = rate * u32::from(ch) * 2;
    let block_align = ch * 2;

    let mut out = Vec::with_capacity(44 + w.samples.len() * 2);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&ch.to_le_bytes());
    out.extend_from_slice(&rate.to_le_bytes());
    out.extend_from_slice(&byte_rate.to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &s in &w.samples {
        let q = (s.clamp(-1.0, 1.0) * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }
    let mut f = fs::File::create(path).map_err(io_err)?;
    f.write_all(&out).map_err(io_err)
}
