//! Corpus input: WAV decoding, canonical-format normalization, emotion
//! label parsing per benchmark convention, and deterministic stratified
//! splits.

mod corpus;
mod label;
mod resample;
mod split;
mod wav;

pub use corpus::{scan_corpus, Corpus, CorpusItem, ScanOutcome, SkippedFile};
pub use label::{parse_label, CorpusKind, EmotionLabel, LabelSet};
pub use resample::{resample, to_canonical, CANONICAL_RATE};
pub use split::{stratified_split, SplitCorpus, SplitManifest};
pub(crate) use split::partition_counts;
pub use wav::{load_wav, write_wav_pcm16, Waveform};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("malformed WAV container: {0}")]
    MalformedContainer(String),
    #[error("unsupported WAV encoding: {0}")]
    UnsupportedEncoding(String),
    #[error("audio stream has zero frames")]
    EmptyAudio,
    #[error("filename does not follow the {kind:?} convention: {name}")]
    UnrecognizedConvention { kind: CorpusKind, name: String },
    #[error("valid {kind:?} pattern but unmapped code {code:?} in {name}")]
    UnknownCode {
        kind: CorpusKind,
        code: String,
        name: String,
    },
    #[error("no parseable files under {0}")]
    EmptyCorpus(String),
    #[error("class {label} has {count} items; stratified split needs at least 3")]
    ClassTooSmall { label: String, count: usize },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
