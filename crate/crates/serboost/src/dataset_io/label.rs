//! Emotion label parsing for the supported benchmark filename conventions.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DatasetError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusKind {
    Tess,
    Emodb,
    Ravdess,
    Savee,
    Generic,
}

impl std::str::FromStr for CorpusKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tess" => Ok(CorpusKind::Tess),
            "emodb" | "emo-db" => Ok(CorpusKind::Emodb),
            "ravdess" => Ok(CorpusKind::Ravdess),
            "savee" => Ok(CorpusKind::Savee),
            "generic" => Ok(CorpusKind::Generic),
            other => Err(format!("unknown corpus kind {other:?}")),
        }
    }
}

/// An emotion class: a name from the corpus' closed label set plus a stable
/// integer id within that set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EmotionLabel {
    pub name: String,
    pub index: usize,
}

/// The closed, ordered label set of a corpus. For GENERIC corpora the set
/// is discovered from directory names and sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSet {
    pub names: Vec<String>,
}

impl LabelSet {
    pub fn for_kind(kind: CorpusKind) -> Option<LabelSet> {
        let names: &[&str] = match kind {
            CorpusKind::Emodb => &[
                "anger",
                "boredom",
                "disgust",
                "anxiety/fear",
                "happiness",
                "sadness",
                "neutral",
            ],
            CorpusKind::Ravdess => &[
                "neutral", "calm", "happy", "sad", "angry", "fearful", "disgust", "surprised",
            ],
            CorpusKind::Savee => &[
                "anger",
                "disgust",
                "fear",
                "happiness",
                "neutral",
                "sadness",
                "surprise",
            ],
            CorpusKind::Tess => &[
                "angry",
                "disgust",
                "fear",
                "happy",
                "neutral",
                "pleasant_surprise",
                "sad",
            ],
            CorpusKind::Generic => return None,
        };
        Some(LabelSet {
            names: names.iter().map(|s| (*s).to_string()).collect(),
        })
    }

    pub fn label(&self, name: &str) -> Option<EmotionLabel> {
        self.names.iter().position(|n| n == name).map(|index| EmotionLabel {
            name: name.to_string(),
            index,
        })
    }
}

pub(crate) fn parse_speaker(path: &Path, kind: CorpusKind) -> Option<String> {
    let stem = path.file_stem()?.to_str()?;
    match kind {
        CorpusKind::Emodb => stem.get(0..2).map(str::to_string),
        CorpusKind::Ravdess => stem.split('-').nth(6).map(str::to_string),
        CorpusKind::Savee => path
            .parent()
            .and_then(|p| p.file_name())
            .and_then(|n| n.to_str())
            .map(str::to_string),
        CorpusKind::Tess => stem.split('_').next().map(str::to_string),
        CorpusKind::Generic => None,
    }
}

/// Parse the emotion label encoded in a filename, following `kind`'s
/// official convention. GENERIC reads the immediate parent directory name.
pub fn parse_label(path: &Path, kind: CorpusKind) -> Result<EmotionLabel, DatasetError> {
    let name = path
        .file_name()
        .and_then(|n| n.to_str())
        .unwrap_or_default()
        .to_string();
    let stem = path
        .file_stem()
        .and_then(|n| n.to_str())
        .unwrap_or_default();
    let unrecognized = || DatasetError::UnrecognizedConvention {
        kind,
        name: name.clone(),
    };
    let unknown = |code: &str| DatasetError::UnknownCode {
        kind,
        code: code.to_string(),
        name: name.clone(),
    };
    let set = LabelSet::for_kind(kind);

    match kind {
        CorpusKind::Emodb => {
            // e.g. 03a01Wa.wav — speaker(2) text(3) emotion letter, version.
            let chars: Vec<char> = stem.chars().collect();
            if chars.len() < 6 || !chars[0].is_ascii_digit() {
                return Err(unrecognized());
            }
            let code = chars[5];
            let emotion = match code {
                'W' => "anger",
                'L' => "boredom",
                'E' => "disgust",
                'A' => "anxiety/fear",
                'F' => "happiness",
                'T' => "sadness",
                'N' => "neutral",
                _ => return Err(unknown(&code.to_string())),
            };
            Ok(set.unwrap().label(emotion).unwrap())
        }
        CorpusKind::Ravdess => {
            // e.g. 03-01-05-01-01-01-12.wav — 7 numeric dash fields,
            // emotion is the 3rd.
            let fields: Vec<&str> = stem.split('-').collect();
            if fields.len() != 7 || fields.iter().any(|f| f.len() != 2 || !f.chars().all(|c| c.is_ascii_digit())) {
                return Err(unrecognized());
            }
            let emotion = match fields[2] {
                "01" => "neutral",
                "02" => "calm",
                "03" => "happy",
                "04" => "sad",
                "05" => "angry",
                "06" => "fearful",
                "07" => "disgust",
                "08" => "surprised",
                code => return Err(unknown(code)),
            };
            Ok(set.unwrap().label(emotion).unwrap())
        }
        CorpusKind::Savee => {
            // e.g. a01.wav, sa12.wav — leading letter code then digits.
            let letters: String = stem.chars().take_while(|c| c.is_ascii_alphabetic()).collect();
            let rest: String = stem.chars().skip(letters.len()).collect();
            if letters.is_empty() || rest.is_empty() || !rest.chars().all(|c| c.is_ascii_digit()) {
                return Err(unrecognized());
            }
            let emotion = match letters.as_str() {
                "a" => "anger",
                "d" => "disgust",
                "f" => "fear",
                "h" => "happiness",
                "n" => "neutral",
                "sa" => "sadness",
                "su" => "surprise",
                code => return Err(unknown(code)),
            };
            Ok(set.unwrap().label(emotion).unwrap())
        }
        CorpusKind::Tess => {
            // e.g. OAF_back_angry.wav — trailing emotion word.
            let word = stem.rsplit('_').next().ok_or_else(unrecognized)?;
            if stem.split('_').count() < 2 {
                return Err(unrecognized());
            }
            let emotion = match word.to_ascii_lowercase().as_str() {
                "angry" => "angry",
                "disgust" => "disgust",
                "fear" => "fear",
                "happy" => "happy",
                "neutral" => "neutral",
                "ps" | "pleasant_surprise" | "pleasant_surprised" => "pleasant_surprise",
                "sad" => "sad",
                code => return Err(unknown(code)),
            };
            Ok(set.unwrap().label(emotion).unwrap())
        }
        CorpusKind::Generic => {
            let parent = path
                .parent()
                .and_then(|p| p.file_name())
                .and_then(|n| n.to_str())
                .ok_or_else(unrecognized)?;
            if parent.is_empty() {
                return Err(unrecognized());
            }
            // Index is assigned later when the corpus-wide label set is
            // known; use a placeholder here.
            Ok(EmotionLabel {
                name: parent.to_string(),
                index: 0,
            })
        }
    }
}
