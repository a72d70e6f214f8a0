//! Non-fatal findings collected while reading or scoring data.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    UnknownColumn(String),
    MalformedSpans { line: usize, value: String },
    SpanOutOfBounds { line: usize, usage_id: String },
    UnlabeledOldUsage { usage_id: String },
    ConflictingGloss { word: String, sense_id: String },
    EmptyGloss { word: String, sense_id: String },
    WordWithoutOldSenses(String),
    UnknownUsage(String),
    UnknownWord(String),
    MissingWord(String),
    DuplicateEmbedding { line: usize },
    ZeroVector,
    NonConvergence { word: Option<String> },
    WordSkipped { word: String, reason: String },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::UnknownColumn(c) => write!(f, "ignoring unknown column '{c}'"),
            Warning::MalformedSpans { line, value } => {
                write!(f, "line {line}: unparseable indices_target_token '{value}' kept verbatim")
            }
            Warning::SpanOutOfBounds { line, usage_id } => {
                write!(f, "line {line}: target span of '{usage_id}' lies outside the example")
            }
            Warning::UnlabeledOldUsage { usage_id } => {
                write!(f, "old-period usage '{usage_id}' has no sense_id, left out of the inventory")
            }
            Warning::ConflictingGloss { word, sense_id } => {
                write!(f, "conflicting glosses for {word}/{sense_id}, keeping the first")
            }
            Warning::EmptyGloss { word, sense_id } => {
                write!(f, "sense {word}/{sense_id} has an empty gloss")
            }
            Warning::WordWithoutOldSenses(w) => write!(f, "word '{w}' has no old-period senses"),
            Warning::UnknownUsage(id) => {
                write!(f, "usage '{id}' is not in the reference data, ignored")
            }
            Warning::UnknownWord(w) => write!(f, "word '{w}' is not in the reference data, ignored"),
            Warning::MissingWord(w) => write!(f, "submission has no entries for word '{w}'"),
            Warning::DuplicateEmbedding { line } => {
                write!(f, "line {line}: duplicate embedding key, last record wins")
            }
            Warning::ZeroVector => write!(f, "cosine of a zero vector, defined as 0"),
            Warning::NonConvergence { word: Some(w) } => {
                write!(f, "affinity propagation did not converge for '{w}', using one cluster")
            }
            Warning::NonConvergence { word: None } => {
                write!(f, "affinity propagation did not converge, using one cluster")
            }
            Warning::WordSkipped { word, reason } => write!(f, "skipping word '{word}': {reason}"),
        }
    }
}

pub(crate) fn push(warnings: &mut Vec<Warning>, warning: Warning) {
    log::warn!("{warning}");
    warnings.push(warning);
}
