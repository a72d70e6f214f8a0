//! Submission files. They share the test-file layout; Subtask 1 fills
//! `sense_id` on new-period rows, Subtask 2 additionally fills `gloss`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use indexmap::IndexMap;

use super::{parse_corpus_str, Corpus, ParseMode, UsageRecord};
use crate::diag::{self, Warning};
use crate::error::{Error, Result};

/// Predicted sense id per new-period usage.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Subtask1Prediction {
    pub labels: BTreeMap<String, String>,
    pub words: BTreeSet<String>,
    pub warnings: Vec<Warning>,
}

impl Subtask1Prediction {
    pub fn insert(&mut self, word: &str, usage_id: &str, sense_id: &str) {
        self.words.insert(word.to_string());
        self.labels
            .insert(usage_id.to_string(), sense_id.to_string());
    }

    pub fn get(&self, usage_id: &str) -> Option<&str> {
        self.labels.get(usage_id).map(String::as_str)
    }
}

/// Predicted glosses, keyed by word then by sense id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Subtask2Prediction {
    pub glosses: BTreeMap<String, IndexMap<String, String>>,
    pub warnings: Vec<Warning>,
}

impl Subtask2Prediction {
    /// Adds a gloss unless the (word, sense) pair already has one.
    pub fn insert(&mut self, word: &str, sense_id: &str, gloss: &str) -> bool {
        let senses = self.glosses.entry(word.to_string()).or_default();
        if senses.contains_key(sense_id) {
            return false;
        }
        senses.insert(sense_id.to_string(), gloss.to_string());
        true
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn parse_subtask1_prediction(
    path: impl AsRef<Path>,
    reference: Option<&Corpus>,
) -> Result<Subtask1Prediction> {
    parse_subtask1_prediction_str(&read(path.as_ref())?, reference)
}

/// `reference`, when given, is the test or gold corpus the submission
/// answers; it only drives warnings here. Unknown usages are dropped later
/// at scoring.
pub fn parse_subtask1_prediction_str(
    text: &str,
    reference: Option<&Corpus>,
) -> Result<Subtask1Prediction> {
    let corpus = parse_corpus_str(text, ParseMode::Permissive)?;
    let mut pred = Subtask1Prediction {
        warnings: corpus.warnings,
        ..Default::default()
    };
    for r in corpus.records.iter().filter(|r| r.is_new()) {
        let sense = r.sense_id.as_deref().ok_or_else(|| {
            Error::Validation(format!("new-period usage '{}' has no sense_id", r.usage_id))
        })?;
        pred.insert(&r.word, &r.usage_id, sense);
    }

    if let Some(reference) = reference {
        let known: HashSet<&str> = reference
            .records
            .iter()
            .map(|r| r.usage_id.as_str())
            .collect();
        for id in pred.labels.keys() {
            if !known.contains(id.as_str()) {
                diag::push(&mut pred.warnings, Warning::UnknownUsage(id.clone()));
            }
        }
        let ref_words: BTreeSet<&str> = reference
            .records
            .iter()
            .filter(|r| r.is_new())
            .map(|r| r.word.as_str())
            .collect();
        for w in ref_words {
            if !pred.words.contains(w) {
                diag::push(&mut pred.warnings, Warning::MissingWord(w.to_string()));
            }
        }
    }
    Ok(pred)
}

pub fn parse_subtask2_prediction(
    path: impl AsRef<Path>,
    reference: Option<&Corpus>,
) -> Result<Subtask2Prediction> {
    parse_subtask2_prediction_str(&read(path.as_ref())?, reference)
}

/// Rows without both a sense id and a gloss carry no Subtask 2 answer and
/// are skipped.
pub fn parse_subtask2_prediction_str(
    text: &str,
    reference: Option<&Corpus>,
) -> Result<Subtask2Prediction> {
    let corpus = parse_corpus_str(text, ParseMode::Permissive)?;
    let mut pred = Subtask2Prediction {
        warnings: corpus.warnings,
        ..Default::default()
    };
    for r in corpus.records.iter().filter(|r| r.is_new()) {
        let (Some(sense), Some(gloss)) = (&r.sense_id, &r.gloss) else {
            continue;
        };
        let previous = pred
            .glosses
            .get(&r.word)
            .and_then(|s| s.get(sense))
            .cloned();
        if !pred.insert(&r.word, sense, gloss) && previous.as_deref() != Some(gloss) {
            diag::push(
                &mut pred.warnings,
                Warning::ConflictingGloss {
                    word: r.word.clone(),
                    sense_id: sense.clone(),
                },
            );
        }
    }
    if let Some(reference) = reference {
        let ref_words: BTreeSet<&str> =
            reference.records.iter().map(|r| r.word.as_str()).collect();
        for w in pred.glosses.keys() {
            if !ref_words.contains(w.as_str()) {
                diag::push(&mut pred.warnings, Warning::UnknownWord(w.clone()));
            }
        }
    }
    Ok(pred)
}

/// Copies `records`, filling `sense_id` of new-period rows from `pred`.
/// Rows the prediction does not cover are left unchanged.
pub fn apply_subtask1(records: &[UsageRecord], pred: &Subtask1Prediction) -> Vec<UsageRecord> {
    records
        .iter()
        .map(|r| {
            let mut r = r.clone();
            if r.is_new() {
                if let Some(s) = pred.get(&r.usage_id) {
                    r.sense_id = Some(s.to_string());
                }
            }
            r
        })
        .collect()
}

/// Copies `records`, filling `gloss` of new-period rows whose (word, sense)
/// pair has a predicted gloss.
pub fn apply_subtask2(records: &[UsageRecord], pred: &Subtask2Prediction) -> Vec<UsageRecord> {
    records
        .iter()
        .map(|r| {
            let mut r = r.clone();
            if r.is_new() {
                let gloss = r
                    .sense_id
                    .as_ref()
                    .and_then(|s| pred.glosses.get(&r.word)?.get(s));
                if let Some(g) = gloss {
                    r.gloss = Some(g.clone());
                }
            }
            r
        })
        .collect()
}
