use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;

use super::{mean, Aggregates, ScoreReport, WordScore};
use crate::corpus::{build_inventories, Corpus, SenseInventory, Subtask1Prediction, UsageRecord};
use crate::diag::{self, Warning};
use crate::error::{Error, Result};
use crate::metrics::{ari_from_labels, macro_f1_from_labels};

/// Scores sense-id predictions for the new-period usages of every word.
///
/// ARI covers all new usages of a word; macro-F1 covers those whose gold
/// sense is in the word's old inventory and is left out when there are
/// none. A word the submission does not cover at all scores 0 on both.
pub fn score_subtask1(gold: &Corpus, pred: &Subtask1Prediction) -> Result<ScoreReport> {
    let inventories = build_inventories(&gold.records);
    let index = gold.word_index();
    let mut warnings = Vec::new();

    let gold_new: HashSet<&str> = gold
        .records
        .iter()
        .filter(|r| r.is_new())
        .map(|r| r.usage_id.as_str())
        .collect();
    for id in pred.labels.keys() {
        if !gold_new.contains(id.as_str()) {
            diag::push(&mut warnings, Warning::UnknownUsage(id.clone()));
        }
    }

    let words: Vec<(&str, Vec<&UsageRecord>)> = index
        .into_iter()
        .map(|(w, idx)| {
            let new = idx
                .into_iter()
                .map(|i| &gold.records[i])
                .filter(|r| r.is_new())
                .collect::<Vec<_>>();
            (w, new)
        })
        .filter(|(_, new)| !new.is_empty())
        .collect();

    let rows = words
        .par_iter()
        .map(|(word, new)| {
            let inventory = inventories.get(word).expect("inventory for every word");
            score_word(word, new, inventory, pred)
        })
        .collect::<Result<Vec<WordScore>>>()?;

    for row in rows.iter().filter(|r| !r.covered) {
        diag::push(&mut warnings, Warning::MissingWord(row.word.clone()));
    }

    let aggregates = Aggregates {
        ari: Some(mean(rows.iter().map(|r| r.ari))),
        macro_f1: Some(mean(rows.iter().map(|r| r.macro_f1))),
        ..Default::default()
    };
    let mut report = ScoreReport::new("subtask1", rows, aggregates, warnings);
    report.metadata.insert(
        "f1_rule".into(),
        "words without old-sense new entries are excluded from the macro-F1 mean".into(),
    );
    report.metadata.insert(
        "missing_word_rule".into(),
        "uncovered words score 0 on ARI and macro-F1".into(),
    );
    Ok(report)
}

fn score_word(
    word: &str,
    new: &[&UsageRecord],
    inventory: &SenseInventory,
    pred: &Subtask1Prediction,
) -> Result<WordScore> {
    let gold_labels = new
        .iter()
        .map(|r| {
            r.sense_id.as_deref().ok_or_else(|| {
                Error::Validation(format!("gold usage '{}' has no sense_id", r.usage_id))
            })
        })
        .collect::<Result<Vec<&str>>>()?;
    let pred_labels: Vec<Option<&str>> = new.iter().map(|r| pred.get(&r.usage_id)).collect();
    let covered = pred_labels.iter().filter(|p| p.is_some()).count();

    let old_sense: Vec<usize> = (0..new.len())
        .filter(|&i| inventory.contains(gold_labels[i]))
        .collect();
    let gained: BTreeSet<&str> = gold_labels
        .iter()
        .filter(|l| !inventory.contains(l))
        .copied()
        .collect();
    let mut row = WordScore {
        word: word.to_string(),
        n_new_entries: new.len(),
        n_old_sense_entries: old_sense.len(),
        n_gained_senses: gained.len(),
        ..Default::default()
    };

    if covered == 0 {
        row.ari = Some(0.0);
        row.macro_f1 = (!old_sense.is_empty()).then_some(0.0);
        return Ok(row);
    }
    if covered < new.len() {
        return Err(Error::Validation(format!(
            "submission labels {covered} of {} new usages of '{word}'",
            new.len()
        )));
    }
    let pred_labels: Vec<&str> = pred_labels.into_iter().flatten().collect();
    row.covered = true;
    row.ari = Some(ari_from_labels(&gold_labels, &pred_labels));

    if !old_sense.is_empty() {
        let g: Vec<&str> = old_sense.iter().map(|&i| gold_labels[i]).collect();
        let p: Vec<&str> = old_sense.iter().map(|&i| pred_labels[i]).collect();
        let classes: BTreeSet<String> = g.iter().map(|s| s.to_string()).collect();
        row.macro_f1 = Some(macro_f1_from_labels(&g, &p, &classes)?);
    }
    Ok(row)
}
