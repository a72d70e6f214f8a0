//! Per-word and aggregate scoring of both subtasks, plus the report formats.

mod report;
mod subtask1;
mod subtask2;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use report::{combine_reports, parse_key_values, ScoreReport};
pub use subtask1::score_subtask1;
pub use subtask2::{gained_senses, score_subtask2, Subtask2Options};

/// One target word's row in a report. Fields not produced by the subtask
/// being scored are `None`.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct WordScore {
    pub word: String,
    pub ari: Option<f64>,
    pub macro_f1: Option<f64>,
    pub bertscore: Option<f64>,
    pub bleu: Option<f64>,
    pub bertscore_iou: Option<f64>,
    pub bleu_iou: Option<f64>,
    pub n_new_entries: usize,
    pub n_old_sense_entries: usize,
    pub n_gained_senses: usize,
    pub n_pred_senses: usize,
    pub n_pairs: usize,
    pub covered: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Aggregates {
    pub ari: Option<f64>,
    pub macro_f1: Option<f64>,
    pub bertscore: Option<f64>,
    pub bleu: Option<f64>,
    pub coverage: Option<f64>,
    pub bertscore_iou: Option<f64>,
    pub bleu_iou: Option<f64>,
}

/// Mean of the present values; 0 when there are none.
pub(crate) fn mean(values: impl Iterator<Item = Option<f64>>) -> f64 {
    let (sum, n) = values
        .flatten()
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Intersection over union of two sense inventories of sizes `n_gold` and
/// `n_pred` with `n_pairs` aligned senses.
pub fn iou_penalty(n_gold: usize, n_pairs: usize, n_pred: usize) -> Result<f64> {
    if n_pairs > n_gold.min(n_pred) {
        return Err(Error::InvalidArgument(format!(
            "{n_pairs} pairs cannot come from inventories of {n_gold} and {n_pred} senses"
        )));
    }
    let union = n_gold + n_pred - n_pairs;
    if union == 0 {
        return Ok(1.0);
    }
    Ok(n_pairs as f64 / union as f64)
}

/// Hex SHA-256 of file contents, for report metadata.
pub fn fingerprint(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
