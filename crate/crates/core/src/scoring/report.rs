use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use super::{Aggregates, WordScore};
use crate::diag::Warning;
use crate::error::{Error, Result};

/// Metric keys in output order.
const METRIC_KEYS: [&str; 7] = ["ari", "f1", "bertscore", "bleu", "coverage", "bertscore_iou", "bleu_iou"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    pub task: String,
    /// Sorted by word.
    pub rows: Vec<WordScore>,
    pub aggregates: Aggregates,
    pub metadata: BTreeMap<String, String>,
    #[serde(skip)]
    pub warnings: Vec<Warning>,
}

fn fmt4(v: f64) -> String {
    format!("{v:.4}")
}

fn opt4(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), fmt4)
}

impl ScoreReport {
    pub(crate) fn new(
        task: &str,
        mut rows: Vec<WordScore>,
        aggregates: Aggregates,
        warnings: Vec<Warning>,
    ) -> Self {
        rows.sort_by(|a, b| a.word.cmp(&b.word));
        let mut metadata = BTreeMap::new();
        metadata.insert("task".to_string(), task.to_string());
        metadata.insert("words".to_string(), rows.len().to_string());
        ScoreReport {
            task: task.to_string(),
            rows,
            aggregates,
            metadata,
            warnings,
        }
    }

    pub fn row(&self, word: &str) -> Option<&WordScore> {
        self.rows
            .binary_search_by(|r| r.word.as_str().cmp(word))
            .ok()
            .map(|i| &self.rows[i])
    }

    /// Aggregate metrics by output key.
    pub fn metrics(&self) -> Vec<(&'static str, f64)> {
        let a = &self.aggregates;
        let values = [a.ari, a.macro_f1, a.bertscore, a.bleu, a.coverage, a.bertscore_iou, a.bleu_iou];
        METRIC_KEYS
            .iter()
            .zip(values)
            .filter_map(|(k, v)| v.map(|v| (*k, v)))
            .collect()
    }

    /// Metadata as `# key<TAB>value` lines followed by `metric<TAB>value`.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}\t{v}");
        }
        for (k, v) in self.metrics() {
            let _ = writeln!(out, "{k}\t{}", fmt4(v));
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} over {} words", self.task, self.rows.len());
        for (k, v) in self.metrics() {
            let _ = writeln!(out, "  {k:<14}{:>8}", fmt4(v));
        }
        out
    }

    /// Per-word detail table with a header.
    pub fn details_tsv(&self) -> String {
        let mut out = String::from(
            "word\tari\tf1\tbertscore\tbleu\tbertscore_iou\tbleu_iou\tn_new_entries\tn_old_sense_entries\tn_gained_senses\tn_pred_senses\tn_pairs\tcovered\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.word,
                opt4(r.ari),
                opt4(r.macro_f1),
                opt4(r.bertscore),
                opt4(r.bleu),
                opt4(r.bertscore_iou),
                opt4(r.bleu_iou),
                r.n_new_entries,
                r.n_old_sense_entries,
                r.n_gained_senses,
                r.n_pred_senses,
                r.n_pairs,
                r.covered
            );
        }
        out
    }
}

/// Reads the metric lines of a key-value report, skipping `#` lines.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('\t')
            .ok_or_else(|| Error::Format(format!("line {}: expected key<TAB>value", i + 1)))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("line {}: '{v}' is not a number", i + 1)))?;
        out.insert(k.to_string(), v);
    }
    Ok(out)
}

/// Unweighted mean per metric across reports (e.g. one per language).
/// Only metrics present in every report are combined.
pub fn combine_reports(reports: &[BTreeMap<String, f64>]) -> Result<BTreeMap<String, f64>> {
    let Some(first) = reports.first() else {
        return Err(Error::InvalidArgument("nothing to combine".into()));
    };
    let mut out = BTreeMap::new();
    for key in first.keys() {
        if reports.iter().all(|r| r.contains_key(key)) {
            let sum: f64 = reports.iter().map(|r| r[key]).sum();
            out.insert(key.clone(), sum / reports.len() as f64);
        } else {
            log::warn!("metric '{key}' missing from some reports, not combined");
        }
    }
    Ok(out)
}
