//! Reading and writing the nine-column diachronic usage TSV.
//!
//! The format has a header row and one usage per line. Fields are separated
//! by tabs and never quoted, so tabs and newlines cannot occur inside a
//! field. Columns may come in any order on input; output always uses
//! [`COLUMNS`] order.

mod inventory;
mod prediction;
mod stats;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::diag::{self, Warning};
use crate::error::{Error, Result};

pub use inventory::{build_inventories, Inventories, Sense, SenseInventory};
pub use prediction::{
    apply_subtask1, apply_subtask2, parse_subtask1_prediction, parse_subtask1_prediction_str,
    parse_subtask2_prediction, parse_subtask2_prediction_str, Subtask1Prediction,
    Subtask2Prediction,
};
pub use stats::{compute_stats, CorpusStats, WordStats};

/// Canonical column order.
pub const COLUMNS: [&str; 9] = [
    "usage_id",
    "word",
    "orth",
    "sense_id",
    "gloss",
    "example",
    "indices_target_token",
    "date",
    "period",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Period {
    Old,
    New,
}

impl Period {
    pub fn as_str(self) -> &'static str {
        match self {
            Period::Old => "old",
            Period::New => "new",
        }
    }
}

impl FromStr for Period {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "old" => Ok(Period::Old),
            "new" => Ok(Period::New),
            other => Err(format!("invalid period '{other}', expected 'old' or 'new'")),
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How strictly sense labels are required.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseMode {
    /// Every row carries a sense_id.
    Gold,
    /// Old rows carry a sense_id; new rows may leave sense_id and gloss empty.
    Test,
    /// No label requirements.
    Permissive,
}

/// A half-open `start..end` character range inside a usage example.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CharSpan {
    pub start: usize,
    pub end: usize,
}

/// The `indices_target_token` field: `start:end` spans separated by `;`.
///
/// The raw text is always kept so that writing a record reproduces the
/// input. `spans` is `None` when the text could not be parsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetSpans {
    pub raw: String,
    pub spans: Option<Vec<CharSpan>>,
}

impl TargetSpans {
    pub fn parse(raw: &str) -> Self {
        let spans = raw
            .split(';')
            .map(|part| {
                let (start, end) = part.trim().split_once(':')?;
                let start = start.trim().parse().ok()?;
                let end = end.trim().parse().ok()?;
                (start <= end).then_some(CharSpan { start, end })
            })
            .collect::<Option<Vec<_>>>();
        TargetSpans {
            raw: raw.to_string(),
            spans,
        }
    }

    pub fn is_parsed(&self) -> bool {
        self.spans.is_some()
    }

    /// Whether every span fits into a text of `len` characters.
    pub fn within(&self, len: usize) -> bool {
        self.spans
            .as_ref()
            .is_none_or(|spans| spans.iter().all(|s| s.end <= len))
    }
}

/// One usage row of the corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageRecord {
    pub usage_id: String,
    pub word: String,
    pub orth: Option<String>,
    pub sense_id: Option<String>,
    pub gloss: Option<String>,
    pub example: String,
    pub indices_target_token: Option<TargetSpans>,
    pub date: Option<String>,
    pub period: Period,
}

impl UsageRecord {
    pub fn is_old(&self) -> bool {
        self.period == Period::Old
    }

    pub fn is_new(&self) -> bool {
        self.period == Period::New
    }

    fn fields(&self) -> [&str; 9] {
        fn opt(o: &Option<String>) -> &str {
            o.as_deref().unwrap_or("")
        }
        [
            &self.usage_id,
            &self.word,
            opt(&self.orth),
            opt(&self.sense_id),
            opt(&self.gloss),
            &self.example,
            self.indices_target_token
                .as_ref()
                .map_or("", |t| t.raw.as_str()),
            opt(&self.date),
            self.period.as_str(),
        ]
    }
}

/// A parsed corpus file: records in file order plus non-fatal findings.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub records: Vec<UsageRecord>,
    pub warnings: Vec<Warning>,
}

impl Corpus {
    /// Wraps records that did not come from a file, checking id uniqueness.
    pub fn from_records(records: Vec<UsageRecord>) -> Result<Self> {
        check_unique_ids(records.iter().map(|r| r.usage_id.as_str()))?;
        Ok(Corpus {
            records,
            warnings: Vec::new(),
        })
    }

    /// Record indices grouped by target word, each list in file order.
    pub fn word_index(&self) -> BTreeMap<&str, Vec<usize>> {
        let mut index: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, r) in self.records.iter().enumerate() {
            index.entry(r.word.as_str()).or_default().push(i);
        }
        index
    }

    pub fn get(&self, usage_id: &str) -> Option<&UsageRecord> {
        self.records.iter().find(|r| r.usage_id == usage_id)
    }

    pub fn to_tsv(&self) -> String {
        to_tsv(&self.records)
    }
}

fn non_empty(s: &str) -> Option<String> {
    (!s.is_empty()).then(|| s.to_string())
}

fn check_unique_ids<'a>(ids: impl Iterator<Item = &'a str>) -> Result<()> {
    let mut seen = HashSet::new();
    let mut dups: Vec<&str> = Vec::new();
    for id in ids {
        if !seen.insert(id) && !dups.contains(&id) {
            dups.push(id);
        }
    }
    if dups.is_empty() {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "duplicate usage_id: {}",
            dups.join(", ")
        )))
    }
}

pub fn parse_corpus(path: impl AsRef<Path>, mode: ParseMode) -> Result<Corpus> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_corpus_str(&text, mode)
}

pub fn parse_corpus_str(text: &str, mode: ParseMode) -> Result<Corpus> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let Some((_, header)) = lines.next() else {
        return Err(Error::Format("empty file, expected a header row".into()));
    };

    let mut warnings = Vec::new();
    let names: Vec<&str> = header.split('\t').map(str::trim).collect();
    let mut position: HashMap<&str, usize> = HashMap::new();
    for (i, name) in names.iter().enumerate() {
        if COLUMNS.contains(name) {
            if position.insert(name, i).is_some() {
                return Err(Error::Format(format!("column '{name}' appears twice")));
            }
        } else {
            diag::push(&mut warnings, Warning::UnknownColumn(name.to_string()));
        }
    }
    let mut cols = [0usize; 9];
    for (slot, name) in cols.iter_mut().zip(COLUMNS) {
        *slot = *position
            .get(name)
            .ok_or_else(|| Error::Format(format!("missing required column '{name}'")))?;
    }

    let mut records = Vec::new();
    for (line, raw) in lines {
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split('\t').collect();
        if fields.len() != names.len() {
            return Err(Error::Format(format!(
                "line {line}: expected {} fields, found {}",
                names.len(),
                fields.len()
            )));
        }
        let get = |c: usize| fields[cols[c]];

        let period: Period = get(8)
            .parse()
            .map_err(|e| Error::Validation(format!("line {line}: {e}")))?;
        let usage_id = get(0).to_string();
        if usage_id.is_empty() {
            return Err(Error::Validation(format!("line {line}: empty usage_id")));
        }
        let word = get(1).to_string();
        if word.is_empty() {
            return Err(Error::Validation(format!("line {line}: empty word")));
        }
        let sense_id = non_empty(get(3));
        let needs_label = match mode {
            ParseMode::Gold => true,
            ParseMode::Test => period == Period::Old,
            ParseMode::Permissive => false,
        };
        if needs_label && sense_id.is_none() {
            return Err(Error::Validation(format!(
                "line {line}: {period} usage '{usage_id}' has no sense_id"
            )));
        }

        let example = get(5).to_string();
        let indices = non_empty(get(6)).map(|raw| TargetSpans::parse(&raw));
        if let Some(spans) = &indices {
            if !spans.is_parsed() {
                diag::push(
                    &mut warnings,
                    Warning::MalformedSpans {
                        line,
                        value: spans.raw.clone(),
                    },
                );
            } else if !spans.within(example.chars().count()) {
                diag::push(
                    &mut warnings,
                    Warning::SpanOutOfBounds {
                        line,
                        usage_id: usage_id.clone(),
                    },
                );
            }
        }

        records.push(UsageRecord {
            usage_id,
            word,
            orth: non_empty(get(2)),
            sense_id,
            gloss: non_empty(get(4)),
            example,
            indices_target_token: indices,
            date: non_empty(get(7)),
            period,
        });
    }

    check_unique_ids(records.iter().map(|r| r.usage_id.as_str()))?;
    Ok(Corpus { records, warnings })
}

/// Serializes records with a header in canonical column order.
pub fn to_tsv(records: &[UsageRecord]) -> String {
    let mut out = COLUMNS.join("\t");
    out.push('\n');
    for r in records {
        out.push_str(&r.fields().join("\t"));
        out.push('\n');
    }
    out
}

pub fn write_corpus(path: impl AsRef<Path>, records: &[UsageRecord]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_tsv(records)).map_err(|e| Error::io(path, e))
}
