use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::Serialize;

use super::UsageRecord;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct WordStats {
    pub examples_old: usize,
    pub examples_new: usize,
    /// Distinct labelled sense ids per period and overall.
    pub senses_old: usize,
    pub senses_new: usize,
    pub senses_total: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CorpusStats {
    pub samples_old: usize,
    pub samples_new: usize,
    pub samples_total: usize,
    pub target_words: usize,
    pub per_word: BTreeMap<String, WordStats>,
}

pub fn compute_stats(records: &[UsageRecord]) -> CorpusStats {
    #[derive(Default)]
    struct Acc<'a> {
        old: usize,
        new: usize,
        senses_old: BTreeSet<&'a str>,
        senses_new: BTreeSet<&'a str>,
    }
    let mut words: BTreeMap<&str, Acc> = BTreeMap::new();
    for r in records {
        let acc = words.entry(&r.word).or_default();
        let (count, senses) = if r.is_old() {
            (&mut acc.old, &mut acc.senses_old)
        } else {
            (&mut acc.new, &mut acc.senses_new)
        };
        *count += 1;
        if let Some(s) = &r.sense_id {
            senses.insert(s);
        }
    }
    let per_word: BTreeMap<String, WordStats> = words
        .into_iter()
        .map(|(w, a)| {
            let stats = WordStats {
                examples_old: a.old,
                examples_new: a.new,
                senses_old: a.senses_old.len(),
                senses_new: a.senses_new.len(),
                senses_total: a.senses_old.union(&a.senses_new).count(),
            };
            (w.to_string(), stats)
        })
        .collect();
    let samples_old = per_word.values().map(|w| w.examples_old).sum();
    let samples_new = per_word.values().map(|w| w.examples_new).sum();
    CorpusStats {
        samples_old,
        samples_new,
        samples_total: records.len(),
        target_words: per_word.len(),
        per_word,
    }
}

impl CorpusStats {
    /// Number of words having `k` distinct senses, keyed by `k`.
    pub fn sense_histogram(&self, select: impl Fn(&WordStats) -> usize) -> BTreeMap<usize, usize> {
        let mut hist = BTreeMap::new();
        for w in self.per_word.values() {
            *hist.entry(select(w)).or_insert(0) += 1;
        }
        hist
    }

    /// `key<TAB>value` lines.
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "samples_new\t{}", self.samples_new);
        let _ = writeln!(out, "samples_old\t{}", self.samples_old);
        let _ = writeln!(out, "samples_total\t{}", self.samples_total);
        let _ = writeln!(out, "target_words\t{}", self.target_words);
        let hists = [
            ("senses_old", self.sense_histogram(|w| w.senses_old)),
            ("senses_new", self.sense_histogram(|w| w.senses_new)),
            ("senses_total", self.sense_histogram(|w| w.senses_total)),
        ];
        for (name, hist) in hists {
            for (k, n) in hist {
                let _ = writeln!(out, "words_with_{name}.{k}\t{n}");
            }
        }
        out
    }

    pub fn to_table(&self, label: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{label}");
        let _ = writeln!(out, "  {:<14}{:>8}", "period", "samples");
        let _ = writeln!(out, "  {:<14}{:>8}", "new", self.samples_new);
        let _ = writeln!(out, "  {:<14}{:>8}", "old", self.samples_old);
        let _ = writeln!(out, "  {:<14}{:>8}", "total", self.samples_total);
        let _ = writeln!(out, "  {:<14}{:>8}", "target words", self.target_words);
        let hist = self.sense_histogram(|w| w.senses_total);
        if !hist.is_empty() {
            let _ = writeln!(out, "  senses per word (all periods):");
            for (k, n) in hist {
                let _ = writeln!(out, "    {k:>4} senses: {n} words");
            }
        }
        out
    }
}
