use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use rayon::prelude::*;

use crate::corpus::{build_inventories, Corpus, Subtask1Prediction, Subtask2Prediction, UsageRecord};
use crate::diag::{self, Warning};
use crate::embeddings::{cosine, get_sentence, EmbeddingProvider, Granularity};
use crate::error::{Error, Result};

/// Extra glosses per word from a `word<TAB>gloss` file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GlossList {
    pub by_word: BTreeMap<String, Vec<String>>,
}

pub fn parse_gloss_list(path: impl AsRef<Path>) -> Result<GlossList> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_gloss_list_str(&text)
}

pub fn parse_gloss_list_str(text: &str) -> Result<GlossList> {
    let mut list = GlossList::default();
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (word, gloss) = line
            .split_once('\t')
            .ok_or_else(|| Error::Format(format!("gloss list line {}: expected word<TAB>gloss", i + 1)))?;
        let (word, gloss) = (word.trim(), gloss.trim());
        if word.is_empty() || gloss.is_empty() {
            log::warn!("gloss list line {}: empty word or gloss, ignored", i + 1);
            continue;
        }
        let glosses = list.by_word.entry(word.to_string()).or_default();
        if !glosses.iter().any(|g| g == gloss) {
            glosses.push(gloss.to_string());
        }
    }
    Ok(list)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlossCandidate {
    pub gloss: String,
    pub embedding: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GlossCandidatePool {
    by_word: BTreeMap<String, Vec<GlossCandidate>>,
    external: bool,
}

impl GlossCandidatePool {
    /// Candidates are checked for a common dimension.
    pub fn from_candidates(by_word: BTreeMap<String, Vec<GlossCandidate>>, external: bool) -> Result<Self> {
        let mut dim = None;
        for c in by_word.values().flatten() {
            match dim {
                None => dim = Some(c.embedding.len()),
                Some(d) if d != c.embedding.len() => {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: c.embedding.len(),
                    })
                }
                _ => {}
            }
        }
        Ok(GlossCandidatePool { by_word, external })
    }

    /// Old-inventory glosses of every corpus word, followed by the glosses
    /// of `external` for that word. Candidates that cannot be embedded are
    /// left out with a warning.
    pub fn build(corpus: &Corpus, external: Option<&GlossList>, provider: &dyn EmbeddingProvider) -> Result<Self> {
        let inventories = build_inventories(&corpus.records);
        let mut by_word: BTreeMap<String, Vec<GlossCandidate>> = BTreeMap::new();
        let mut texts: Vec<(String, Vec<String>)> = Vec::new();
        for (word, inventory) in &inventories.by_word {
            let mut glosses: Vec<String> = Vec::new();
            let extra = external.and_then(|l| l.by_word.get(word)).into_iter().flatten();
            for g in inventory.senses.values().map(|s| s.gloss.trim()).chain(extra.map(|g| g.as_str())) {
                if !g.is_empty() && !glosses.iter().any(|x| x == g) {
                    glosses.push(g.to_string());
                }
            }
            texts.push((word.clone(), glosses));
        }
        let all: Vec<&str> = texts.iter().flat_map(|(_, g)| g.iter().map(String::as_str)).collect();
        if let Err(e) = provider.prefetch(&all, Granularity::Sentence) {
            log::warn!("prefetch of gloss embeddings failed: {e}");
        }
        for (word, glosses) in texts {
            let mut candidates = Vec::new();
            for gloss in glosses {
                match get_sentence(provider, &gloss) {
                    Ok(embedding) => candidates.push(GlossCandidate { gloss, embedding }),
                    Err(e) => log::warn!("gloss candidate of '{word}' left out: {e}"),
                }
            }
            by_word.insert(word, candidates);
        }
        Self::from_candidates(by_word, external.is_some())
    }

    pub fn candidates(&self, word: &str) -> &[GlossCandidate] {
        self.by_word.get(word).map_or(&[], Vec::as_slice)
    }

    /// Whether the pool holds anything beyond old-inventory glosses.
    pub fn has_external(&self) -> bool {
        self.external
    }

    pub fn description(&self) -> &'static str {
        if self.external {
            "old-inventory glosses and external gloss list"
        } else {
            "old-inventory glosses only (weak reference point)"
        }
    }
}

/// Picks a gloss for every novel sense of a Subtask 1 prediction: the
/// candidate closest to the sense's first usage in corpus order. Words
/// with an empty pool are left out.
pub fn retrieve_glosses(
    subtask1: &Subtask1Prediction,
    corpus: &Corpus,
    provider: &dyn EmbeddingProvider,
    pool: &GlossCandidatePool,
) -> Result<Subtask2Prediction> {
    let inventories = build_inventories(&corpus.records);
    let mut prototypes: BTreeMap<&str, IndexMap<&str, &UsageRecord>> = BTreeMap::new();
    for r in corpus.records.iter().filter(|r| r.is_new()) {
        let Some(sense) = subtask1.get(&r.usage_id) else {
            continue;
        };
        if inventories.get(&r.word).is_some_and(|i| i.contains(sense)) {
            continue;
        }
        prototypes.entry(&r.word).or_default().entry(sense).or_insert(r);
    }

    let results: Vec<(&str, Vec<(&str, &str)>, Vec<Warning>)> = prototypes
        .par_iter()
        .map(|(word, senses)| {
            let mut warnings = Vec::new();
            let candidates = pool.candidates(word);
            if candidates.is_empty() {
                diag::push(
                    &mut warnings,
                    Warning::WordSkipped {
                        word: word.to_string(),
                        reason: "no gloss candidates".into(),
                    },
                );
                return (*word, Vec::new(), warnings);
            }
            let mut picks = Vec::new();
            for (sense, record) in senses {
                match pick(&record.example, candidates, provider) {
                    Ok(i) => picks.push((*sense, candidates[i].gloss.as_str())),
                    Err(e) => log::warn!("novel sense {word}/{sense} left without gloss: {e}"),
                }
            }
            (*word, picks, warnings)
        })
        .collect();

    let mut pred = Subtask2Prediction::default();
    for (word, picks, warnings) in results {
        pred.warnings.extend(warnings);
        for (sense, gloss) in picks {
            pred.insert(word, sense, gloss);
        }
    }
    Ok(pred)
}

fn pick(example: &str, candidates: &[GlossCandidate], provider: &dyn EmbeddingProvider) -> Result<usize> {
    let v = get_sentence(provider, example)?;
    let mut best = (0, f64::NEG_INFINITY);
    for (i, c) in candidates.iter().enumerate() {
        let s = cosine(&v, &c.embedding)?;
        if s > best.1 {
            best = (i, s);
        }
    }
    Ok(best.0)
}
