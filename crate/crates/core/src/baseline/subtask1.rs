use std::collections::{BTreeMap, HashSet};

use indexmap::IndexMap;
use rayon::prelude::*;
use serde::Serialize;

use super::ap::{affinity_propagation, ApConfig};
use crate::corpus::{build_inventories, Corpus, SenseInventory, Subtask1Prediction, UsageRecord};
use crate::diag::{self, Warning};
use crate::embeddings::{cosine, get_sentence, EmbeddingProvider, Granularity};
use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrototypeMode {
    /// The cluster member that comes first in the corpus.
    #[default]
    FirstExample,
    /// Mean of the member embeddings.
    Centroid,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BaselineConfig {
    pub threshold: f64,
    pub ap: ApConfig,
    pub prototype: PrototypeMode,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            threshold: DEFAULT_THRESHOLD,
            ap: ApConfig::default(),
            prototype: PrototypeMode::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    /// Usage ids in corpus order.
    pub members: Vec<String>,
    pub exemplar: String,
    /// First member in corpus order.
    pub prototype: String,
    /// Most similar old sense and its cosine to the prototype.
    pub best_sense: Option<(String, f64)>,
    pub sense_id: String,
    pub novel: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterAssignment {
    pub word: String,
    pub clusters: Vec<Cluster>,
    /// Cluster index per new-period usage id.
    pub cluster_of: BTreeMap<String, usize>,
    pub converged: bool,
}

#[derive(Debug, Clone, Default)]
pub struct BaselineRun {
    pub prediction: Subtask1Prediction,
    /// One per processed word, in word order.
    pub assignments: Vec<ClusterAssignment>,
    /// Words left out of the prediction, with the reason.
    pub skipped: Vec<(String, String)>,
    pub warnings: Vec<Warning>,
}

impl BaselineRun {
    /// Run summary for the metadata sidecar.
    pub fn metadata(&self, config: &BaselineConfig, provenance: &str) -> serde_json::Value {
        let clusters: usize = self.assignments.iter().map(|a| a.clusters.len()).sum();
        let novel: usize = self
            .assignments
            .iter()
            .flat_map(|a| &a.clusters)
            .filter(|c| c.novel)
            .count();
        let non_converged: Vec<&str> = self
            .assignments
            .iter()
            .filter(|a| !a.converged)
            .map(|a| a.word.as_str())
            .collect();
        serde_json::json!({
            "threshold": config.threshold,
            "ap": config.ap,
            "similarity": "cosine",
            "prototype": config.prototype,
            "provenance": provenance,
            "words_processed": self.assignments.len(),
            "words_skipped": self.skipped.iter().map(|(w, r)| serde_json::json!({"word": w, "reason": r})).collect::<Vec<_>>(),
            "non_converged_words": non_converged,
            "clusters": clusters,
            "novel_clusters": novel,
        })
    }
}

/// Gloss followed by the old example texts, space separated.
pub fn build_sense_texts(inventory: &SenseInventory) -> (IndexMap<String, String>, Vec<Warning>) {
    let mut warnings = Vec::new();
    let texts = inventory
        .senses
        .iter()
        .map(|(id, sense)| {
            let gloss = sense.gloss.trim();
            if gloss.is_empty() {
                diag::push(
                    &mut warnings,
                    Warning::EmptyGloss {
                        word: inventory.word.clone(),
                        sense_id: id.clone(),
                    },
                );
            }
            let text = std::iter::once(gloss)
                .chain(sense.example_texts.iter().map(|e| e.trim()))
                .filter(|t| !t.is_empty())
                .collect::<Vec<_>>()
                .join(" ");
            (id.clone(), text)
        })
        .collect();
    (texts, warnings)
}

/// Clusters the new-period usages of every word and maps each cluster to
/// an old sense or a fresh novel id. Words whose texts cannot be embedded
/// are skipped and reported.
pub fn run_baseline(
    corpus: &Corpus,
    provider: &dyn EmbeddingProvider,
    config: &BaselineConfig,
) -> Result<BaselineRun> {
    config.ap.validate()?;
    if !config.threshold.is_finite() {
        return Err(Error::InvalidArgument("threshold must be finite".into()));
    }
    let inventories = build_inventories(&corpus.records);
    let empty = SenseInventory::default();
    let words: Vec<(&str, Vec<&UsageRecord>)> = corpus
        .word_index()
        .into_iter()
        .map(|(w, idx)| {
            let new = idx
                .into_iter()
                .map(|i| &corpus.records[i])
                .filter(|r| r.is_new())
                .collect::<Vec<_>>();
            (w, new)
        })
        .filter(|(_, new)| !new.is_empty())
        .collect();

    let texts: Vec<&str> = words
        .iter()
        .flat_map(|(_, new)| new.iter().map(|r| r.example.as_str()))
        .collect();
    if let Err(e) = provider.prefetch(&texts, Granularity::Sentence) {
        log::warn!("prefetch of usage embeddings failed: {e}");
    }

    let outcomes: Vec<(String, Result<ClusterAssignment>, Vec<Warning>)> = words
        .par_iter()
        .map(|(word, new)| {
            let inventory = inventories.get(word).unwrap_or(&empty);
            let mut warnings = Vec::new();
            let result = process_word(word, new, inventory, provider, config, &mut warnings);
            (word.to_string(), result, warnings)
        })
        .collect();

    let mut run = BaselineRun::default();
    for (word, result, warnings) in outcomes {
        run.warnings.extend(warnings);
        match result {
            Ok(assignment) => {
                for (usage, &c) in &assignment.cluster_of {
                    run.prediction
                        .insert(&word, usage, &assignment.clusters[c].sense_id);
                }
                run.assignments.push(assignment);
            }
            Err(e) => {
                let reason = e.to_string();
                diag::push(
                    &mut run.warnings,
                    Warning::WordSkipped {
                        word: word.clone(),
                        reason: reason.clone(),
                    },
                );
                run.skipped.push((word, reason));
            }
        }
    }
    Ok(run)
}

fn process_word(
    word: &str,
    new: &[&UsageRecord],
    inventory: &SenseInventory,
    provider: &dyn EmbeddingProvider,
    config: &BaselineConfig,
    warnings: &mut Vec<Warning>,
) -> Result<ClusterAssignment> {
    let (sense_texts, w) = build_sense_texts(inventory);
    warnings.extend(w);
    let mut senses: Vec<(&str, Vec<f64>)> = Vec::new();
    for (id, text) in &sense_texts {
        if text.is_empty() {
            log::warn!("sense {word}/{id} has neither gloss nor examples, not a mapping target");
            continue;
        }
        let v = get_sentence(provider, text).map_err(|e| e.context(format!("sense text of {word}/{id}")))?;
        senses.push((id, v));
    }
    let vectors = new
        .iter()
        .map(|r| get_sentence(provider, &r.example).map_err(|e| e.context(format!("usage '{}'", r.usage_id))))
        .collect::<Result<Vec<_>>>()?;

    let n = vectors.len();
    let mut sim = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in i..n {
            let c = cosine(&vectors[i], &vectors[k])?;
            sim[i][k] = c;
            sim[k][i] = c;
        }
    }
    let ap = affinity_propagation(&sim, &config.ap)?;
    if !ap.converged {
        diag::push(
            warnings,
            Warning::NonConvergence {
                word: Some(word.to_string()),
            },
        );
    }

    let old_ids: HashSet<&str> = inventory.senses.keys().map(String::as_str).collect();
    let mut next_novel = 0usize;
    let mut clusters = Vec::new();
    let mut cluster_of = BTreeMap::new();
    for (c, members) in ap.clusters().into_iter().enumerate() {
        let prototype_vec = match config.prototype {
            PrototypeMode::FirstExample => vectors[members[0]].clone(),
            PrototypeMode::Centroid => centroid(members.iter().map(|&i| vectors[i].as_slice())),
        };
        let mut best: Option<(&str, f64)> = None;
        for (id, v) in &senses {
            let s = cosine(&prototype_vec, v)?;
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((id, s));
            }
        }
        let mapped = best.filter(|(_, s)| *s >= config.threshold);
        let sense_id = match mapped {
            Some((id, _)) => id.to_string(),
            None => loop {
                let candidate = format!("{word}_novel_{next_novel}");
                next_novel += 1;
                if !old_ids.contains(candidate.as_str()) {
                    break candidate;
                }
            },
        };
        for &i in &members {
            cluster_of.insert(new[i].usage_id.clone(), c);
        }
        clusters.push(Cluster {
            members: members.iter().map(|&i| new[i].usage_id.clone()).collect(),
            exemplar: new[ap.exemplar_of[members[0]]].usage_id.clone(),
            prototype: new[members[0]].usage_id.clone(),
            best_sense: best.map(|(id, s)| (id.to_string(), s)),
            sense_id,
            novel: mapped.is_none(),
        });
    }
    Ok(ClusterAssignment {
        word: word.to_string(),
        clusters,
        cluster_of,
        converged: ap.converged,
    })
}

fn centroid<'a>(vectors: impl Iterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut sum: Vec<f64> = Vec::new();
    let mut n = 0usize;
    for v in vectors {
        if sum.is_empty() {
            sum = vec![0.0; v.len()];
        }
        sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
        n += 1;
    }
    sum.iter_mut().for_each(|s| *s /= n as f64);
    sum
}
