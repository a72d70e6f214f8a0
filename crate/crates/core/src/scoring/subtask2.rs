use std::collections::BTreeMap;

use indexmap::IndexMap;
use rayon::prelude::*;

use super::{iou_penalty, mean, Aggregates, ScoreReport, WordScore};
use crate::corpus::{build_inventories, Corpus, Subtask2Prediction};
use crate::diag::{self, Warning};
use crate::embeddings::{EmbeddingProvider, Granularity};
use crate::error::{Error, Result};
use crate::metrics::{greedy_align, sentence_bleu, TokenEmbeddingSeq, BLEU_SIGNATURE};

#[derive(Debug, Clone, Copy, Default)]
pub struct Subtask2Options {
    /// Also report scores multiplied by the per-word inventory IoU.
    pub penalty: bool,
}

/// Senses of each word that occur in the new period but not in its old
/// inventory, with the gloss of their first occurrence.
pub fn gained_senses(gold: &Corpus) -> Result<BTreeMap<String, IndexMap<String, String>>> {
    let inventories = build_inventories(&gold.records);
    let mut gained: BTreeMap<String, IndexMap<String, String>> = BTreeMap::new();
    for r in gold.records.iter().filter(|r| r.is_new()) {
        let Some(sense) = &r.sense_id else {
            continue;
        };
        if inventories.get(&r.word).is_some_and(|i| i.contains(sense)) {
            continue;
        }
        let senses = gained.entry(r.word.clone()).or_default();
        if !senses.contains_key(sense) {
            let gloss = r.gloss.clone().filter(|g| !g.is_empty()).ok_or_else(|| {
                Error::Validation(format!("gained sense {}/{sense} has no gloss", r.word))
            })?;
            senses.insert(sense.clone(), gloss);
        }
    }
    Ok(gained)
}

/// Scores predicted glosses of gained senses.
///
/// Only words with gained senses in the gold data and at least one
/// predicted gained-sense gloss are scored; the others count against
/// coverage but not against the means. Predicted senses that belong to the
/// word's old inventory are not part of the answer and are dropped.
pub fn score_subtask2(
    gold: &Corpus,
    pred: &Subtask2Prediction,
    provider: &dyn EmbeddingProvider,
    options: Subtask2Options,
) -> Result<ScoreReport> {
    let inventories = build_inventories(&gold.records);
    let gained = gained_senses(gold)?;
    let mut warnings = Vec::new();

    for w in pred.glosses.keys() {
        if !gained.contains_key(w) {
            diag::push(&mut warnings, Warning::UnknownWord(w.clone()));
        }
    }

    let tasks: Vec<(&str, Vec<(&str, &str)>, Vec<(&str, &str)>)> = gained
        .iter()
        .map(|(word, senses)| {
            let targets = senses.iter().map(|(s, g)| (s.as_str(), g.as_str())).collect();
            let hyps = pred
                .glosses
                .get(word)
                .map(|p| {
                    p.iter()
                        .filter(|(s, _)| !inventories.get(word).is_some_and(|i| i.contains(s)))
                        .map(|(s, g)| (s.as_str(), g.as_str()))
                        .collect()
                })
                .unwrap_or_default();
            (word.as_str(), targets, hyps)
        })
        .collect();

    let mut texts: Vec<&str> = Vec::new();
    for (_, targets, hyps) in &tasks {
        if !hyps.is_empty() {
            texts.extend(targets.iter().chain(hyps).map(|(_, g)| *g));
        }
    }
    texts.sort_unstable();
    texts.dedup();
    provider.prefetch(&texts, Granularity::Tokens)?;

    let rows = tasks
        .par_iter()
        .map(|(word, targets, hyps)| score_word(word, targets, hyps, provider, options))
        .collect::<Result<Vec<WordScore>>>()?;

    let covered: Vec<&WordScore> = rows.iter().filter(|r| r.covered).collect();
    for r in rows.iter().filter(|r| !r.covered) {
        log::info!("word '{}' not covered by the submission", r.word);
    }
    let aggregates = Aggregates {
        bertscore: Some(mean(covered.iter().map(|r| r.bertscore))),
        bleu: Some(mean(covered.iter().map(|r| r.bleu))),
        coverage: Some(if rows.is_empty() {
            0.0
        } else {
            covered.len() as f64 / rows.len() as f64
        }),
        bertscore_iou: options
            .penalty
            .then(|| mean(covered.iter().map(|r| r.bertscore_iou))),
        bleu_iou: options.penalty.then(|| mean(covered.iter().map(|r| r.bleu_iou))),
        ..Default::default()
    };
    let mut report = ScoreReport::new("subtask2", rows, aggregates, warnings);
    report
        .metadata
        .insert("bleu_signature".into(), BLEU_SIGNATURE.into());
    report.metadata.insert(
        "bertscore".into(),
        "greedy token cosine F1, no idf, no rescaling".into(),
    );
    report.metadata.insert(
        "alignment".into(),
        "greedy max-BERTScore pairing, mean over formed pairs, ties to lowest index".into(),
    );
    report
        .metadata
        .insert("iou_penalty".into(), if options.penalty { "on" } else { "off" }.into());
    report
        .metadata
        .insert("provenance".into(), provider.provenance());
    Ok(report)
}

fn embed_all(
    word: &str,
    items: &[(&str, &str)],
    provider: &dyn EmbeddingProvider,
) -> Result<Vec<TokenEmbeddingSeq>> {
    items
        .iter()
        .map(|(sense, gloss)| {
            provider
                .tokens(gloss)
                .map_err(|e| e.context(format!("gloss of {word}/{sense}")))
        })
        .collect()
}

fn score_word(
    word: &str,
    targets: &[(&str, &str)],
    hyps: &[(&str, &str)],
    provider: &dyn EmbeddingProvider,
    options: Subtask2Options,
) -> Result<WordScore> {
    let mut row = WordScore {
        word: word.to_string(),
        n_gained_senses: targets.len(),
        n_pred_senses: hyps.len(),
        ..Default::default()
    };
    if hyps.is_empty() {
        return Ok(row);
    }
    let target_seqs = embed_all(word, targets, provider)?;
    let hyp_seqs = embed_all(word, hyps, provider)?;
    let alignment = greedy_align(&target_seqs, &hyp_seqs)?;

    let bleu = alignment
        .pairs
        .iter()
        .map(|p| sentence_bleu(hyps[p.hypothesis].1, targets[p.target].1))
        .sum::<f64>()
        / alignment.pairs.len() as f64;

    row.covered = true;
    row.n_pairs = alignment.pairs.len();
    row.bertscore = Some(alignment.mean_score);
    row.bleu = Some(bleu);
    if options.penalty {
        let iou = iou_penalty(targets.len(), row.n_pairs, hyps.len())?;
        row.bertscore_iou = Some(alignment.mean_score * iou);
        row.bleu_iou = Some(bleu * iou);
    }
    Ok(row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{parse_corpus_str, parse_subtask2_prediction_str, ParseMode, COLUMNS};
    use crate::embeddings::HashedEmbedder;

    fn tsv(rows: &[&str]) -> String {
        let mut t = COLUMNS.join("\t");
        for r in rows {
            t.push('\n');
            t.push_str(r);
        }
        t.push('\n');
        t
    }

    fn gold() -> Corpus {
        parse_corpus_str(
            &tsv(&[
                "o1\tw\t\ts1\told meaning\ta\t\t\told",
                "n1\tw\t\ts1\told meaning\tb\t\t\tnew",
                "n2\tw\t\tg1\ta bet on several outcomes\tc\t\t\tnew",
                "n3\tw\t\tg2\turgent mail\td\t\t\tnew",
                "n4\tw\t\tg2\turgent mail\te\t\t\tnew",
                "o2\tv\t\tt1\tsomething\tf\t\t\told",
                "n5\tv\t\tt1\tsomething\tg\t\t\tnew",
            ]),
            ParseMode::Gold,
        )
        .unwrap()
    }

    #[test]
    fn gained_sense_table() {
        let g = gained_senses(&gold()).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g["w"].len(), 2);
        assert_eq!(g["w"]["g2"], "urgent mail");
    }

    #[test]
    fn identity_scores_one() {
        let gold = gold();
        let pred = parse_subtask2_prediction_str(&gold.to_tsv(), None).unwrap();
        let h = HashedEmbedder::new(32);
        let r = score_subtask2(&gold, &pred, &h, Subtask2Options { penalty: true }).unwrap();
        let a = &r.aggregates;
        assert!((a.bertscore.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(a.bleu, Some(1.0));
        assert_eq!(a.coverage, Some(1.0));
        assert!((a.bertscore_iou.unwrap() - 1.0).abs() < 1e-12);
        // the old sense row in the submission is not counted as a prediction
        assert_eq!(r.row("w").unwrap().n_pred_senses, 2);
    }

    #[test]
    fn penalty_shrinks_oversized_inventory() {
        let gold = gold();
        let pred = tsv(&[
            "n2\tw\t\tx1\ta bet on several outcomes\tc\t\t\tnew",
            "n3\tw\t\tx2\turgent mail\td\t\t\tnew",
            "n4\tw\t\tx3\tsomething else\te\t\t\tnew",
            "n1\tw\t\tx4\tand more\tb\t\t\tnew",
        ]);
        let pred = parse_subtask2_prediction_str(&pred, None).unwrap();
        let h = HashedEmbedder::new(32);
        let r = score_subtask2(&gold, &pred, &h, Subtask2Options { penalty: true }).unwrap();
        let row = r.row("w").unwrap();
        assert_eq!(row.n_pairs, 2);
        assert!((row.bertscore.unwrap() - 1.0).abs() < 1e-12);
        assert!((row.bertscore_iou.unwrap() - 0.5).abs() < 1e-12);
        let off = score_subtask2(&gold, &pred, &h, Subtask2Options::default()).unwrap();
        assert_eq!(off.aggregates.bertscore_iou, None);
    }

    #[test]
    fn empty_submission() {
        let gold = gold();
        let h = HashedEmbedder::new(8);
        let r = score_subtask2(&gold, &Subtask2Prediction::default(), &h, Subtask2Options::default()).unwrap();
        assert_eq!(r.aggregates.coverage, Some(0.0));
        assert_eq!(r.aggregates.bertscore, Some(0.0));
    }

    #[test]
    fn missing_embedding_names_sense() {
        let gold = gold();
        let pred = parse_subtask2_prediction_str(&gold.to_tsv(), None).unwrap();
        let store = crate::embeddings::EmbeddingStore::new(8, "empty").unwrap();
        let err = score_subtask2(&gold, &pred, &store, Subtask2Options::default()).unwrap_err();
        assert!(err.to_string().contains("w/g1"), "{err}");
        assert!(!err.is_validation());
    }
}
