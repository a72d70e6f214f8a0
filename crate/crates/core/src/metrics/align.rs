use serde::Serialize;

use super::{bertscore_f1, TokenEmbeddingSeq};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlignedPair {
    pub target: usize,
    pub hypothesis: usize,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct AlignmentResult {
    /// Pairs in the order they were picked.
    pub pairs: Vec<AlignedPair>,
    /// Sum of pair scores divided by the number of pairs, 0 with no pairs.
    pub mean_score: f64,
}

/// Greedy one-to-one matching on a precomputed `targets x hypotheses` score
/// matrix: repeatedly take the best remaining pair and retire both sides.
/// Ties go to the lowest target index, then the lowest hypothesis index.
pub fn greedy_align_matrix(scores: &[Vec<f64>]) -> AlignmentResult {
    let n_targets = scores.len();
    let n_hyps = scores.first().map_or(0, Vec::len);
    let mut target_used = vec![false; n_targets];
    let mut hyp_used = vec![false; n_hyps];
    let mut pairs = Vec::with_capacity(n_targets.min(n_hyps));

    for _ in 0..n_targets.min(n_hyps) {
        let mut best: Option<(usize, usize, f64)> = None;
        for (t, row) in scores.iter().enumerate() {
            if target_used[t] {
                continue;
            }
            for (h, &s) in row.iter().enumerate() {
                if hyp_used[h] {
                    continue;
                }
                if best.is_none_or(|(_, _, b)| s > b) {
                    best = Some((t, h, s));
                }
            }
        }
        let (t, h, s) = best.expect("both sides still have items");
        target_used[t] = true;
        hyp_used[h] = true;
        pairs.push(AlignedPair {
            target: t,
            hypothesis: h,
            score: s,
        });
    }

    let mean_score = if pairs.is_empty() {
        0.0
    } else {
        pairs.iter().map(|p| p.score).sum::<f64>() / pairs.len() as f64
    };
    AlignmentResult { pairs, mean_score }
}

/// Aligns target explanations with predicted ones by BERTScore F1, where
/// each hypothesis is scored against the target as reference.
pub fn greedy_align(
    targets: &[TokenEmbeddingSeq],
    hypotheses: &[TokenEmbeddingSeq],
) -> Result<AlignmentResult> {
    if targets.is_empty() {
        return Err(Error::InvalidArgument("alignment needs at least one target".into()));
    }
    let scores = targets
        .iter()
        .map(|t| hypotheses.iter().map(|h| bertscore_f1(h, t)).collect())
        .collect::<Result<Vec<Vec<f64>>>>()?;
    if hypotheses.is_empty() {
        return Ok(AlignmentResult::default());
    }
    Ok(greedy_align_matrix(&scores))
}
