use crate::embeddings::{dot, norm};
use crate::error::{Error, Result};

/// Tokens of one text with one contextual vector per token.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenEmbeddingSeq {
    tokens: Vec<String>,
    vectors: Vec<Vec<f64>>,
}

impl TokenEmbeddingSeq {
    pub fn new(tokens: Vec<String>, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if tokens.is_empty() || tokens.len() != vectors.len() {
            return Err(Error::InvalidArgument(format!(
                "token sequence needs matching non-empty tokens and vectors ({} vs {})",
                tokens.len(),
                vectors.len()
            )));
        }
        let dim = vectors[0].len();
        if dim == 0 {
            return Err(Error::InvalidArgument("zero-dimensional token vectors".into()));
        }
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument("non-finite token vector entry".into()));
            }
        }
        Ok(TokenEmbeddingSeq { tokens, vectors })
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }
}

/// Precision, recall and F1 of greedy token matching by cosine similarity.
/// No idf weighting and no baseline rescaling.
pub fn bertscore_prf(hyp: &TokenEmbeddingSeq, reference: &TokenEmbeddingSeq) -> Result<(f64, f64, f64)> {
    if hyp.dim() != reference.dim() {
        return Err(Error::DimensionMismatch {
            expected: reference.dim(),
            found: hyp.dim(),
        });
    }
    let hyp_norms: Vec<f64> = hyp.vectors.iter().map(|v| norm(v)).collect();
    let ref_norms: Vec<f64> = reference.vectors.iter().map(|v| norm(v)).collect();
    if hyp_norms.iter().chain(&ref_norms).any(|&n| n == 0.0) {
        log::warn!("zero token vector in BERTScore input, its similarities are 0");
    }

    let mut row_max = vec![f64::NEG_INFINITY; hyp.len()];
    let mut col_max = vec![f64::NEG_INFINITY; reference.len()];
    for (i, h) in hyp.vectors.iter().enumerate() {
        for (j, r) in reference.vectors.iter().enumerate() {
            let denom = hyp_norms[i] * ref_norms[j];
            let sim = if denom == 0.0 {
                0.0
            } else {
                (dot(h, r) / denom).clamp(-1.0, 1.0)
            };
            row_max[i] = row_max[i].max(sim);
            col_max[j] = col_max[j].max(sim);
        }
    }
    let precision = row_max.iter().sum::<f64>() / hyp.len() as f64;
    let recall = col_max.iter().sum::<f64>() / reference.len() as f64;
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok((precision, recall, f1))
}

pub fn bertscore_f1(hyp: &TokenEmbeddingSeq, reference: &TokenEmbeddingSeq) -> Result<f64> {
    bertscore_prf(hyp, reference).map(|(_, _, f)| f)
}
