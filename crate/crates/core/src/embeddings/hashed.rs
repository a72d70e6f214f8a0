use sha2::{Digest, Sha256};

use super::EmbeddingProvider;
use crate::error::{Error, Result};
use crate::metrics::{tokenize, TokenEmbeddingSeq};

/// Deterministic bag-of-tokens embedder with no model behind it.
///
/// Each token maps to a pseudo-random unit vector seeded by its hash;
/// sentences are the normalized sum of their token vectors. Equal texts get
/// equal vectors and texts sharing tokens get positive similarity, which is
/// enough for fixtures and smoke runs.
#[derive(Debug, Clone)]
pub struct HashedEmbedder {
    dim: usize,
}

impl HashedEmbedder {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        HashedEmbedder { dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn token_vector(&self, token: &str) -> Vec<f64> {
        let digest = Sha256::digest(token.as_bytes());
        let mut state = u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"));
        let mut v: Vec<f64> = (0..self.dim)
            .map(|_| {
                // splitmix64
                state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
                let mut z = state;
                z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
                z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
                z ^= z >> 31;
                (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
            })
            .collect();
        normalize(&mut v);
        v
    }

    fn split(&self, text: &str) -> Result<Vec<String>> {
        if text.is_empty() {
            return Err(Error::InvalidArgument("cannot embed empty text".into()));
        }
        let tokens = tokenize(text);
        Ok(if tokens.is_empty() {
            vec![text.to_string()]
        } else {
            tokens
        })
    }
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

impl EmbeddingProvider for HashedEmbedder {
    fn sentence(&self, text: &str) -> Result<Vec<f64>> {
        let mut sum = vec![0.0; self.dim];
        for t in self.split(text)? {
            for (s, x) in sum.iter_mut().zip(self.token_vector(&t)) {
                *s += x;
            }
        }
        normalize(&mut sum);
        Ok(sum)
    }

    fn tokens(&self, text: &str) -> Result<TokenEmbeddingSeq> {
        let tokens = self.split(text)?;
        let vectors = tokens.iter().map(|t| self.token_vector(t)).collect();
        TokenEmbeddingSeq::new(tokens, vectors)
    }

    fn provenance(&self) -> String {
        format!("hashed-bag-of-tokens/d={}", self.dim)
    }
}
