//! Sentence vectors and token-vector sequences from a JSONL file store or a
//! remote embedding service.

mod hashed;
mod service;
mod store;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::metrics::TokenEmbeddingSeq;

pub use hashed::HashedEmbedder;
pub use service::{EmbeddingService, ServiceConfig, DEFAULT_TIMEOUT_SECS};
pub use store::{load_store, quantize, EmbeddingStore, FORMAT_NAME, FORMAT_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    Sentence,
    Tokens,
}

impl Granularity {
    pub fn as_str(self) -> &'static str {
        match self {
            Granularity::Sentence => "sentence",
            Granularity::Tokens => "tokens",
        }
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Granularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sentence" => Ok(Granularity::Sentence),
            "tokens" => Ok(Granularity::Tokens),
            other => Err(Error::Format(format!("unknown granularity '{other}'"))),
        }
    }
}

/// Exact text plus granularity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EmbeddingKey {
    pub text: String,
    pub granularity: Granularity,
}

impl EmbeddingKey {
    pub fn new(text: impl Into<String>, granularity: Granularity) -> Result<Self> {
        let text = text.into();
        if text.is_empty() {
            return Err(Error::InvalidArgument("cannot embed empty text".into()));
        }
        Ok(EmbeddingKey { text, granularity })
    }

    pub fn sentence(text: impl Into<String>) -> Result<Self> {
        Self::new(text, Granularity::Sentence)
    }

    pub fn tokens(text: impl Into<String>) -> Result<Self> {
        Self::new(text, Granularity::Tokens)
    }

    pub(crate) fn missing(&self) -> Error {
        Error::MissingEmbedding {
            hash: text_hash(&self.text),
            granularity: self.granularity.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Embedding {
    Sentence(Vec<f64>),
    Tokens(TokenEmbeddingSeq),
}

impl Embedding {
    pub fn dim(&self) -> usize {
        match self {
            Embedding::Sentence(v) => v.len(),
            Embedding::Tokens(t) => t.dim(),
        }
    }

    pub fn granularity(&self) -> Granularity {
        match self {
            Embedding::Sentence(_) => Granularity::Sentence,
            Embedding::Tokens(_) => Granularity::Tokens,
        }
    }
}

/// Short SHA-256 hex digest used to name texts in error messages.
pub fn text_hash(text: &str) -> String {
    hex::encode(&Sha256::digest(text.as_bytes())[..8])
}

/// Anything that can turn text into vectors.
///
/// Implementations must be deterministic per key for their lifetime.
pub trait EmbeddingProvider: Send + Sync {
    fn sentence(&self, text: &str) -> Result<Vec<f64>>;

    fn tokens(&self, text: &str) -> Result<TokenEmbeddingSeq>;

    /// Model identifier the vectors came from.
    fn provenance(&self) -> String;

    /// Hint that these texts will be requested soon. Remote providers batch
    /// them into few requests.
    fn prefetch(&self, _texts: &[&str], _granularity: Granularity) -> Result<()> {
        Ok(())
    }
}

pub fn get_sentence(provider: &dyn EmbeddingProvider, text: &str) -> Result<Vec<f64>> {
    EmbeddingKey::sentence(text)?;
    provider.sentence(text)
}

pub fn get_tokens(provider: &dyn EmbeddingProvider, text: &str) -> Result<TokenEmbeddingSeq> {
    EmbeddingKey::tokens(text)?;
    provider.tokens(text)
}

pub(crate) fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub(crate) fn norm(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

/// Cosine similarity, clamped to [-1, 1]. A zero vector on either side
/// gives 0.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    let denom = norm(u) * norm(v);
    if denom == 0.0 {
        log::warn!("{}", crate::diag::Warning::ZeroVector);
        return Ok(0.0);
    }
    Ok((dot(u, v) / denom).clamp(-1.0, 1.0))
}
