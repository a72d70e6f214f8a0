//! JSON-lines embedding file.
//!
//! The first line is a header
//! `{"format":"semshift-emb","version":1,"dim":D,"provenance":"..."}`; each
//! following line holds one record
//! `{"text":..,"granularity":"sentence"|"tokens","dim":D,"tokens":[..]|null,"vectors":[[..]]}`.
//! Floats are written with 9 significant digits.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde::Deserialize;

use super::{Embedding, EmbeddingKey, EmbeddingProvider, Granularity};
use crate::diag::{self, Warning};
use crate::error::{Error, Result};
use crate::metrics::TokenEmbeddingSeq;

pub const FORMAT_NAME: &str = "semshift-emb";
pub const FORMAT_VERSION: u32 = 1;

/// Rounds to the value a write/load cycle produces.
pub fn quantize(x: f64) -> f64 {
    format_float(x).parse().expect("formatted float parses")
}

fn format_float(x: f64) -> String {
    format!("{x:.8e}")
}

#[derive(Deserialize)]
struct Header {
    format: String,
    version: u32,
    dim: usize,
    provenance: String,
}

#[derive(Deserialize)]
struct Record {
    text: String,
    granularity: Granularity,
    dim: usize,
    tokens: Option<Vec<String>>,
    vectors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct EmbeddingStore {
    dim: usize,
    provenance: String,
    entries: HashMap<EmbeddingKey, Embedding>,
    pub warnings: Vec<Warning>,
}

impl EmbeddingStore {
    pub fn new(dim: usize, provenance: impl Into<String>) -> Result<Self> {
        let provenance = provenance.into();
        if dim == 0 {
            return Err(Error::InvalidArgument("store dimension must be positive".into()));
        }
        if provenance.is_empty() {
            return Err(Error::InvalidArgument("store provenance must be non-empty".into()));
        }
        Ok(EmbeddingStore {
            dim,
            provenance,
            entries: HashMap::new(),
            warnings: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Inserts or replaces an entry. Returns true when the key was new.
    pub fn insert(&mut self, text: impl Into<String>, embedding: Embedding) -> Result<bool> {
        if embedding.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: embedding.dim(),
            });
        }
        let key = EmbeddingKey::new(text, embedding.granularity())?;
        Ok(self.entries.insert(key, embedding).is_none())
    }

    pub fn get(&self, key: &EmbeddingKey) -> Option<&Embedding> {
        self.entries.get(key)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&EmbeddingKey, &Embedding)> {
        self.entries.iter()
    }

    /// Fills the store from another provider for the given texts.
    pub fn export_from(
        provider: &dyn EmbeddingProvider,
        dim: usize,
        texts: &[&str],
        granularities: &[Granularity],
    ) -> Result<Self> {
        let mut store = EmbeddingStore::new(dim, provider.provenance())?;
        for &g in granularities {
            provider.prefetch(texts, g)?;
            for &t in texts {
                let emb = match g {
                    Granularity::Sentence => Embedding::Sentence(provider.sentence(t)?),
                    Granularity::Tokens => Embedding::Tokens(provider.tokens(t)?),
                };
                store.insert(t, emb)?;
            }
        }
        Ok(store)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, first) = lines
            .find(|(_, l)| !l.trim().is_empty())
            .ok_or_else(|| Error::Format("embedding file is empty".into()))?;
        let header: Header = serde_json::from_str(first)
            .map_err(|e| Error::Format(format!("line 1: bad embedding header: {e}")))?;
        if header.format != FORMAT_NAME || header.version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported embedding file {} v{}",
                header.format, header.version
            )));
        }
        let mut store = EmbeddingStore::new(header.dim, header.provenance)?;
        for (line, raw) in lines {
            if raw.trim().is_empty() {
                continue;
            }
            let rec: Record = serde_json::from_str(raw)
                .map_err(|e| Error::Format(format!("line {line}: {e}")))?;
            let embedding = record_embedding(rec.granularity, rec.tokens, rec.vectors, rec.dim)
                .and_then(|e| {
                    if rec.dim != store.dim {
                        Err(Error::DimensionMismatch {
                            expected: store.dim,
                            found: rec.dim,
                        })
                    } else {
                        Ok(e)
                    }
                })
                .map_err(|e| Error::Format(format!("line {line}: {e}")))?;
            let is_new = store
                .insert(rec.text, embedding)
                .map_err(|e| Error::Format(format!("line {line}: {e}")))?;
            if !is_new {
                diag::push(&mut store.warnings, Warning::DuplicateEmbedding { line });
            }
        }
        Ok(store)
    }

    pub fn header_line(dim: usize, provenance: &str) -> String {
        serde_json::json!({
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "dim": dim,
            "provenance": provenance,
        })
        .to_string()
    }

    /// Serializes one record without a trailing newline.
    pub fn record_line(text: &str, embedding: &Embedding) -> String {
        let mut out = String::new();
        let text_json = serde_json::to_string(text).expect("string serializes");
        let _ = write!(
            out,
            "{{\"text\":{text_json},\"granularity\":\"{}\",\"dim\":{},\"tokens\":",
            embedding.granularity(),
            embedding.dim()
        );
        let vectors: Vec<&[f64]> = match embedding {
            Embedding::Sentence(v) => {
                out.push_str("null");
                vec![v.as_slice()]
            }
            Embedding::Tokens(seq) => {
                out.push_str(&serde_json::to_string(seq.tokens()).expect("tokens serialize"));
                seq.vectors().iter().map(Vec::as_slice).collect()
            }
        };
        out.push_str(",\"vectors\":[");
        for (i, v) in vectors.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('[');
            for (j, x) in v.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format_float(*x));
            }
            out.push(']');
        }
        out.push_str("]}");
        out
    }

    /// Whole file contents, records sorted by granularity then text.
    pub fn to_jsonl(&self) -> String {
        let mut keys: Vec<&EmbeddingKey> = self.entries.keys().collect();
        keys.sort_by(|a, b| (a.granularity, &a.text).cmp(&(b.granularity, &b.text)));
        let mut out = Self::header_line(self.dim, &self.provenance);
        out.push('\n');
        for k in keys {
            out.push_str(&Self::record_line(&k.text, &self.entries[k]));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(self.to_jsonl().as_bytes())
            .map_err(|e| Error::io(path, e))
    }

    fn lookup(&self, key: EmbeddingKey) -> Result<&Embedding> {
        self.entries.get(&key).ok_or_else(|| key.missing())
    }
}

/// Builds an embedding from the wire shape shared by files and the service.
pub(crate) fn record_embedding(
    granularity: Granularity,
    tokens: Option<Vec<String>>,
    vectors: Vec<Vec<f64>>,
    dim: usize,
) -> Result<Embedding> {
    if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: v.len(),
        });
    }
    match granularity {
        Granularity::Sentence => {
            let mut vectors = vectors;
            if vectors.len() != 1 {
                return Err(Error::Format(format!(
                    "sentence record must hold exactly one vector, found {}",
                    vectors.len()
                )));
            }
            Ok(Embedding::Sentence(vectors.pop().expect("one vector")))
        }
        Granularity::Tokens => {
            let tokens = tokens
                .ok_or_else(|| Error::Format("token record without a token list".into()))?;
            Ok(Embedding::Tokens(TokenEmbeddingSeq::new(tokens, vectors)?))
        }
    }
}

pub fn load_store(path: impl AsRef<Path>) -> Result<EmbeddingStore> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    EmbeddingStore::parse_str(&text)
}

impl EmbeddingProvider for EmbeddingStore {
    fn sentence(&self, text: &str) -> Result<Vec<f64>> {
        match self.lookup(EmbeddingKey::sentence(text)?)? {
            Embedding::Sentence(v) => Ok(v.clone()),
            Embedding::Tokens(_) => unreachable!("key granularity matches entry"),
        }
    }

    fn tokens(&self, text: &str) -> Result<TokenEmbeddingSeq> {
        match self.lookup(EmbeddingKey::tokens(text)?)? {
            Embedding::Tokens(t) => Ok(t.clone()),
            Embedding::Sentence(_) => unreachable!("key granularity matches entry"),
        }
    }

    fn provenance(&self) -> String {
        self.provenance.clone()
    }
}
