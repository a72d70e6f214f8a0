//! Evaluation harness and baselines for diachronic novel-sense detection
//! (Subtask 1) and novel-sense definition (Subtask 2).
//!
//! - [`corpus`]: the nine-column usage TSV, sense inventories, statistics
//!   and submission files.
//! - [`metrics`]: ARI, macro-F1, sentence BLEU, BERTScore over token
//!   vectors, and greedy explanation alignment.
//! - [`embeddings`]: file-backed and remote embedding providers.
//! - [`scoring`]: per-word and aggregate scoring of both subtasks.
//! - [`baseline`]: affinity-propagation sense mapping and gloss retrieval.

pub mod baseline;
pub mod corpus;
pub mod diag;
pub mod embeddings;
mod error;
pub mod metrics;
pub mod scoring;

pub use corpus::{Corpus, ParseMode, Period, UsageRecord};
pub use diag::Warning;
pub use embeddings::{EmbeddingProvider, EmbeddingStore};
pub use error::{Error, Result};
