//! Scoring kernels: partition agreement, per-class F1, sentence BLEU and
//! token-embedding F1 with greedy set alignment.

mod align;
mod ari;
mod bertscore;
mod bleu;
mod f1;
mod labeling;

pub use align::{greedy_align, greedy_align_matrix, AlignedPair, AlignmentResult};
pub use ari::{adjusted_rand_index, ari_from_labels};
pub use bertscore::{bertscore_f1, bertscore_prf, TokenEmbeddingSeq};
pub use bleu::{sentence_bleu, tokenize, BLEU_SIGNATURE};
pub use f1::{macro_f1, macro_f1_from_labels};
pub use labeling::Labeling;
