//! Clustering baseline for Subtask 1 and a retrieval baseline for Subtask 2.

mod ap;
mod subtask1;
mod subtask2;

pub use ap::{affinity_propagation, ApConfig, ApResult, Preference};
pub use subtask1::{
    build_sense_texts, run_baseline, BaselineConfig, BaselineRun, Cluster, ClusterAssignment,
    PrototypeMode, DEFAULT_THRESHOLD,
};
pub use subtask2::{
    parse_gloss_list, parse_gloss_list_str, retrieve_glosses, GlossCandidate, GlossCandidatePool,
    GlossList,
};
