use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "semshift",
    version,
    about = "Scoring and baselines for novel-sense detection and definition",
    after_help = "Exit status: 0 success, 1 invalid input data, 2 I/O or embedding provider failure, 64 bad invocation."
)]
pub struct Cli {
    /// Worker threads for per-word work (default: one per core).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a usage TSV against the nine-column format.
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Test)]
        mode: Mode,
    },
    /// Sample, word and sense counts of one or more usage TSVs.
    Stats {
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Kv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a Subtask 1 submission (ARI and macro-F1).
    Score1 {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[command(flatten)]
        output: ReportOutput,
    },
    /// Score a Subtask 2 submission (BERTScore, BLEU, coverage).
    Score2 {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[command(flatten)]
        emb: EmbeddingArgs,
        /// Also report scores multiplied by the sense-inventory IoU.
        #[arg(long)]
        penalty: bool,
        #[command(flatten)]
        output: ReportOutput,
    },
    /// Run the clustering baseline on a test corpus.
    Baseline1 {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        emb: EmbeddingArgs,
        #[arg(long, default_value_t = 0.3)]
        threshold: f64,
        #[arg(long, default_value_t = 0.9)]
        damping: f64,
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        #[arg(long, default_value_t = 15)]
        convergence_window: usize,
        /// Fixed AP preference instead of the median similarity.
        #[arg(long, allow_hyphen_values = true)]
        preference: Option<f64>,
        #[arg(long, value_enum, default_value_t = Prototype::First)]
        prototype: Prototype,
        /// Prediction TSV; run metadata goes to `<out>.meta.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Retrieve glosses for the novel senses of a Subtask 1 prediction.
    Baseline2 {
        #[arg(long)]
        input: PathBuf,
        /// Subtask 1 prediction, e.g. the output of baseline1.
        #[arg(long)]
        pred: PathBuf,
        #[command(flatten)]
        emb: EmbeddingArgs,
        /// Extra candidates, one `word<TAB>gloss` per line.
        #[arg(long)]
        gloss_list: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Average key-value reports (e.g. one per language).
    Combine {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ReportOutput {
    /// Write the key-value report here as well as to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-word scores as TSV.
    #[arg(long)]
    pub details: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmbeddingArgs {
    /// Embedding JSONL file.
    #[arg(long)]
    pub emb_file: Option<PathBuf>,
    /// Embedding service base URL. Falls back to SEMSHIFT_EMB_URL when
    /// neither --emb-file nor --emb-url is given.
    #[arg(long)]
    pub emb_url: Option<String>,
    /// Request timeout for the embedding service, in seconds.
    #[arg(long, env = "SEMSHIFT_EMB_TIMEOUT", default_value_t = semshift::embeddings::DEFAULT_TIMEOUT_SECS)]
    pub emb_timeout: u64,
    /// JSONL cache mirroring service responses.
    #[arg(long)]
    pub emb_cache: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Mode {
    Gold,
    Test,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Kv,
    Table,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Prototype {
    First,
    Centroid,
}
