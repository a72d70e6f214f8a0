use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};

use semshift::baseline::{
    parse_gloss_list, retrieve_glosses, run_baseline, ApConfig, BaselineConfig, GlossCandidatePool,
    Preference, PrototypeMode,
};
use semshift::corpus::{
    apply_subtask1, apply_subtask2, compute_stats, parse_corpus_str, parse_subtask1_prediction_str,
    parse_subtask2_prediction_str, to_tsv, Corpus, ParseMode,
};
use semshift::embeddings::{load_store, EmbeddingService, ServiceConfig};
use semshift::scoring::{
    combine_reports, fingerprint, parse_key_values, score_subtask1, score_subtask2, ScoreReport,
    Subtask2Options,
};
use semshift::EmbeddingProvider;

use crate::args::{Command, EmbeddingArgs, Format, Mode, Prototype, ReportOutput};
use crate::UsageError;

pub const ENV_EMB_URL: &str = "SEMSHIFT_EMB_URL";

/// File text plus its SHA-256.
struct Input {
    text: String,
    sha256: String,
}

fn read_input(path: &Path) -> Result<Input> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let sha256 = fingerprint(&bytes);
    let text = String::from_utf8(bytes)
        .map_err(|_| semshift::Error::Format("file is not valid UTF-8".into()))
        .with_context(|| path.display().to_string())?;
    Ok(Input { text, sha256 })
}

fn read_corpus(path: &Path, mode: ParseMode) -> Result<(Corpus, String)> {
    let input = read_input(path)?;
    let corpus = parse_corpus_str(&input.text, mode).with_context(|| path.display().to_string())?;
    Ok((corpus, input.sha256))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn open_provider(args: &EmbeddingArgs) -> Result<Box<dyn EmbeddingProvider>> {
    let url = args.emb_url.clone().or_else(|| {
        if args.emb_file.is_some() {
            return None;
        }
        env::var(ENV_EMB_URL).ok().filter(|u| !u.trim().is_empty())
    });
    match (&args.emb_file, url) {
        (Some(_), Some(_)) => Err(UsageError("give either --emb-file or --emb-url, not both".into()).into()),
        (None, None) => Err(UsageError(format!(
            "an embedding source is required: --emb-file, --emb-url or {ENV_EMB_URL}"
        ))
        .into()),
        (Some(file), None) => {
            let store = load_store(file).with_context(|| file.display().to_string())?;
            Ok(Box::new(store))
        }
        (None, Some(url)) => {
            let mut config = ServiceConfig::new(url);
            config.timeout = Duration::from_secs(args.emb_timeout);
            config.cache_path = args.emb_cache.clone();
            Ok(Box::new(EmbeddingService::new(config)?))
        }
    }
}

fn emit_report(report: &ScoreReport, output: &ReportOutput) -> Result<()> {
    let kv = report.to_key_values();
    print!("{kv}");
    if let Some(out) = &output.out {
        write(out, &kv)?;
    }
    if let Some(details) = &output.details {
        write(details, &report.details_tsv())?;
    }
    Ok(())
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(path, &text)
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Validate { input, mode } => {
            let mode = match mode {
                Mode::Gold => ParseMode::Gold,
                Mode::Test => ParseMode::Test,
            };
            let (corpus, sha) = read_corpus(&input, mode)?;
            let words = corpus.word_index().len();
            println!("records\t{}", corpus.records.len());
            println!("words\t{words}");
            println!("warnings\t{}", corpus.warnings.len());
            println!("sha256\t{sha}");
        }
        Command::Stats { input, format, out } => {
            let mut records = Vec::new();
            let mut text = String::new();
            for path in &input {
                let (corpus, sha) = read_corpus(path, ParseMode::Permissive)?;
                text.push_str(&format!("# input\t{}\t{sha}\n", path.display()));
                records.extend(corpus.records);
            }
            let stats = compute_stats(&records);
            match format {
                Format::Kv => text.push_str(&stats.to_key_values()),
                Format::Table => {
                    let label = input
                        .iter()
                        .map(|p| p.display().to_string())
                        .collect::<Vec<_>>()
                        .join(" + ");
                    text = stats.to_table(&label);
                }
            }
            print!("{text}");
            if let Some(out) = out {
                write(&out, &text)?;
            }
        }
        Command::Score1 { gold, pred, output } => {
            let (gold_corpus, gold_sha) = read_corpus(&gold, ParseMode::Gold)?;
            let pred_input = read_input(&pred)?;
            let prediction = parse_subtask1_prediction_str(&pred_input.text, Some(&gold_corpus))
                .with_context(|| pred.display().to_string())?;
            let mut report = score_subtask1(&gold_corpus, &prediction)?;
            report.metadata.insert("gold_sha256".into(), gold_sha);
            report.metadata.insert("pred_sha256".into(), pred_input.sha256);
            emit_report(&report, &output)?;
        }
        Command::Score2 {
            gold,
            pred,
            emb,
            penalty,
            output,
        } => {
            let provider = open_provider(&emb)?;
            let (gold_corpus, gold_sha) = read_corpus(&gold, ParseMode::Gold)?;
            let pred_input = read_input(&pred)?;
            let prediction = parse_subtask2_prediction_str(&pred_input.text, Some(&gold_corpus))
                .with_context(|| pred.display().to_string())?;
            let mut report = score_subtask2(&gold_corpus, &prediction, &*provider, Subtask2Options { penalty })?;
            report.metadata.insert("gold_sha256".into(), gold_sha);
            report.metadata.insert("pred_sha256".into(), pred_input.sha256);
            emit_report(&report, &output)?;
        }
        Command::Baseline1 {
            input,
            emb,
            threshold,
            damping,
            max_iter,
            convergence_window,
            preference,
            prototype,
            out,
        } => {
            let config = BaselineConfig {
                threshold,
                ap: ApConfig {
                    damping,
                    max_iterations: max_iter,
                    convergence_window,
                    preference: preference.map_or(Preference::Median, Preference::Fixed),
                },
                prototype: match prototype {
                    Prototype::First => PrototypeMode::FirstExample,
                    Prototype::Centroid => PrototypeMode::Centroid,
                },
            };
            config
                .ap
                .validate()
                .map_err(|e| UsageError(e.to_string()))?;
            let provider = open_provider(&emb)?;
            let (corpus, sha) = read_corpus(&input, ParseMode::Test)?;
            let run = run_baseline(&corpus, &*provider, &config)?;
            write(&out, &to_tsv(&apply_subtask1(&corpus.records, &run.prediction)))?;
            let mut meta = run.metadata(&config, &provider.provenance());
            meta["input_sha256"] = sha.into();
            write_json(&sidecar_path(&out), &meta)?;
            println!(
                "labelled\t{}\nwords\t{}\nskipped\t{}\nthreshold\t{:.4}",
                run.prediction.labels.len(),
                run.assignments.len(),
                run.skipped.len(),
                threshold
            );
        }
        Command::Baseline2 {
            input,
            pred,
            emb,
            gloss_list,
            out,
        } => {
            let provider = open_provider(&emb)?;
            let (corpus, sha) = read_corpus(&input, ParseMode::Test)?;
            let pred_input = read_input(&pred)?;
            let subtask1 = parse_subtask1_prediction_str(&pred_input.text, Some(&corpus))
                .with_context(|| pred.display().to_string())?;
            let list = gloss_list.as_deref().map(parse_gloss_list).transpose()?;
            let pool = GlossCandidatePool::build(&corpus, list.as_ref(), &*provider)?;
            let glosses = retrieve_glosses(&subtask1, &corpus, &*provider, &pool)?;
            let records = apply_subtask2(&apply_subtask1(&corpus.records, &subtask1), &glosses);
            write(&out, &to_tsv(&records))?;
            let senses: usize = glosses.glosses.values().map(|s| s.len()).sum();
            let meta = serde_json::json!({
                "pool": pool.description(),
                "gloss_list": gloss_list.map(|p| p.display().to_string()),
                "provenance": provider.provenance(),
                "input_sha256": sha,
                "pred_sha256": pred_input.sha256,
                "words": glosses.glosses.len(),
                "senses": senses,
            });
            write_json(&sidecar_path(&out), &meta)?;
            println!("words\t{}\nsenses\t{senses}", glosses.glosses.len());
        }
        Command::Combine { reports, out } => {
            let mut parsed = Vec::new();
            let mut text = String::new();
            for path in &reports {
                let input = read_input(path)?;
                text.push_str(&format!("# report\t{}\t{}\n", path.display(), input.sha256));
                parsed.push(parse_key_values(&input.text).with_context(|| path.display().to_string())?);
            }
            for (k, v) in combine_reports(&parsed)? {
                text.push_str(&format!("{k}\t{v:.4}\n"));
            }
            print!("{text}");
            if let Some(out) = out {
                write(&out, &text)?;
            }
        }
    }
    Ok(())
}
