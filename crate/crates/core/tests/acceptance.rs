//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). It exits non-zero on a FAIL
//! only when `SEMSHIFT_ACCEPTANCE_STRICT=1`; otherwise the lines are the
//! verdict. The corpus-statistics check reads the published test splits
//! from the directory in `AXOLOTL_DATA`.

mod common;

use std::collections::BTreeSet;
use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semshift::baseline::{affinity_propagation, run_baseline, ApConfig, BaselineConfig};
use semshift::corpus::{
    compute_stats, parse_corpus, parse_corpus_str, parse_subtask1_prediction_str,
    parse_subtask2_prediction_str, ParseMode, Subtask2Prediction,
};
use semshift::embeddings::HashedEmbedder;
use semshift::metrics::{ari_from_labels, greedy_align, greedy_align_matrix, TokenEmbeddingSeq};
use semshift::scoring::{score_subtask1, score_subtask2, Subtask2Options};

use common::{cosine_matrix, fixture_path, planted_corpus, planted_groups, tsv};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

/// All set partitions of `n` items as restricted growth strings.
fn partitions(n: usize) -> Vec<Vec<u8>> {
    fn grow(prefix: &mut Vec<u8>, max: u8, n: usize, out: &mut Vec<Vec<u8>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for b in 0..=max + 1 {
            prefix.push(b);
            grow(prefix, max.max(b), n, out);
            prefix.pop();
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    grow(&mut vec![0], 0, n, &mut out);
    out
}

/// ARI from the four pair counts, enumerating every item pair.
fn ari_pair_counting(a: &[u8], b: &[u8]) -> f64 {
    let (mut n11, mut n10, mut n01, mut n00) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            match (a[i] == a[j], b[i] == b[j]) {
                (true, true) => n11 += 1.0,
                (true, false) => n10 += 1.0,
                (false, true) => n01 += 1.0,
                (false, false) => n00 += 1.0,
            }
        }
    }
    let den = (n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11);
    if den == 0.0 {
        return 1.0;
    }
    2.0 * (n00 * n11 - n01 * n10) / den
}

fn ari_oracle() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut compared = 0usize;
    for n in 1..=7 {
        let parts = partitions(n);
        for a in &parts {
            for b in &parts {
                let d = (ari_from_labels(a, b) - ari_pair_counting(a, b)).abs();
                worst = worst.max(d);
                compared += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst < 1e-12 && secs < 60.0,
        format!("{compared} partition pairs, n<=7, max deviation {worst:.3e}, {secs:.1}s"),
    )
}

/// Greedy pairing by sorting every (score, target, hypothesis) triple.
fn greedy_by_sorting(scores: &[Vec<f64>]) -> (Vec<(usize, usize)>, f64) {
    let mut triples: Vec<(f64, usize, usize)> = Vec::new();
    for (t, row) in scores.iter().enumerate() {
        for (h, &s) in row.iter().enumerate() {
            triples.push((s, t, h));
        }
    }
    triples.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used_t = BTreeSet::new();
    let mut used_h = BTreeSet::new();
    let mut pairs = Vec::new();
    let mut sum = 0.0;
    for (s, t, h) in triples {
        if used_t.contains(&t) || used_h.contains(&h) {
            continue;
        }
        used_t.insert(t);
        used_h.insert(h);
        pairs.push((t, h));
        sum += s;
    }
    let mean = if pairs.is_empty() { 0.0 } else { sum / pairs.len() as f64 };
    (pairs, mean)
}

fn naive_bertscore_f1(hyp: &[Vec<f64>], reference: &[Vec<f64>]) -> f64 {
    let cos = |u: &Vec<f64>, v: &Vec<f64>| {
        let d: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
        let nu: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nv: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        (d / (nu * nv)).clamp(-1.0, 1.0)
    };
    let p = hyp
        .iter()
        .map(|h| reference.iter().map(|r| cos(h, r)).fold(f64::NEG_INFINITY, f64::max))
        .sum::<f64>()
        / hyp.len() as f64;
    let r = reference
        .iter()
        .map(|r| hyp.iter().map(|h| cos(h, r)).fold(f64::NEG_INFINITY, f64::max))
        .sum::<f64>()
        / reference.len() as f64;
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

fn random_seq(rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..rng.random_range(1..=3))
        .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

fn greedy_oracle() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = 0;
    for case in 0..1000 {
        let n_t = rng.random_range(1..=5);
        let n_h = rng.random_range(0..=5);
        if case % 2 == 0 {
            // coarse grid values, many ties
            let scores: Vec<Vec<f64>> = (0..n_t)
                .map(|_| (0..n_h).map(|_| rng.random_range(0..5) as f64 / 4.0).collect())
                .collect();
            let got = greedy_align_matrix(&scores);
            let (pairs, mean) = greedy_by_sorting(&scores);
            let got_pairs: Vec<(usize, usize)> = got.pairs.iter().map(|p| (p.target, p.hypothesis)).collect();
            if got_pairs != pairs || (got.mean_score - mean).abs() > 1e-12 {
                mismatches += 1;
            }
        } else {
            let targets: Vec<Vec<Vec<f64>>> = (0..n_t).map(|_| random_seq(&mut rng)).collect();
            let hyps: Vec<Vec<Vec<f64>>> = (0..n_h).map(|_| random_seq(&mut rng)).collect();
            let seqs = |v: &[Vec<Vec<f64>>]| -> Vec<TokenEmbeddingSeq> {
                v.iter()
                    .map(|s| TokenEmbeddingSeq::new((0..s.len()).map(|i| format!("t{i}")).collect(), s.clone()).unwrap())
                    .collect()
            };
            let got = greedy_align(&seqs(&targets), &seqs(&hyps)).unwrap();
            let scores: Vec<Vec<f64>> = targets
                .iter()
                .map(|t| hyps.iter().map(|h| naive_bertscore_f1(h, t)).collect())
                .collect();
            let (pairs, mean) = greedy_by_sorting(&scores);
            let got_pairs: Vec<(usize, usize)> = got.pairs.iter().map(|p| (p.target, p.hypothesis)).collect();
            if got_pairs != pairs || (got.mean_score - mean).abs() > 1e-12 {
                mismatches += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        mismatches == 0 && secs < 60.0,
        format!("1000 configurations (500 tied score grids, 500 token-vector sets), {mismatches} mismatches, {secs:.1}s"),
    )
}

fn identity_scoring() -> Verdict {
    let h = HashedEmbedder::new(64);
    let mut details = Vec::new();
    let mut pass = true;
    for name in ["mini_gold.tsv", "express_gold.tsv"] {
        let gold = parse_corpus(fixture_path(name), ParseMode::Gold).unwrap();
        let text = gold.to_tsv();
        let p1 = parse_subtask1_prediction_str(&text, Some(&gold)).unwrap();
        let p2 = parse_subtask2_prediction_str(&text, Some(&gold)).unwrap();
        let s1 = score_subtask1(&gold, &p1).unwrap().aggregates;
        let s2 = score_subtask2(&gold, &p2, &h, Subtask2Options::default()).unwrap().aggregates;
        let values = [
            ("ari", s1.ari.unwrap()),
            ("f1", s1.macro_f1.unwrap()),
            ("bertscore", s2.bertscore.unwrap()),
            ("bleu", s2.bleu.unwrap()),
            ("coverage", s2.coverage.unwrap()),
        ];
        let worst = values.iter().map(|(_, v)| (v - 1.0).abs()).fold(0.0, f64::max);
        pass &= worst < 1e-12;
        details.push(format!(
            "{name}: {}",
            values.iter().map(|(k, v)| format!("{k}={v:.4}")).collect::<Vec<_>>().join(" ")
        ));
    }
    verdict(pass, details.join("; "))
}

fn ap_recovery() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(95);
    let config = ApConfig::default();
    let (mut recovered, mut fallbacks, mut errors) = (0, 0, 0);
    let mut over = 0;
    let mut under = 0;
    for _ in 0..100 {
        let k = rng.random_range(2..=5);
        let sizes: Vec<usize> = (0..k).map(|_| rng.random_range(5..=20)).collect();
        let (points, labels) = planted_groups(&mut rng, &sizes, 16, 0.03);
        let sim = cosine_matrix(&points);
        match affinity_propagation(&sim, &config) {
            Ok(result) => {
                if !result.converged {
                    fallbacks += 1;
                }
                let same = |i: usize, j: usize| result.exemplar_of[i] == result.exemplar_of[j];
                let exact = (0..points.len())
                    .all(|i| (0..points.len()).all(|j| same(i, j) == (labels[i] == labels[j])));
                if exact {
                    recovered += 1;
                } else if result.n_clusters() > k {
                    over += 1;
                } else {
                    under += 1;
                }
            }
            Err(_) => errors += 1,
        }
    }
    verdict(
        recovered >= 95 && errors == 0,
        format!(
            "{recovered}/100 exact recoveries with damping 0.9, 200 iterations, window 15, median preference; \
             {over} over-split, {under} under-split, {fallbacks} single-cluster fallbacks, {errors} errors"
        ),
    )
}

fn baseline_planted() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(504);
    let planted = planted_corpus(&mut rng, 30);
    let mut exact_words = 0;
    let mut prototype_ok = true;
    let mut monotone = true;
    let mut previous: Option<BTreeSet<(String, String)>> = None;
    let mut default_run = None;
    for step in 1..=9 {
        let threshold = step as f64 / 10.0;
        let config = BaselineConfig {
            threshold,
            ..BaselineConfig::default()
        };
        let run = run_baseline(&planted.corpus, &planted.store, &config).unwrap();
        let mapped: BTreeSet<(String, String)> = run
            .assignments
            .iter()
            .flat_map(|a| a.clusters.iter().filter(|c| !c.novel).map(|c| (a.word.clone(), c.prototype.clone())))
            .collect();
        if let Some(prev) = &previous {
            monotone &= mapped.is_subset(prev);
        }
        previous = Some(mapped);
        if step == 3 {
            default_run = Some(run);
        }
    }
    let run = default_run.unwrap();
    for a in &run.assignments {
        let mut exact = true;
        for c in &a.clusters {
            let decided = |truth: &Option<String>| match truth {
                Some(s) => !c.novel && &c.sense_id == s,
                None => c.novel,
            };
            prototype_ok &= decided(&planted.truth[&c.prototype]);
            exact &= c.members.iter().all(|m| decided(&planted.truth[m]));
        }
        if exact {
            exact_words += 1;
        }
    }
    let words = run.assignments.len();
    verdict(
        exact_words == words && monotone,
        format!(
            "{exact_words}/{words} words with every usage decided correctly at threshold 0.3; \
             prototype-level decisions {}; mapped set nested over 0.1..0.9: {monotone}",
            if prototype_ok { "all correct" } else { "NOT all correct" }
        ),
    )
}

fn find_split(dir: &Path, lang: &str) -> Option<PathBuf> {
    let mut stack = vec![dir.to_path_buf()];
    let mut hits = Vec::new();
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).ok()?.flatten() {
            let p = entry.path();
            if p.is_dir() {
                stack.push(p);
            } else if let Some(name) = p.file_name().and_then(|n| n.to_str()) {
                let name = name.to_lowercase();
                if name.ends_with(".tsv")
                    && name.contains("test")
                    && (name.contains(&format!(".{lang}.")) || name.contains(&format!("_{lang}")))
                {
                    hits.push(p);
                }
            }
        }
    }
    hits.sort_by_key(|p| !p.to_string_lossy().contains("gold"));
    hits.into_iter().next()
}

fn table_statistics() -> Verdict {
    let Some(dir) = env::var_os("AXOLOTL_DATA").map(PathBuf::from) else {
        return verdict(false, "published test splits not available (set AXOLOTL_DATA to their directory)");
    };
    let mut checks = Vec::new();
    let mut pass = true;
    let expected: [(&str, Option<(usize, usize, usize)>, Option<usize>); 3] = [
        ("fi", Some((3264, 3461, 6725)), None),
        ("ru", None, Some(211)),
        ("de", None, Some(24)),
    ];
    for (lang, samples, words) in expected {
        let Some(path) = find_split(&dir, lang) else {
            pass = false;
            checks.push(format!("{lang}: no test split under {}", dir.display()));
            continue;
        };
        let corpus = match parse_corpus(&path, ParseMode::Permissive) {
            Ok(c) => c,
            Err(e) => {
                pass = false;
                checks.push(format!("{lang}: {e}"));
                continue;
            }
        };
        let s = compute_stats(&corpus.records);
        if let Some((new, old, total)) = samples {
            let ok = (s.samples_new, s.samples_old, s.samples_total) == (new, old, total);
            pass &= ok;
            checks.push(format!(
                "{lang}: new={} old={} total={} (want {new}/{old}/{total})",
                s.samples_new, s.samples_old, s.samples_total
            ));
        }
        if let Some(w) = words {
            pass &= s.target_words == w;
            checks.push(format!("{lang}: {} target words (want {w})", s.target_words));
        }
    }
    verdict(pass, checks.join("; "))
}

fn subtask2_skip() -> Verdict {
    let mut rows = Vec::new();
    let n = 6;
    for w in 0..n {
        rows.push(format!("w{w}_o\tword{w}\t\told{w}\tan old meaning {w}\told example\t\t\told"));
        rows.push(format!("w{w}_n1\tword{w}\t\told{w}\tan old meaning {w}\tnew example a\t\t\tnew"));
        rows.push(format!("w{w}_n2\tword{w}\t\tnovel{w}\ta fresh meaning number {w}\tnew example b\t\t\tnew"));
    }
    let gold = parse_corpus_str(&tsv(&rows), ParseMode::Gold).unwrap();
    let mut pred = Subtask2Prediction::default();
    pred.insert("word2", "mine", "a fresh meaning number 2");
    let h = HashedEmbedder::new(32);
    let report = score_subtask2(&gold, &pred, &h, Subtask2Options::default()).unwrap();
    let a = &report.aggregates;
    let scored: Vec<&str> = report.rows.iter().filter(|r| r.covered).map(|r| r.word.as_str()).collect();
    let coverage = a.coverage.unwrap();
    let only = report.row("word2").unwrap();
    let pass = (coverage - 1.0 / n as f64).abs() < 1e-12
        && scored == ["word2"]
        && a.bertscore == only.bertscore
        && a.bleu == only.bleu;
    verdict(
        pass,
        format!(
            "covered {scored:?} of {n} gained-sense words, coverage {coverage:.4}, means equal the single word's scores: {}",
            a.bertscore == only.bertscore && a.bleu == only.bleu
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 7] = [
        ("ari-oracle-equivalence", ari_oracle),
        ("greedy-alignment-oracle", greedy_oracle),
        ("identity-scoring", identity_scoring),
        ("affinity-propagation-recovery", ap_recovery),
        ("baseline-planted-corpora", baseline_planted),
        ("table-1-2-statistics", table_statistics),
        ("subtask2-skip-semantics", subtask2_skip),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let v = check();
        if !v.pass {
            failed += 1;
        }
        println!("{} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 && env::var("SEMSHIFT_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1") {
        std::process::exit(1);
    }
}
