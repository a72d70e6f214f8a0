#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;

use semshift::corpus::{parse_corpus_str, ParseMode, COLUMNS};
use semshift::embeddings::{Embedding, EmbeddingStore};
use semshift::Corpus;

pub fn fixture_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn tsv(rows: &[String]) -> String {
    let mut t = COLUMNS.join("\t");
    for r in rows {
        t.push('\n');
        t.push_str(r);
    }
    t.push('\n');
    t
}

fn unit(mut v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    v
}

pub fn cos(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Unit vector near axis `axis` with uniform per-component noise.
pub fn noisy_axis(rng: &mut impl Rng, dim: usize, axis: usize, noise: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-noise..noise)).collect();
    v[axis] += 1.0;
    unit(v)
}

/// Points in `sizes.len()` groups around distinct axes, with group labels.
/// Redrawn until every intra-group cosine exceeds 0.95 and every
/// inter-group cosine is below 0.1.
pub fn planted_groups(rng: &mut impl Rng, sizes: &[usize], dim: usize, noise: f64) -> (Vec<Vec<f64>>, Vec<usize>) {
    loop {
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for (g, &size) in sizes.iter().enumerate() {
            for _ in 0..size {
                points.push(noisy_axis(rng, dim, g, noise));
                labels.push(g);
            }
        }
        let ok = (0..points.len()).all(|i| {
            (i + 1..points.len()).all(|k| {
                let c = cos(&points[i], &points[k]);
                if labels[i] == labels[k] {
                    c > 0.95
                } else {
                    c < 0.1
                }
            })
        });
        if ok {
            return (points, labels);
        }
    }
}

pub fn cosine_matrix(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| points.iter().map(|q| cos(p, q)).collect())
        .collect()
}

/// A test corpus whose new usages form tight clusters: some around the
/// sense-text embedding of an old sense, the rest around directions
/// orthogonal to every sense text.
pub struct PlantedCorpus {
    pub corpus: Corpus,
    pub store: EmbeddingStore,
    /// Planted old sense per new usage, `None` for novel usages.
    pub truth: BTreeMap<String, Option<String>>,
    /// Planted cluster per new usage, unique across words.
    pub cluster: BTreeMap<String, usize>,
}

pub fn planted_corpus(rng: &mut impl Rng, n_words: usize) -> PlantedCorpus {
    const DIM: usize = 12;
    let mut rows = Vec::new();
    let mut store = EmbeddingStore::new(DIM, "planted").unwrap();
    let mut truth = BTreeMap::new();
    let mut cluster = BTreeMap::new();
    let mut next_cluster = 0;
    for w in 0..n_words {
        let word = format!("word{w}");
        let n_old = rng.random_range(1..=3);
        let n_mapped = rng.random_range(1..=n_old);
        let n_novel = rng.random_range(1..=2);
        let mut axes: Vec<usize> = (0..DIM).collect();
        axes.shuffle(rng);

        for s in 0..n_old {
            let gloss = format!("{word} gloss {s}");
            let example = format!("{word} old example {s}");
            rows.push(format!("{word}_o{s}\t{word}\t\t{word}_s{s}\t{gloss}\t{example}\t\t\told"));
            let mut v = vec![0.0; DIM];
            v[axes[s]] = 1.0;
            store.insert(format!("{gloss} {example}"), Embedding::Sentence(v)).unwrap();
        }

        let mut usages: Vec<(String, Option<String>, usize, Vec<f64>)> = Vec::new();
        let groups: Vec<(Option<usize>, usize)> = (0..n_mapped)
            .map(|s| (Some(s), axes[s]))
            .chain((0..n_novel).map(|k| (None, axes[n_old + k])))
            .collect();
        for (sense, axis) in groups {
            for _ in 0..rng.random_range(5..=12) {
                let v = noisy_axis(rng, DIM, axis, 0.04);
                usages.push((String::new(), sense.map(|s| format!("{word}_s{s}")), next_cluster, v));
            }
            next_cluster += 1;
        }
        usages.shuffle(rng);
        for (i, (_, sense, c, v)) in usages.into_iter().enumerate() {
            let id = format!("{word}_n{i}");
            let example = format!("{word} new example {i}");
            rows.push(format!("{id}\t{word}\t\t\t\t{example}\t\t\tnew"));
            store.insert(example, Embedding::Sentence(v)).unwrap();
            truth.insert(id.clone(), sense);
            cluster.insert(id, c);
        }
    }
    let corpus = parse_corpus_str(&tsv(&rows), ParseMode::Test).unwrap();
    PlantedCorpus {
        corpus,
        store,
        truth,
        cluster,
    }
}
