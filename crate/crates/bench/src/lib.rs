//! Seeded input generators for the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semshift::metrics::TokenEmbeddingSeq;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two label vectors of length `n` over `k` labels each.
pub fn labelings(rng: &mut impl Rng, n: usize, k: usize) -> (Vec<u32>, Vec<u32>) {
    let a = (0..n).map(|_| rng.random_range(0..k as u32)).collect();
    let b = (0..n).map(|_| rng.random_range(0..k as u32)).collect();
    (a, b)
}

pub fn token_seq(rng: &mut impl Rng, len: usize, dim: usize) -> TokenEmbeddingSeq {
    let tokens = (0..len).map(|i| format!("t{i}")).collect();
    let vectors = (0..len)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    TokenEmbeddingSeq::new(tokens, vectors).unwrap()
}

/// Cosine similarities of `groups * per_group` unit vectors clustered
/// around the first `groups` axes.
pub fn clustered_similarities(rng: &mut impl Rng, groups: usize, per_group: usize, dim: usize) -> Vec<Vec<f64>> {
    assert!(groups <= dim);
    let mut points: Vec<Vec<f64>> = Vec::new();
    for g in 0..groups {
        for _ in 0..per_group {
            let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-0.05..0.05)).collect();
            v[g] += 1.0;
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= n);
            points.push(v);
        }
    }
    points
        .iter()
        .map(|p| points.iter().map(|q| p.iter().zip(q).map(|(a, b)| a * b).sum()).collect())
        .collect()
}
