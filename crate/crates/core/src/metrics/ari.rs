use std::collections::HashMap;
use std::hash::Hash;

use super::Labeling;
use crate::error::{Error, Result};

fn pairs(n: u64) -> i128 {
    (n as i128) * (n as i128 - 1) / 2
}

/// Adjusted Rand Index of two labelings of the same items.
///
/// Label names do not matter, only the partitions they induce. When both
/// partitions are all-in-one or all-singletons the index is 0/0; those
/// partitions are identical and score 1.
pub fn adjusted_rand_index(gold: &Labeling, pred: &Labeling) -> Result<f64> {
    if gold.is_empty() {
        return Err(Error::InvalidArgument("ARI of an empty labeling".into()));
    }
    let zipped = gold.zip(pred)?;
    let (g, p): (Vec<&str>, Vec<&str>) = zipped.into_iter().unzip();
    Ok(ari_from_labels(&g, &p))
}

/// ARI over two parallel label slices.
pub fn ari_from_labels<A, B>(gold: &[A], pred: &[B]) -> f64
where
    A: Hash + Eq,
    B: Hash + Eq,
{
    assert_eq!(gold.len(), pred.len(), "label slices differ in length");
    let n = gold.len() as u64;
    let mut cells: HashMap<(&A, &B), u64> = HashMap::new();
    let mut rows: HashMap<&A, u64> = HashMap::new();
    let mut cols: HashMap<&B, u64> = HashMap::new();
    for (g, p) in gold.iter().zip(pred) {
        *cells.entry((g, p)).or_default() += 1;
        *rows.entry(g).or_default() += 1;
        *cols.entry(p).or_default() += 1;
    }
    let index: i128 = cells.values().map(|&c| pairs(c)).sum();
    let a: i128 = rows.values().map(|&c| pairs(c)).sum();
    let b: i128 = cols.values().map(|&c| pairs(c)).sum();
    let total = pairs(n);

    // (index - a*b/total) / ((a+b)/2 - a*b/total), scaled by 2*total.
    let num = 2 * (total * index - a * b);
    let den = total * (a + b) - 2 * a * b;
    if den == 0 {
        return 1.0;
    }
    num as f64 / den as f64
}
