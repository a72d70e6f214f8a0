use std::collections::BTreeSet;

use super::Labeling;
use crate::error::{Error, Result};

/// Macro-averaged F1 over a fixed class universe.
///
/// Predicted labels outside `classes` never count as true or false
/// positives of a class; they only cost recall. A class without predicted
/// (or gold) items has precision (or recall) 0, and F1 is 0 when both are 0.
pub fn macro_f1(gold: &Labeling, pred: &Labeling, classes: &BTreeSet<String>) -> Result<f64> {
    let zipped = gold.zip(pred)?;
    let (g, p): (Vec<&str>, Vec<&str>) = zipped.into_iter().unzip();
    macro_f1_from_labels(&g, &p, classes)
}

pub fn macro_f1_from_labels<S: AsRef<str>>(
    gold: &[S],
    pred: &[S],
    classes: &BTreeSet<String>,
) -> Result<f64> {
    assert_eq!(gold.len(), pred.len(), "label slices differ in length");
    if classes.is_empty() {
        return Err(Error::InvalidArgument("macro-F1 over an empty class set".into()));
    }
    if let Some(g) = gold.iter().find(|g| !classes.contains(g.as_ref())) {
        return Err(Error::InvalidArgument(format!(
            "gold label '{}' is not among the scored classes",
            g.as_ref()
        )));
    }
    let sum: f64 = classes
        .iter()
        .map(|c| {
            let (mut tp, mut fp, mut fn_) = (0usize, 0usize, 0usize);
            for (g, p) in gold.iter().zip(pred) {
                match (g.as_ref() == c, p.as_ref() == c) {
                    (true, true) => tp += 1,
                    (false, true) => fp += 1,
                    (true, false) => fn_ += 1,
                    (false, false) => {}
                }
            }
            let precision = if tp + fp > 0 { tp as f64 / (tp + fp) as f64 } else { 0.0 };
            let recall = if tp + fn_ > 0 { tp as f64 / (tp + fn_) as f64 } else { 0.0 };
            if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            }
        })
        .sum();
    Ok(sum / classes.len() as f64)
}
