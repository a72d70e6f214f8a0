//! Affinity Propagation (responsibility/availability message passing).

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Preference {
    /// Median of the off-diagonal similarities.
    Median,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApConfig {
    pub damping: f64,
    pub max_iterations: usize,
    /// Iterations the exemplar set must stay unchanged to count as converged.
    pub convergence_window: usize,
    pub preference: Preference,
}

impl Default for ApConfig {
    fn default() -> Self {
        ApConfig {
            damping: 0.9,
            max_iterations: 200,
            convergence_window: 15,
            preference: Preference::Median,
        }
    }
}

impl ApConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.5..1.0).contains(&self.damping) {
            return Err(Error::InvalidArgument(format!(
                "damping {} outside [0.5, 1)",
                self.damping
            )));
        }
        if self.max_iterations == 0 || self.convergence_window == 0 {
            return Err(Error::InvalidArgument(
                "max_iterations and convergence_window must be positive".into(),
            ));
        }
        if self.convergence_window > self.max_iterations {
            return Err(Error::InvalidArgument(
                "convergence_window exceeds max_iterations".into(),
            ));
        }
        if let Preference::Fixed(p) = self.preference {
            if !p.is_finite() {
                return Err(Error::InvalidArgument("preference must be finite".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApResult {
    /// Exemplar index of every point; exemplars point to themselves.
    pub exemplar_of: Vec<usize>,
    /// False when message passing did not settle and everything was put
    /// into one cluster instead.
    pub converged: bool,
    pub iterations: usize,
}

impl ApResult {
    /// Exemplars in increasing index order.
    pub fn exemplars(&self) -> Vec<usize> {
        let mut e: Vec<usize> = self.exemplar_of.clone();
        e.sort_unstable();
        e.dedup();
        e
    }

    pub fn n_clusters(&self) -> usize {
        self.exemplars().len()
    }

    /// Point indices per cluster; clusters ordered by their smallest member.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut clusters: Vec<(usize, Vec<usize>)> = Vec::new();
        for (i, &e) in self.exemplar_of.iter().enumerate() {
            match clusters.iter_mut().find(|(ex, _)| *ex == e) {
                Some((_, members)) => members.push(i),
                None => clusters.push((e, vec![i])),
            }
        }
        clusters.into_iter().map(|(_, m)| m).collect()
    }
}

pub(crate) fn median_off_diagonal(similarity: &[Vec<f64>]) -> f64 {
    let n = similarity.len();
    let mut values: Vec<f64> = (0..n)
        .flat_map(|i| (0..n).filter(move |&k| k != i).map(move |k| (i, k)))
        .map(|(i, k)| similarity[i][k])
        .collect();
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len();
    if m % 2 == 1 {
        values[m / 2]
    } else {
        (values[m / 2 - 1] + values[m / 2]) / 2.0
    }
}

/// Clusters points given their pairwise similarities (higher is closer).
///
/// The diagonal of `similarity` is ignored and replaced by the configured
/// preference. If the exemplar set has not been stable for
/// `convergence_window` iterations by `max_iterations`, or no exemplar
/// emerged, all points form one cluster around the point with the largest
/// total similarity.
pub fn affinity_propagation(similarity: &[Vec<f64>], config: &ApConfig) -> Result<ApResult> {
    config.validate()?;
    let n = similarity.len();
    if similarity.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidArgument("similarity matrix is not square".into()));
    }
    if similarity.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite similarity".into()));
    }
    if n <= 1 {
        return Ok(ApResult {
            exemplar_of: (0..n).collect(),
            converged: true,
            iterations: 0,
        });
    }

    let preference = match config.preference {
        Preference::Median => median_off_diagonal(similarity),
        Preference::Fixed(p) => p,
    };
    let mut s = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            s[i * n + k] = if i == k { preference } else { similarity[i][k] };
        }
    }

    let lambda = config.damping;
    let mut r = vec![0.0; n * n];
    let mut a = vec![0.0; n * n];
    let mut col_pos = vec![0.0; n];
    let mut is_exemplar = vec![false; n];
    let mut stable = 0usize;
    let mut converged = false;
    let mut iterations = 0;

    for it in 0..config.max_iterations {
        iterations = it + 1;

        // responsibilities
        for i in 0..n {
            let row = i * n;
            let (mut best, mut second, mut best_k) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0);
            for k in 0..n {
                let v = a[row + k] + s[row + k];
                if v > best {
                    second = best;
                    best = v;
                    best_k = k;
                } else if v > second {
                    second = v;
                }
            }
            for k in 0..n {
                let competitor = if k == best_k { second } else { best };
                let fresh = s[row + k] - competitor;
                r[row + k] = lambda * r[row + k] + (1.0 - lambda) * fresh;
            }
        }

        // availabilities
        col_pos.iter_mut().for_each(|c| *c = 0.0);
        for i in 0..n {
            for k in 0..n {
                let v = r[i * n + k];
                col_pos[k] += if i == k { v } else { v.max(0.0) };
            }
        }
        for i in 0..n {
            for k in 0..n {
                let idx = i * n + k;
                let fresh = if i == k {
                    col_pos[k] - r[idx]
                } else {
                    (col_pos[k] - r[idx].max(0.0)).min(0.0)
                };
                a[idx] = lambda * a[idx] + (1.0 - lambda) * fresh;
            }
        }

        let mut changed = false;
        let mut any = false;
        for k in 0..n {
            let e = a[k * n + k] + r[k * n + k] > 0.0;
            changed |= e != is_exemplar[k];
            is_exemplar[k] = e;
            any |= e;
        }
        stable = if changed { 1 } else { stable + 1 };
        if any && stable >= config.convergence_window {
            converged = true;
            break;
        }
    }

    let exemplars: Vec<usize> = (0..n).filter(|&k| is_exemplar[k]).collect();
    if !converged || exemplars.is_empty() {
        let center = (0..n)
            .map(|i| {
                let total: f64 = (0..n).filter(|&k| k != i).map(|k| similarity[i][k]).sum();
                (i, total)
            })
            .fold((0, f64::NEG_INFINITY), |best, (i, t)| if t > best.1 { (i, t) } else { best })
            .0;
        return Ok(ApResult {
            exemplar_of: vec![center; n],
            converged: false,
            iterations,
        });
    }

    let exemplar_of = (0..n)
        .map(|i| {
            if is_exemplar[i] {
                return i;
            }
            exemplars
                .iter()
                .copied()
                .fold((exemplars[0], f64::NEG_INFINITY), |best, k| {
                    if s[i * n + k] > best.1 {
                        (k, s[i * n + k])
                    } else {
                        best
                    }
                })
                .0
        })
        .collect();
    Ok(ApResult {
        exemplar_of,
        converged: true,
        iterations,
    })
}
