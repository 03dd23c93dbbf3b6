use std::fmt;
use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_alpha, check_walkable, WalkError};
use crate::percolation::ClusterGraph;
use crate::rng::stream_rng;

/// Paths per Monte Carlo batch. Batch `b` draws from ChaCha8 stream `b` of
/// the run seed, so results do not depend on the number of workers.
pub const BATCH_SIZE: usize = 8192;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::MonteCarlo => "monte_carlo",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkEntry {
    pub n: usize,
    pub value: f64,
    pub stderr: f64,
    pub method: Method,
}

/// Per-`n` estimates of `E_0[α^{N_n}]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkSeries {
    pub entries: Vec<WalkEntry>,
    pub alpha: f64,
    pub p: Option<f64>,
    pub d: usize,
    pub seed: Option<u64>,
}

impl WalkSeries {
    pub fn with_p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn get(&self, n: usize) -> Option<&WalkEntry> {
        self.entries.iter().find(|e| e.n == n)
    }

    /// CSV with columns `n,value,stderr,method,alpha,p,d,seed`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "value", "stderr", "method", "alpha", "p", "d", "seed"])?;
        let p = self.p.map(|p| p.to_string()).unwrap_or_default();
        let seed = self.seed.map(|s| s.to_string()).unwrap_or_default();
        for e in &self.entries {
            w.write_record([
                e.n.to_string(),
                e.value.to_string(),
                e.stderr.to_string(),
                e.method.to_string(),
                self.alpha.to_string(),
                p.clone(),
                self.d.to_string(),
                seed.clone(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
}

impl Estimate {
    /// Mean and `sd / √S` of `f(m)` under integer counts `counts[m]`.
    fn from_counts(counts: &[u64], f: impl Fn(usize) -> f64) -> Self {
        let total: u64 = counts.iter().sum();
        let s = total as f64;
        let mean: f64 = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(m, &c)| (c as f64 / s) * f(m))
            .sum();
        let var = if total > 1 {
            counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(m, &c)| (c as f64 / s) * (f(m) - mean).powi(2))
                .sum::<f64>()
                * s
                / (s - 1.0)
        } else {
            0.0
        };
        Self { value: mean, stderr: (var / s).sqrt(), samples: total as usize }
    }
}

/// Runs `samples` independent walks of length `max(n_list)` in batches and
/// returns, per requested `n`, the integer histogram of `N_n`.
fn visit_histograms(
    cluster: &ClusterGraph,
    n_list: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<Vec<u64>>, WalkError> {
    let n_max = n_list.iter().copied().max().unwrap_or(0);
    let origin = check_walkable(cluster, n_max)?;
    if samples == 0 {
        return Err(WalkError::NoSamples);
    }
    let batches = samples.div_ceil(BATCH_SIZE);
    let per_batch: Vec<Vec<Vec<u64>>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let count = BATCH_SIZE.min(samples - b * BATCH_SIZE);
            let mut rng = stream_rng(seed, b as u64);
            let mut hist: Vec<Vec<u64>> = n_list.iter().map(|&n| vec![0; n + 2]).collect();
            let mut stamp = vec![0u32; cluster.len()];
            for epoch in 1..=count as u32 {
                let mut x = origin;
                stamp[x] = epoch;
                let mut distinct = 1usize;
                for step in 0..=n_max {
                    for (slot, &n) in n_list.iter().enumerate() {
                        if n == step {
                            hist[slot][distinct] += 1;
                        }
                    }
                    if step == n_max {
                        break;
                    }
                    let nb = cluster.neighbors(x);
                    x = nb[rng.random_range(0..nb.len())];
                    if stamp[x] != epoch {
                        stamp[x] = epoch;
                        distinct += 1;
                    }
                }
            }
            hist
        })
        .collect();
    let mut merged: Vec<Vec<u64>> = n_list.iter().map(|&n| vec![0; n + 2]).collect();
    for hist in per_batch {
        for (acc, h) in merged.iter_mut().zip(hist) {
            for (a, c) in acc.iter_mut().zip(h) {
                *a += c;
            }
        }
    }
    Ok(merged)
}

/// Monte Carlo estimate of `E_0[α^{N_n}]` for each `n` in `n_list`.
///
/// All requested depths are read off the same `samples` walks. Counts are
/// merged as integers, so the output is bit-identical for any worker count.
pub fn mc_laplace(
    cluster: &ClusterGraph,
    alpha: f64,
    n_list: &[usize],
    samples: usize,
    seed: u64,
) -> Result<WalkSeries, WalkError> {
    Ok(mc_laplace_multi(cluster, &[alpha], n_list, samples, seed)?.remove(0))
}

/// [`mc_laplace`] for several `α` sharing one set of walks.
pub fn mc_laplace_multi(
    cluster: &ClusterGraph,
    alphas: &[f64],
    n_list: &[usize],
    samples: usize,
    seed: u64,
) -> Result<Vec<WalkSeries>, WalkError> {
    for &a in alphas {
        check_alpha(a)?;
    }
    let mut order: Vec<usize> = n_list.to_vec();
    order.sort_unstable();
    order.dedup();
    let hists = visit_histograms(cluster, &order, samples, seed)?;
    Ok(alphas
        .iter()
        .map(|&alpha| WalkSeries {
            entries: order
                .iter()
                .zip(&hists)
                .map(|(&n, h)| {
                    let est = Estimate::from_counts(h, |m| alpha.powi(m as i32));
                    WalkEntry { n, value: est.value, stderr: est.stderr, method: Method::MonteCarlo }
                })
                .collect(),
            alpha,
            p: None,
            d: cluster.dim(),
            seed: Some(seed),
        })
        .collect())
}

/// Monte Carlo estimate of `P_0(sup_{i ≤ n} D(0, X_i) ≤ r)`.
///
/// Returns exactly 1 without sampling when the walk cannot exit: `r ≥ n`, or
/// `r` at least the largest chemical distance in the cluster.
pub fn confinement_probability(
    cluster: &ClusterGraph,
    r: usize,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<Estimate, WalkError> {
    let origin = check_walkable(cluster, n)?;
    if samples == 0 {
        return Err(WalkError::NoSamples);
    }
    let dist: Vec<usize> = cluster
        .chemical_distances()?
        .into_iter()
        .map(|d| d.expect("clusters are connected"))
        .collect();
    let radius = dist.iter().copied().max().unwrap_or(0);
    if r >= n || r >= radius {
        return Ok(Estimate { value: 1.0, stderr: 0.0, samples });
    }
    let batches = samples.div_ceil(BATCH_SIZE);
    let stayed: u64 = (0..batches)
        .into_par_iter()
        .map(|b| {
            let count = BATCH_SIZE.min(samples - b * BATCH_SIZE);
            let mut rng = stream_rng(seed, b as u64);
            let mut inside = 0u64;
            'walk: for _ in 0..count {
                let mut x = origin;
                for _ in 0..n {
                    let nb = cluster.neighbors(x);
                    x = nb[rng.random_range(0..nb.len())];
                    if dist[x] > r {
                        continue 'walk;
                    }
                }
                inside += 1;
            }
            inside
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    Ok(Estimate::from_counts(&[samples as u64 - stayed, stayed], |m| m as f64))
}
