use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::WreathError;
use super::kernel::LamplighterKernel;
use crate::percolation::ClusterGraph;
use crate::walk::{exact_visit_laws, DEFAULT_BUDGET};

/// Both sides of `P̃_o(Z_{2n} = o) = E_0[α^{N_{2n}} 1{X_{2n} = 0}]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Computes the lamplighter return probability at time `2n` and the pinned
/// Laplace transform of the base walk, both exactly.
///
/// At `n = 0` the two sides are `1` and `α`, so `n ≥ 1` is required.
pub fn verify_identity(base: &ClusterGraph, alpha: f64, n: usize) -> Result<IdentityCheck, WreathError> {
    if n == 0 {
        return Err(WreathError::ZeroSteps);
    }
    let kernel = LamplighterKernel::new(base.clone(), alpha)?;
    let lhs = kernel.return_probability(2 * n, None);
    let laws = exact_visit_laws(base, 2 * n, DEFAULT_BUDGET)?;
    let rhs = laws[2 * n].laplace(alpha, true);
    Ok(IdentityCheck { lhs, rhs, gap: (lhs - rhs).abs() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub base_id: String,
    pub base_size: usize,
    pub alpha: f64,
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Runs [`verify_identity`] for every base, `α`, and `n = 1..=n_max`.
/// Rows come out in input order whatever the worker count.
pub fn identity_sweep(
    bases: &[(String, ClusterGraph)],
    alphas: &[f64],
    n_max: usize,
) -> Result<Vec<SweepRow>, WreathError> {
    let per_base: Vec<Result<Vec<SweepRow>, WreathError>> = bases
        .par_iter()
        .map(|(id, base)| {
            let laws = exact_visit_laws(base, 2 * n_max, DEFAULT_BUDGET)?;
            let mut rows = Vec::new();
            for &alpha in alphas {
                let kernel = LamplighterKernel::new(base.clone(), alpha)?;
                let origin = kernel.wreath().origin();
                let mut dist = kernel.distribution(0, None);
                let mut step = 0;
                for n in 1..=n_max {
                    while step < 2 * n {
                        dist = advance(&kernel, &dist);
                        step += 1;
                    }
                    let lhs = dist[origin];
                    let rhs = laws[2 * n].laplace(alpha, true);
                    rows.push(SweepRow {
                        base_id: id.clone(),
                        base_size: base.len(),
                        alpha,
                        n,
                        lhs,
                        rhs,
                        gap: (lhs - rhs).abs(),
                    });
                }
            }
            Ok(rows)
        })
        .collect();
    let mut out = Vec::new();
    for rows in per_base {
        out.extend(rows?);
    }
    Ok(out)
}

fn advance(kernel: &LamplighterKernel, dist: &[f64]) -> Vec<f64> {
    let mut next = vec![0.0; dist.len()];
    for (s, &mass) in dist.iter().enumerate() {
        if mass != 0.0 {
            for (t, w) in kernel.step_distribution(s) {
                next[t] += mass * w;
            }
        }
    }
    next
}

/// CSV with columns `base_id,base_size,alpha,n,lhs,rhs,gap`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
