use serde::{Deserialize, Serialize};

use super::{check_alpha, check_walkable, WalkError};
use crate::percolation::ClusterGraph;

/// Default cap on path extensions for exact enumeration (`2^28`).
pub const DEFAULT_BUDGET: u64 = 1 << 28;

/// Joint law of `N_n` and the return event at one depth `n`.
///
/// `unpinned[m] = P(N_n = m)` and `pinned[m] = P(N_n = m, X_n = 0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisitLaw {
    pub n: usize,
    pub unpinned: Vec<f64>,
    pub pinned: Vec<f64>,
}

impl VisitLaw {
    /// `E[α^{N_n}]`, or `E[α^{N_n} 1{X_n = 0}]` when `pinned`.
    pub fn laplace(&self, alpha: f64, pinned: bool) -> f64 {
        let law = if pinned { &self.pinned } else { &self.unpinned };
        law.iter().enumerate().map(|(m, &q)| q * alpha.powi(m as i32)).sum()
    }

    /// `P(N_n ≤ m, X_n = 0)`.
    pub fn pinned_at_most(&self, m: usize) -> f64 {
        self.pinned.iter().take(m + 1).sum()
    }
}

/// Number of path extensions a depth-`n` enumeration performs:
/// `Σ_{k=1}^{n}` (number of length-`k` paths from the origin).
pub fn path_extensions(cluster: &ClusterGraph, n: usize) -> Result<f64, WalkError> {
    let origin = cluster.require_origin()?;
    let mut counts = vec![0.0f64; cluster.len()];
    counts[origin] = 1.0;
    let mut total = 0.0;
    for _ in 0..n {
        let mut next = vec![0.0f64; cluster.len()];
        for (v, &c) in counts.iter().enumerate() {
            if c > 0.0 {
                for &u in cluster.neighbors(v) {
                    next[u] += c;
                }
            }
        }
        total += next.iter().sum::<f64>();
        counts = next;
    }
    Ok(total)
}

/// Exact laws of `(N_k, 1{X_k = 0})` for every `k = 0..=n_max` by depth-first
/// enumeration of all paths, each weighted by `Π 1/ν(X_j)`.
pub fn exact_visit_laws(cluster: &ClusterGraph, n_max: usize, budget: u64) -> Result<Vec<VisitLaw>, WalkError> {
    let origin = check_walkable(cluster, n_max)?;
    let required = path_extensions(cluster, n_max)?;
    if required > budget as f64 {
        return Err(WalkError::BudgetExceeded { required, budget });
    }
    let mut laws: Vec<VisitLaw> = (0..=n_max)
        .map(|n| VisitLaw { n, unpinned: vec![0.0; n + 2], pinned: vec![0.0; n + 2] })
        .collect();
    let mut visits = vec![0u32; cluster.len()];
    visits[origin] = 1;
    let mut search = Search { cluster, origin, n_max, visits, laws: &mut laws };
    search.descend(origin, 0, 1, 1.0);
    Ok(laws)
}

struct Search<'a> {
    cluster: &'a ClusterGraph,
    origin: usize,
    n_max: usize,
    visits: Vec<u32>,
    laws: &'a mut [VisitLaw],
}

impl Search<'_> {
    fn descend(&mut self, x: usize, depth: usize, distinct: usize, weight: f64) {
        let law = &mut self.laws[depth];
        law.unpinned[distinct] += weight;
        if x == self.origin {
            law.pinned[distinct] += weight;
        }
        if depth == self.n_max {
            return;
        }
        let cluster = self.cluster;
        let w = weight / cluster.degree(x) as f64;
        for &y in cluster.neighbors(x) {
            let fresh = self.visits[y] == 0;
            self.visits[y] += 1;
            self.descend(y, depth + 1, distinct + fresh as usize, w);
            self.visits[y] -= 1;
        }
    }
}

/// Exact `E_0[α^{N_n}]`, or `E_0[α^{N_n} 1{X_n = 0}]` when `pinned`.
///
/// On a bipartite graph the pinned value at odd `n` is 0 and is returned
/// without enumerating.
pub fn exact_laplace(
    cluster: &ClusterGraph,
    alpha: f64,
    n: usize,
    pinned: bool,
    budget: u64,
) -> Result<f64, WalkError> {
    check_alpha(alpha)?;
    check_walkable(cluster, n)?;
    if pinned && n % 2 == 1 && cluster.is_bipartite() {
        return Ok(0.0);
    }
    let laws = exact_visit_laws(cluster, n, budget)?;
    Ok(laws[n].laplace(alpha, pinned))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::percolation::{BondConfiguration, LatticeSpec};

    fn full(n: usize) -> ClusterGraph {
        ClusterGraph::component_of_origin(&BondConfiguration::full(LatticeSpec::new(2, n).unwrap()))
    }

    #[test]
    fn zero_steps_gives_alpha() {
        assert_eq!(exact_laplace(&full(2), 0.3, 0, false, DEFAULT_BUDGET).unwrap(), 0.3);
    }

    #[test]
    fn two_steps_on_the_plane() {
        let v = exact_laplace(&full(3), 0.5, 2, false, DEFAULT_BUDGET).unwrap();
        assert!((v - 0.15625).abs() < 1e-15);
    }

    #[test]
    fn alpha_one_normalizes() {
        let g = full(4);
        for n in 0..=8 {
            let v = exact_laplace(&g, 1.0, n, false, DEFAULT_BUDGET).unwrap();
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn odd_pinned_on_bipartite_is_zero() {
        let g = full(30);
        // far over budget if it were enumerated
        assert_eq!(exact_laplace(&g, 0.5, 41, true, 10).unwrap(), 0.0);
        assert!(matches!(
            exact_laplace(&g, 0.5, 40, true, 10),
            Err(WalkError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn extension_count() {
        // 4 + 16 + 64 on the open plane
        assert_eq!(path_extensions(&full(4), 3).unwrap(), 84.0);
    }

    #[test]
    fn triangle_pinned_odd_is_positive() {
        let k3 = ClusterGraph::complete(3);
        // return at step 3 goes around the triangle: 2 * (1/2)^3
        let v = exact_laplace(&k3, 1.0, 3, true, DEFAULT_BUDGET).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_alpha() {
        assert_eq!(
            exact_laplace(&full(1), 0.0, 1, false, DEFAULT_BUDGET),
            Err(WalkError::InvalidAlpha(0.0))
        );
    }
}
