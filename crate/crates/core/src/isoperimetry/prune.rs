use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::graph::IsoError;

/// Vertices left after repeatedly erasing those of degree below `b/3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PruneResult {
    pub remaining: Vec<usize>,
    pub rounds: usize,
    /// Whether fewer than half the edges had an endpoint of degree below `b`.
    pub hypothesis_holds: bool,
    /// Smallest degree among the survivors, counted inside them.
    pub min_degree: Option<usize>,
}

/// `|NS^e(b)| / |E|`: the share of edges with an endpoint of degree below
/// `b`. `None` for an edgeless graph.
pub fn unsatisfied_edge_fraction(adjacency: &[Vec<usize>], b: f64) -> Option<f64> {
    let mut total = 0usize;
    let mut bad = 0usize;
    for (v, list) in adjacency.iter().enumerate() {
        for &u in list.iter().filter(|&&u| u > v) {
            total += 1;
            if (list.len() as f64) < b || (adjacency[u].len() as f64) < b {
                bad += 1;
            }
        }
    }
    (total > 0).then(|| bad as f64 / total as f64)
}

/// Erases every vertex with `3 · degree < b` at once, recounts, and repeats
/// until nothing changes.
pub fn prune_to_satisfiable(adjacency: &[Vec<usize>], b: f64) -> PruneResult {
    let n = adjacency.len();
    let hypothesis_holds = unsatisfied_edge_fraction(adjacency, b).is_some_and(|f| f < 0.5);
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = adjacency.iter().map(Vec::len).collect();
    let mut rounds = 0;
    loop {
        let doomed: Vec<usize> = (0..n).filter(|&v| alive[v] && 3.0 * (degree[v] as f64) < b).collect();
        if doomed.is_empty() {
            break;
        }
        rounds += 1;
        for &v in &doomed {
            alive[v] = false;
        }
        for &v in &doomed {
            for &u in &adjacency[v] {
                if alive[u] {
                    degree[u] -= 1;
                }
            }
        }
    }
    let remaining: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    let min_degree = remaining.iter().map(|&v| degree[v]).min();
    PruneResult { remaining, rounds, hypothesis_holds, min_degree }
}

/// Outcome of `|A| ≥ 2^Y` for a family closed under at least `Y` flips.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlipClosure {
    pub size: usize,
    pub y: u32,
    pub holds: bool,
}

/// Checks that every configuration in `family` (bitmasks over `sites`
/// lamps) has at least `y` single-site flips inside the family, then that
/// the family has at least `2^y` members.
pub fn flip_closure_bound_check(family: &[u32], sites: usize, y: u32) -> Result<FlipClosure, IsoError> {
    let members: HashSet<u32> = family.iter().copied().collect();
    let mut sorted: Vec<u32> = members.iter().copied().collect();
    sorted.sort_unstable();
    if sorted.is_empty() {
        return Err(IsoError::EmptySubset);
    }
    for &f in &sorted {
        let flips = (0..sites).filter(|&s| members.contains(&(f ^ (1 << s)))).count();
        if flips < y as usize {
            return Err(IsoError::PremiseViolated { witness: f, flips });
        }
    }
    let size = sorted.len();
    Ok(FlipClosure { size, y, holds: (size as u128) >= 1u128 << y })
}
