use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_walkable, WalkError};
use crate::percolation::ClusterGraph;
use crate::rng::stream_rng;

/// A walk `X_0, ..., X_n` started at the origin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkPath {
    pub steps: Vec<usize>,
    pub seed: u64,
}

impl WalkPath {
    /// Number of steps `n`.
    pub fn len(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.steps.len() <= 1
    }

    /// `N_n`, the number of distinct vertices visited.
    pub fn visited_count(&self) -> usize {
        visited_count(&self.steps)
    }

    /// True when consecutive vertices are adjacent in `cluster`.
    pub fn is_valid_in(&self, cluster: &ClusterGraph) -> bool {
        Some(self.steps[0]) == cluster.origin()
            && self.steps.windows(2).all(|w| cluster.neighbors(w[0]).contains(&w[1]))
    }
}

/// Samples `n` steps of the simple random walk from the origin.
///
/// Each step picks a neighbour uniformly with ChaCha8 stream 0 of `seed`.
pub fn simulate_walk(cluster: &ClusterGraph, n: usize, seed: u64) -> Result<WalkPath, WalkError> {
    let origin = check_walkable(cluster, n)?;
    let mut rng = stream_rng(seed, 0);
    let mut steps = Vec::with_capacity(n + 1);
    let mut x = origin;
    steps.push(x);
    for _ in 0..n {
        let nb = cluster.neighbors(x);
        x = nb[rng.random_range(0..nb.len())];
        steps.push(x);
    }
    Ok(WalkPath { steps, seed })
}

/// Number of distinct entries of `steps`.
pub fn visited_count(steps: &[usize]) -> usize {
    steps.iter().collect::<HashSet<_>>().len()
}
