//! Simple random walk on a cluster and its visited-site statistics.

mod exact;
mod killed;
mod mc;
mod path;

pub use exact::{exact_laplace, exact_visit_laws, path_extensions, VisitLaw, DEFAULT_BUDGET};
pub use killed::{exact_confinement, killed_operator_report, KilledOperatorReport, SurvivalPoint};
pub use mc::{confinement_probability, mc_laplace, mc_laplace_multi, Estimate, Method, WalkEntry, WalkSeries, BATCH_SIZE};
pub use path::{simulate_walk, visited_count, WalkPath};

use thiserror::Error;

use crate::percolation::{ClusterError, ClusterGraph};

#[derive(Debug, Error, PartialEq)]
pub enum WalkError {
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error("the single-vertex cluster admits no steps (asked for {0})")]
    SingleVertex(usize),
    #[error("walk degrees differ from the adjacency; the graph is a truncated ball")]
    TruncatedGraph,
    #[error("alpha must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("need at least one sample")]
    NoSamples,
    #[error("enumeration needs about {required:.3e} path extensions, budget is {budget}")]
    BudgetExceeded { required: f64, budget: u64 },
    #[error("eigensolver did not converge (residual {residual:.3e})")]
    NoConvergence { residual: f64 },
    #[error("the ball has no killed mass (it is a whole finite component, or r = 0)")]
    NotKilled,
    #[error("ball of {size} vertices exceeds the eigensolver limit {limit}")]
    BallTooLarge { size: usize, limit: usize },
}

pub(crate) fn check_walkable(cluster: &ClusterGraph, n: usize) -> Result<usize, WalkError> {
    let origin = cluster.require_origin()?;
    if !cluster.is_closed() {
        return Err(WalkError::TruncatedGraph);
    }
    if n > 0 && cluster.len() == 1 {
        return Err(WalkError::SingleVertex(n));
    }
    Ok(origin)
}

pub(crate) fn check_alpha(alpha: f64) -> Result<(), WalkError> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(WalkError::InvalidAlpha(alpha))
    }
}
