use thiserror::Error;

use crate::percolation::ClusterGraph;

/// Largest base handled; lamp configurations are `u32` bitmasks.
pub const MAX_BASE: usize = 16;

#[derive(Debug, Error, PartialEq)]
pub enum WreathError {
    #[error("base has {0} vertices, at most {MAX_BASE} are supported")]
    BaseTooLarge(usize),
    #[error("base has no origin")]
    NoOrigin,
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("the single-vertex base has no walk")]
    SingleVertex,
    #[error("the identity holds from n = 1 on")]
    ZeroSteps,
    #[error(transparent)]
    Walk(#[from] crate::walk::WalkError),
}

/// `A ≀ Z/2Z` for a base graph `A`: vertices are pairs `(a, f)` with `f` a
/// lamp bitmask over the base vertices, stored at index `a · 2^|A| + f`.
///
/// `(a, f) ~ (a, f ^ {a})` flips the lamp at the walker, and
/// `(a, f) ~ (b, f)` moves along a base edge with the lamps frozen.
#[derive(Clone, Debug, PartialEq)]
pub struct WreathGraph {
    base: ClusterGraph,
}

impl WreathGraph {
    pub fn new(base: ClusterGraph) -> Result<Self, WreathError> {
        if base.len() > MAX_BASE {
            return Err(WreathError::BaseTooLarge(base.len()));
        }
        if base.origin().is_none() {
            return Err(WreathError::NoOrigin);
        }
        Ok(Self { base })
    }

    pub fn base(&self) -> &ClusterGraph {
        &self.base
    }

    pub fn sites(&self) -> usize {
        self.base.len()
    }

    /// `|A| · 2^|A|`.
    pub fn vertex_count(&self) -> usize {
        self.sites() << self.sites()
    }

    pub fn index(&self, a: usize, mask: u32) -> usize {
        (a << self.sites()) | mask as usize
    }

    pub fn decode(&self, v: usize) -> (usize, u32) {
        (v >> self.sites(), (v & ((1 << self.sites()) - 1)) as u32)
    }

    /// The distinguished point `(0, all lamps off)`.
    pub fn origin(&self) -> usize {
        self.index(self.base.origin().expect("checked at construction"), 0)
    }

    /// Base moves first, in base-neighbour order, then the lamp flip.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let (a, mask) = self.decode(v);
        let mut out: Vec<usize> = self.base.neighbors(a).iter().map(|&b| self.index(b, mask)).collect();
        out.push(self.index(a, mask ^ (1 << a)));
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.base.neighbors(self.decode(v).0).len() + 1
    }

    /// Edges `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for v in 0..self.vertex_count() {
            out.extend(self.neighbors(v).into_iter().filter(|&u| v < u).map(|u| (v, u)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        (0..self.vertex_count()).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// The wreath as a plain graph rooted at `o`.
    pub fn to_cluster(&self) -> ClusterGraph {
        ClusterGraph::from_edges(self.vertex_count(), &self.edges(), self.origin())
            .expect("wreath products of connected graphs are connected")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single() -> ClusterGraph {
        ClusterGraph::from_edges(1, &[], 0).unwrap()
    }

    #[test]
    fn sizes() {
        let w = WreathGraph::new(single()).unwrap();
        assert_eq!((w.vertex_count(), w.edge_count()), (2, 1));
        assert_eq!(WreathGraph::new(ClusterGraph::path(2)).unwrap().vertex_count(), 8);
        let p3 = WreathGraph::new(ClusterGraph::path(3)).unwrap();
        assert_eq!(p3.vertex_count(), 24);
        for v in 0..24 {
            let (a, _) = p3.decode(v);
            assert_eq!(p3.degree(v), p3.base().neighbors(a).len() + 1);
        }
    }

    #[test]
    fn rejects_large_base() {
        assert_eq!(
            WreathGraph::new(ClusterGraph::path(17)),
            Err(WreathError::BaseTooLarge(17))
        );
    }

    #[test]
    fn edge_families_are_disjoint_and_symmetric() {
        let w = WreathGraph::new(ClusterGraph::cycle(4)).unwrap();
        for v in 0..w.vertex_count() {
            let (a, f) = w.decode(v);
            for u in w.neighbors(v) {
                let (b, g) = w.decode(u);
                let moved = a != b && f == g;
                let flipped = a == b && (f ^ g) == 1 << a;
                assert!(moved ^ flipped);
                assert!(w.neighbors(u).contains(&v));
            }
        }
        assert!(w.to_cluster().is_connected());
    }
}
