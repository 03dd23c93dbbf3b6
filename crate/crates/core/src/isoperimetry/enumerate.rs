use rayon::prelude::*;

use super::graph::{IsoError, IsoGraph};

/// Subset searches store sets as `u128` bitmasks.
pub const MAX_VERTICES: usize = 128;

/// Receives every connected subset exactly once, with its size and
/// boundary. `limit` may shrink during the search to prune larger sets.
pub(crate) trait Visitor {
    fn visit(&mut self, set: u128, size: usize, boundary: usize);
    fn limit(&self) -> usize;
}

pub(crate) fn masks(graph: &IsoGraph) -> Result<Vec<u128>, IsoError> {
    if graph.len() > MAX_VERTICES {
        return Err(IsoError::TooLarge(graph.len()));
    }
    Ok((0..graph.len())
        .map(|v| graph.neighbors(v).iter().fold(0u128, |m, &u| m | (1 << u)))
        .collect())
}

struct Search<'a, V> {
    nbr: &'a [u128],
    degree: Vec<usize>,
    visitor: V,
}

impl<V: Visitor> Search<'_, V> {
    // ESU: extend only by vertices above the root that are not already
    // adjacent to the current set, so each connected set is reached once.
    fn grow(&mut self, set: u128, size: usize, boundary: usize, mut ext: u128, root: usize, closed: u128) {
        self.visitor.visit(set, size, boundary);
        while ext != 0 && size < self.visitor.limit() {
            let w = ext.trailing_zeros() as usize;
            ext &= ext - 1;
            let fresh = self.nbr[w] & !closed & !low_mask(root + 1);
            let inner = (self.nbr[w] & set).count_ones() as usize;
            let next_boundary = boundary + self.degree[w] - 2 * inner;
            self.grow(set | (1 << w), size + 1, next_boundary, ext | fresh, root, closed | self.nbr[w]);
        }
    }
}

fn low_mask(k: usize) -> u128 {
    if k >= 128 {
        u128::MAX
    } else {
        (1u128 << k) - 1
    }
}

/// Runs one visitor per root vertex in parallel; each sees the connected
/// sets whose smallest vertex is that root. Results come back in root order.
pub(crate) fn search_by_root<V, F>(graph: &IsoGraph, make: F) -> Result<Vec<V>, IsoError>
where
    V: Visitor + Send,
    F: Fn(usize) -> V + Sync,
{
    let nbr = masks(graph)?;
    let degree: Vec<usize> = (0..graph.len()).map(|v| graph.total_degree(v)).collect();
    Ok((0..graph.len())
        .into_par_iter()
        .map(|root| {
            let mut search = Search { nbr: &nbr, degree: degree.clone(), visitor: make(root) };
            if search.visitor.limit() > 0 {
                let ext = nbr[root] & !low_mask(root + 1);
                search.grow(1 << root, 1, degree[root], ext, root, nbr[root] | (1 << root));
            }
            search.visitor
        })
        .collect())
}

struct Collect {
    cap: usize,
    sets: Vec<(u128, usize)>,
}

impl Visitor for Collect {
    fn visit(&mut self, set: u128, _size: usize, boundary: usize) {
        self.sets.push((set, boundary));
    }
    fn limit(&self) -> usize {
        self.cap
    }
}

/// All connected subsets with at most `cap` vertices, as
/// `(bitmask, boundary size)` pairs.
pub fn connected_subsets(graph: &IsoGraph, cap: usize) -> Result<Vec<(u128, usize)>, IsoError> {
    let parts = search_by_root(graph, |_| Collect { cap, sets: Vec::new() })?;
    Ok(parts.into_iter().flat_map(|c| c.sets).collect())
}

pub(crate) fn vertices_of(mut set: u128) -> Vec<usize> {
    let mut out = Vec::with_capacity(set.count_ones() as usize);
    while set != 0 {
        out.push(set.trailing_zeros() as usize);
        set &= set - 1;
    }
    out
}
