use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::folner::{folner_function, FolnerValue};
use super::graph::{IsoError, IsoGraph};
use crate::wreath::WreathGraph;

/// `K_U` for a subset `U` of a wreath product: one vertex per lamp
/// configuration seen in `U`, and an edge `f – g` when they differ only at
/// a site `a` with both `(a, f)` and `(a, g)` in `U`.
#[derive(Clone, Debug)]
pub struct ConfigurationGraph {
    configs: Vec<u32>,
    edges: Vec<(usize, usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    points: Vec<(usize, u32)>,
    good: Vec<bool>,
}

/// The split of `K_U` by `b`-satisfiability (degree at least `b`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Satisfiability {
    pub b: f64,
    pub satisfiable: Vec<u32>,
    pub unsatisfiable: Vec<u32>,
    pub satisfied_edges: usize,
    pub unsatisfied_edges: usize,
    pub satisfied_points: usize,
    pub unsatisfied_points: usize,
}

impl ConfigurationGraph {
    pub fn new(wreath: &WreathGraph, subset: &[usize]) -> Result<Self, IsoError> {
        let members: HashSet<usize> = subset.iter().copied().collect();
        if members.is_empty() {
            return Err(IsoError::EmptySubset);
        }
        let mut points: Vec<(usize, u32)> = members.iter().map(|&v| wreath.decode(v)).collect();
        points.sort_unstable_by_key(|&(a, f)| (f, a));
        let mut index = BTreeMap::new();
        for &(_, f) in &points {
            let next = index.len();
            index.entry(f).or_insert(next);
        }
        let configs: Vec<u32> = index.keys().copied().collect();
        let index: BTreeMap<u32, usize> = configs.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let mut edges = Vec::new();
        let mut adjacency = vec![Vec::new(); configs.len()];
        let mut good = Vec::with_capacity(points.len());
        for &(a, f) in &points {
            let g = f ^ (1 << a);
            let paired = members.contains(&wreath.index(a, g));
            good.push(paired);
            if paired && f < g {
                let (i, j) = (index[&f], index[&g]);
                edges.push((i, j, a));
                adjacency[i].push(j);
                adjacency[j].push(i);
            }
        }
        Ok(Self { configs, edges, adjacency, points, good })
    }

    pub fn configs(&self) -> &[u32] {
        &self.configs
    }

    pub fn vertex_count(&self) -> usize {
        self.configs.len()
    }

    /// Edges as `(config index, config index, site)`.
    pub fn edges(&self) -> &[(usize, usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn degree(&self, config: usize) -> usize {
        self.adjacency[config].len()
    }

    /// `|U|`.
    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    /// A point `(x, f)` is good when `(x, f` flipped at `x)` is also in `U`.
    pub fn bad_points(&self) -> Vec<(usize, u32)> {
        self.points.iter().zip(&self.good).filter(|(_, &g)| !g).map(|(&p, _)| p).collect()
    }

    pub fn good_point_count(&self) -> usize {
        self.good.iter().filter(|&&g| g).count()
    }

    /// `|U| ≥ 2 |E(K_U)|`, with equality exactly when every point is good.
    pub fn edge_count_bound_holds(&self) -> bool {
        let ok = self.point_count() >= 2 * self.edge_count();
        let tight = self.point_count() == 2 * self.edge_count();
        ok && tight == self.bad_points().is_empty()
    }

    fn satisfied(&self, config: usize, b: f64) -> bool {
        self.degree(config) as f64 >= b
    }

    pub fn classify(&self, b: f64) -> Satisfiability {
        let (sat, unsat): (Vec<usize>, Vec<usize>) = (0..self.vertex_count()).partition(|&i| self.satisfied(i, b));
        let satisfied_edges = self
            .edges
            .iter()
            .filter(|&&(i, j, _)| self.satisfied(i, b) && self.satisfied(j, b))
            .count();
        let cfg_index: BTreeMap<u32, usize> = self.configs.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let satisfied_points = self.points.iter().filter(|(_, f)| self.satisfied(cfg_index[f], b)).count();
        Satisfiability {
            b,
            satisfiable: sat.iter().map(|&i| self.configs[i]).collect(),
            unsatisfiable: unsat.iter().map(|&i| self.configs[i]).collect(),
            satisfied_edges,
            unsatisfied_edges: self.edge_count() - satisfied_edges,
            satisfied_points,
            unsatisfied_points: self.point_count() - satisfied_points,
        }
    }
}

/// Both fractions bounded for a wreath subset with a small boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeudReport {
    pub k: f64,
    pub size: usize,
    pub boundary: usize,
    /// `Fol` of the base at `k`; `None` when no base set qualifies.
    pub phi: Option<usize>,
    pub bad_fraction: f64,
    pub bad_limit: f64,
    /// Share of points whose configuration has degree below `phi/3`.
    pub neud_fraction: Option<f64>,
    pub neud_limit: f64,
}

impl NeudReport {
    pub fn holds(&self) -> bool {
        self.bad_fraction <= self.bad_limit && self.neud_fraction.map_or(true, |f| f <= self.neud_limit)
    }
}

/// Checks a wreath subset `U` with `|∂U|/|U| ≤ 1/(1000k)` (boundary in the
/// lifted `base`): at most a `1/(1000k)` share of bad points, and at most
/// `1/500` of points sitting on configurations of degree below `Fol_A(k)/3`.
pub fn lemma_neud_check(
    wreath: &WreathGraph,
    base: &IsoGraph,
    subset: &[usize],
    k: f64,
) -> Result<NeudReport, IsoError> {
    let lifted = IsoGraph::wreath(wreath, base)?;
    let k_graph = ConfigurationGraph::new(wreath, subset)?;
    let mut flags = vec![false; lifted.len()];
    for &v in subset {
        flags[v] = true;
    }
    let size = k_graph.point_count();
    let boundary = lifted.boundary_size(&flags);
    let bad_limit = 1.0 / (1000.0 * k);
    let ratio = boundary as f64 / size as f64;
    if ratio > bad_limit {
        return Err(IsoError::Precondition { ratio, limit: bad_limit });
    }
    let phi = match folner_function(base, k, base.len(), true)?.value {
        FolnerValue::Exact(v) => Some(v),
        _ => None,
    };
    let cfg_index: BTreeMap<u32, usize> = k_graph.configs.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let neud_fraction = phi.map(|phi| {
        let neud = k_graph
            .points
            .iter()
            .filter(|(_, f)| 3 * k_graph.degree(cfg_index[f]) < phi)
            .count();
        neud as f64 / size as f64
    });
    Ok(NeudReport {
        k,
        size,
        boundary,
        phi,
        bad_fraction: k_graph.bad_points().len() as f64 / size as f64,
        bad_limit,
        neud_fraction,
        neud_limit: 1.0 / 500.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::percolation::ClusterGraph;

    fn k2() -> WreathGraph {
        WreathGraph::new(ClusterGraph::path(2)).unwrap()
    }

    #[test]
    fn full_k2_wreath_gives_square() {
        let w = k2();
        let all: Vec<usize> = (0..w.vertex_count()).collect();
        let k = ConfigurationGraph::new(&w, &all).unwrap();
        assert_eq!(k.vertex_count(), 4);
        assert_eq!(k.edge_count(), 4);
        assert!((0..4).all(|i| k.degree(i) == 2));
        assert!(k.bad_points().is_empty());
        assert!(k.edge_count_bound_holds());
        assert_eq!(k.point_count(), 2 * k.edge_count());
    }

    #[test]
    fn single_point_is_bad() {
        let w = k2();
        let k = ConfigurationGraph::new(&w, &[w.origin()]).unwrap();
        assert_eq!((k.vertex_count(), k.edge_count()), (1, 0));
        assert_eq!(k.bad_points(), vec![(0, 0)]);
        assert!(k.edge_count_bound_holds());
        assert!(ConfigurationGraph::new(&w, &[]).is_err());
    }

    #[test]
    fn classify_splits_edges_and_points() {
        let w = k2();
        // (0,00), (0,01), (1,00): one edge 00–01 at site 0; (1,00) is bad.
        let u = [w.index(0, 0), w.index(0, 1), w.index(1, 0)];
        let k = ConfigurationGraph::new(&w, &u).unwrap();
        assert_eq!(k.edges(), &[(0, 1, 0)]);
        let s = k.classify(1.0);
        assert_eq!(s.satisfiable, vec![0, 1]);
        assert_eq!((s.satisfied_edges, s.unsatisfied_edges), (1, 0));
        assert_eq!((s.satisfied_points, s.unsatisfied_points), (3, 0));
        let s = k.classify(2.0);
        assert_eq!(s.unsatisfiable, vec![0, 1]);
        assert_eq!(s.unsatisfied_points, 3);
    }

    #[test]
    fn whole_wreath_passes_trivially() {
        let base = ClusterGraph::path(3);
        let w = WreathGraph::new(base.clone()).unwrap();
        let all: Vec<usize> = (0..w.vertex_count()).collect();
        let report = lemma_neud_check(&w, &IsoGraph::internal(&base), &all, 2.0).unwrap();
        assert_eq!(report.boundary, 0);
        assert_eq!(report.bad_fraction, 0.0);
        assert_eq!(report.neud_fraction, Some(0.0));
        assert!(report.holds());
        let err = lemma_neud_check(&w, &IsoGraph::internal(&base), &all[..12], 2.0);
        assert!(matches!(err, Err(IsoError::Precondition { .. })));
    }
}
