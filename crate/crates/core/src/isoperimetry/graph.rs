use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::percolation::ClusterGraph;
use crate::wreath::WreathGraph;

#[derive(Debug, Error, PartialEq)]
pub enum IsoError {
    #[error("graph has {0} vertices; subset search supports at most 128")]
    TooLarge(usize),
    #[error("relative boundaries need lattice coordinates")]
    NotLattice,
    #[error("host vertex {0} is missing from the supergraph")]
    NotContained(usize),
    #[error("host is not an induced subgraph: edge at host vertex {0} is missing")]
    NotInduced(usize),
    #[error("adjacency is not symmetric at vertex {0}")]
    Asymmetric(usize),
    #[error("base graph does not match the wreath product")]
    BaseMismatch,
    #[error("subset is empty")]
    EmptySubset,
    #[error("precondition fails: boundary ratio {ratio} exceeds {limit}")]
    Precondition { ratio: f64, limit: f64 },
    #[error("premise fails at configuration {witness:#b}: only {flips} flips stay in the family")]
    PremiseViolated { witness: u32, flips: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    /// Edges of the graph itself.
    Internal,
    /// Edges of a supergraph; each vertex carries its count of edges leaving
    /// the host.
    Relative,
}

/// A host graph for subset searches. `external[v]` counts supergraph edges
/// from `v` to vertices outside the host (zero in internal mode).
#[derive(Clone, Debug, PartialEq)]
pub struct IsoGraph {
    adjacency: Vec<Vec<usize>>,
    external: Vec<usize>,
    mode: BoundaryMode,
}

impl IsoGraph {
    pub fn from_adjacency(adjacency: Vec<Vec<usize>>, external: Vec<usize>) -> Result<Self, IsoError> {
        assert_eq!(adjacency.len(), external.len());
        for (v, list) in adjacency.iter().enumerate() {
            if list.iter().any(|&u| u >= adjacency.len() || !adjacency[u].contains(&v)) {
                return Err(IsoError::Asymmetric(v));
            }
        }
        let mode = if external.iter().all(|&e| e == 0) { BoundaryMode::Internal } else { BoundaryMode::Relative };
        Ok(Self { adjacency, external, mode })
    }

    /// The graph as its own supergraph.
    pub fn internal(graph: &ClusterGraph) -> Self {
        Self {
            adjacency: (0..graph.len()).map(|v| graph.neighbors(v).to_vec()).collect(),
            external: vec![0; graph.len()],
            mode: BoundaryMode::Internal,
        }
    }

    /// Boundary counted in `supergraph`, matched by lattice coordinates.
    pub fn relative(host: &ClusterGraph, supergraph: &ClusterGraph) -> Result<Self, IsoError> {
        if host.lattice().is_none() || supergraph.lattice().is_none() {
            return Err(IsoError::NotLattice);
        }
        let mut image = Vec::with_capacity(host.len());
        for v in 0..host.len() {
            let point = host.point(v).expect("lattice host");
            image.push(supergraph.vertex_at(&point).ok_or(IsoError::NotContained(v))?);
        }
        let mut external = vec![0; host.len()];
        for v in 0..host.len() {
            let inside = supergraph
                .neighbors(image[v])
                .iter()
                .filter(|&&u| image.contains(&u))
                .count();
            if inside != host.neighbors(v).len() {
                return Err(IsoError::NotInduced(v));
            }
            external[v] = supergraph.degree(image[v]) - inside;
        }
        Ok(Self {
            adjacency: (0..host.len()).map(|v| host.neighbors(v).to_vec()).collect(),
            external,
            mode: BoundaryMode::Relative,
        })
    }

    /// Boundary counted against the walk degrees `ν` of `graph`, as for a
    /// chemical ball inside its cluster.
    pub fn with_walk_degrees(graph: &ClusterGraph) -> Self {
        let external: Vec<usize> = (0..graph.len()).map(|v| graph.degree(v) - graph.neighbors(v).len()).collect();
        let mode = if external.iter().all(|&e| e == 0) { BoundaryMode::Internal } else { BoundaryMode::Relative };
        Self {
            adjacency: (0..graph.len()).map(|v| graph.neighbors(v).to_vec()).collect(),
            external,
            mode,
        }
    }

    /// The wreath product with the base's external edges lifted: `(a, f)`
    /// has `external[a]` edges leaving.
    pub fn wreath(wreath: &WreathGraph, base: &IsoGraph) -> Result<Self, IsoError> {
        if base.len() != wreath.sites() {
            return Err(IsoError::BaseMismatch);
        }
        let n = wreath.vertex_count();
        Ok(Self {
            adjacency: (0..n).map(|v| wreath.neighbors(v)).collect(),
            external: (0..n).map(|v| base.external[wreath.decode(v).0]).collect(),
            mode: base.mode,
        })
    }

    /// The graph carrying the lamplighter walk's jumps: `(a, f) ~ (b, g)`
    /// when `a ~ b` and `g` agrees with `f` off `{a, b}`. A base edge leaving
    /// the host lifts to four leaving edges.
    pub fn wreath_jumps(wreath: &WreathGraph, base: &IsoGraph) -> Result<Self, IsoError> {
        if base.len() != wreath.sites() {
            return Err(IsoError::BaseMismatch);
        }
        let n = wreath.vertex_count();
        let adjacency = (0..n)
            .map(|v| {
                let (a, mask) = wreath.decode(v);
                let mut out = Vec::with_capacity(4 * base.adjacency[a].len());
                for &b in &base.adjacency[a] {
                    let rest = mask & !(1 << a) & !(1 << b);
                    for (x, y) in [(0u32, 0u32), (1, 0), (0, 1), (1, 1)] {
                        out.push(wreath.index(b, rest | (x << a) | (y << b)));
                    }
                }
                out
            })
            .collect();
        Ok(Self {
            adjacency,
            external: (0..n).map(|v| 4 * base.external[wreath.decode(v).0]).collect(),
            mode: base.mode,
        })
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn mode(&self) -> BoundaryMode {
        self.mode
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn external(&self, v: usize) -> usize {
        self.external[v]
    }

    /// Degree in the supergraph.
    pub fn total_degree(&self, v: usize) -> usize {
        self.adjacency[v].len() + self.external[v]
    }

    /// `|∂A|` for the member flags `members`.
    pub fn boundary_size(&self, members: &[bool]) -> usize {
        (0..self.len())
            .filter(|&v| members[v])
            .map(|v| self.external[v] + self.adjacency[v].iter().filter(|&&u| !members[u]).count())
            .sum()
    }

    pub fn is_connected_subset(&self, members: &[bool]) -> bool {
        let Some(start) = members.iter().position(|&m| m) else {
            return false;
        };
        let mut seen = vec![false; self.len()];
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &u in &self.adjacency[v] {
                if members[u] && !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == members.iter().filter(|&&m| m).count()
    }
}

/// A subset of a host graph.
#[derive(Clone, Debug)]
pub struct SubsetSelection<'a> {
    graph: &'a IsoGraph,
    members: Vec<bool>,
}

impl<'a> SubsetSelection<'a> {
    pub fn new(graph: &'a IsoGraph, vertices: &[usize]) -> Self {
        let mut members = vec![false; graph.len()];
        for &v in vertices {
            members[v] = true;
        }
        Self { graph, members }
    }

    pub fn from_flags(graph: &'a IsoGraph, members: Vec<bool>) -> Self {
        assert_eq!(members.len(), graph.len());
        Self { graph, members }
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members[v]
    }

    pub fn complement(&self) -> Self {
        Self { graph: self.graph, members: self.members.iter().map(|m| !m).collect() }
    }

    pub fn boundary_size(&self) -> usize {
        self.graph.boundary_size(&self.members)
    }

    pub fn is_connected(&self) -> bool {
        self.graph.is_connected_subset(&self.members)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::percolation::{BondConfiguration, LatticeSpec};

    fn plane(n: usize) -> ClusterGraph {
        ClusterGraph::component_of_origin(&BondConfiguration::full(LatticeSpec::new(2, n).unwrap()))
    }

    #[test]
    fn point_and_domino_in_the_plane() {
        let host = plane(2);
        let g = IsoGraph::relative(&host, &plane(3)).unwrap();
        let o = host.origin().unwrap();
        let e1 = host.vertex_at(&[1, 0]).unwrap();
        assert_eq!(SubsetSelection::new(&g, &[o]).boundary_size(), 4);
        assert_eq!(SubsetSelection::new(&g, &[o, e1]).boundary_size(), 6);
        // corner of the host box: two edges leave it
        let corner = host.vertex_at(&[2, 2]).unwrap();
        assert_eq!(g.external(corner), 2);
    }

    #[test]
    fn complement_has_equal_internal_boundary() {
        let g = IsoGraph::internal(&plane(2));
        let s = SubsetSelection::new(&g, &[0, 3, 7, 12, 13]);
        assert_eq!(s.boundary_size(), s.complement().boundary_size());
    }

    #[test]
    fn relative_requires_induced_host() {
        let spec = LatticeSpec::new(2, 2).unwrap();
        let mut config = BondConfiguration::full(spec);
        config.set_open(spec.origin_index(), 0, false);
        let host = ClusterGraph::component_of_origin(&config);
        assert!(matches!(IsoGraph::relative(&host, &plane(2)), Err(IsoError::NotInduced(_))));
        assert_eq!(IsoGraph::relative(&ClusterGraph::path(2), &plane(2)), Err(IsoError::NotLattice));
    }

    #[test]
    fn wreath_lifts_external_edges() {
        let host = ClusterGraph::component_of_origin(&BondConfiguration::closed(LatticeSpec::new(2, 1).unwrap()));
        let base = IsoGraph::relative(&host, &plane(1)).unwrap();
        let w = WreathGraph::new(host).unwrap();
        let g = IsoGraph::wreath(&w, &base).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g.total_degree(0), 5);
        let j = IsoGraph::wreath_jumps(&w, &base).unwrap();
        assert_eq!(j.total_degree(0), 16);
    }

    #[test]
    fn jump_graph_is_the_kernel_support() {
        let w = WreathGraph::new(ClusterGraph::path(3)).unwrap();
        let j = IsoGraph::wreath_jumps(&w, &IsoGraph::internal(w.base())).unwrap();
        let k = crate::wreath::LamplighterKernel::new(ClusterGraph::path(3), 0.4).unwrap();
        for v in 0..j.len() {
            let mut a: Vec<usize> = j.neighbors(v).to_vec();
            let mut b: Vec<usize> = k.step_distribution(v).iter().map(|&(t, _)| t).collect();
            a.sort_unstable();
            b.sort_unstable();
            assert_eq!(a, b);
        }
    }
}
