use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::BondConfiguration;
use super::lattice::LatticeSpec;

#[derive(Debug, Error, PartialEq)]
pub enum ClusterError {
    #[error("graph has no vertices")]
    Empty,
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
    #[error("self-loop or repeated edge at ({0}, {1})")]
    BadEdge(usize, usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("vertex {0} is not reachable from the origin")]
    Unreachable(usize),
    #[error("cluster has no distinguished origin")]
    NoOrigin,
    #[error("ball radius {r} needs a sampled box of radius at least {needed}, got {n}")]
    BoxTooSmall { r: usize, n: usize, needed: usize },
}

/// `|A| / s^d` kept as an exact pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeRatio {
    pub volume: usize,
    pub scale: usize,
}

impl VolumeRatio {
    pub fn value(&self) -> f64 {
        self.volume as f64 / self.scale as f64
    }
}

/// A connected graph with a distinguished origin, usually an open cluster of
/// a sampled box.
///
/// `degree(v)` is the walk degree `ν(v)`. For clusters and hand-built graphs
/// it is the adjacency length; for chemical balls it is the degree in the
/// ambient open graph, so edges leaving the ball still count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterGraph {
    dim: usize,
    lattice: Option<LatticeSpec>,
    box_index: Vec<usize>,
    adjacency: Vec<Vec<usize>>,
    degrees: Vec<usize>,
    origin: Option<usize>,
}

impl ClusterGraph {
    /// Builds an abstract connected graph on `0..vertex_count`.
    pub fn from_edges(
        vertex_count: usize,
        edges: &[(usize, usize)],
        origin: usize,
    ) -> Result<Self, ClusterError> {
        if vertex_count == 0 {
            return Err(ClusterError::Empty);
        }
        if origin >= vertex_count {
            return Err(ClusterError::VertexOutOfRange(origin));
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(a, b) in edges {
            if a >= vertex_count || b >= vertex_count {
                return Err(ClusterError::VertexOutOfRange(a.max(b)));
            }
            if a == b || adjacency[a].contains(&b) {
                return Err(ClusterError::BadEdge(a, b));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let degrees = adjacency.iter().map(Vec::len).collect::<Vec<_>>();
        let max_degree = degrees.iter().copied().max().unwrap_or(0);
        let graph = Self {
            dim: max_degree.div_ceil(2).max(1),
            lattice: None,
            box_index: Vec::new(),
            adjacency,
            degrees,
            origin: Some(origin),
        };
        if !graph.is_connected() {
            return Err(ClusterError::Disconnected);
        }
        Ok(graph)
    }

    /// Path graph `P_k` on `k` vertices with origin at vertex 0.
    pub fn path(k: usize) -> Self {
        let edges: Vec<_> = (1..k).map(|i| (i - 1, i)).collect();
        Self::from_edges(k, &edges, 0).expect("paths are connected")
    }

    /// Cycle `C_k`, `k ≥ 3`, with origin at vertex 0.
    pub fn cycle(k: usize) -> Self {
        assert!(k >= 3, "cycles need at least 3 vertices");
        let edges: Vec<_> = (0..k).map(|i| (i, (i + 1) % k)).collect();
        Self::from_edges(k, &edges, 0).expect("cycles are connected")
    }

    /// Complete graph `K_k` with origin at vertex 0.
    pub fn complete(k: usize) -> Self {
        let mut edges = Vec::new();
        for a in 0..k {
            for b in a + 1..k {
                edges.push((a, b));
            }
        }
        Self::from_edges(k, &edges, 0).expect("complete graphs are connected")
    }

    /// Star `K_{1,k}` centred at the origin.
    pub fn star(k: usize) -> Self {
        let edges: Vec<_> = (1..=k).map(|i| (0, i)).collect();
        Self::from_edges(k + 1, &edges, 0).expect("stars are connected")
    }

    /// The open component of the box containing the origin, `C_n`.
    pub fn component_of_origin(config: &BondConfiguration) -> Self {
        let spec = config.spec();
        let members = flood(config, spec.origin_index(), usize::MAX);
        Self::from_box_vertices(config, members, None)
    }

    /// The largest open component of the box, `L_n`.
    ///
    /// Only vertices with an open incident edge are candidates. Ties go to
    /// the component whose lexicographically smallest point is smallest.
    /// Returns `None` when no edge is open.
    pub fn largest_cluster(config: &BondConfiguration) -> Option<Self> {
        let spec = config.spec();
        let mut seen = vec![false; spec.volume()];
        let mut best: Option<(usize, Vec<i32>, Vec<usize>)> = None;
        for start in 0..spec.volume() {
            if seen[start] || config.open_degree(start) == 0 {
                continue;
            }
            let members = flood(config, start, usize::MAX);
            for &v in &members {
                seen[v] = true;
            }
            let smallest = members.iter().map(|&v| spec.point_of(v)).min().expect("nonempty");
            let better = match &best {
                None => true,
                Some((size, point, _)) => {
                    members.len() > *size || (members.len() == *size && smallest < *point)
                }
            };
            if better {
                best = Some((members.len(), smallest, members));
            }
        }
        best.map(|(_, _, members)| Self::from_box_vertices(config, members, None))
    }

    /// The chemical ball `B_r(C)` with the induced open adjacency.
    ///
    /// Degrees are taken in the whole open graph of the box. The box must
    /// satisfy `n ≥ r` so that no geodesic of length `≤ r` leaves it.
    pub fn chemical_ball(config: &BondConfiguration, r: usize) -> Result<Self, ClusterError> {
        let spec = config.spec();
        if spec.radius() < r {
            return Err(ClusterError::BoxTooSmall { r, n: spec.radius(), needed: r });
        }
        let members = flood(config, spec.origin_index(), r);
        let degrees: Vec<usize> = {
            let mut sorted = members.clone();
            sorted.sort_unstable();
            sorted.iter().map(|&v| config.open_degree(v)).collect()
        };
        Ok(Self::from_box_vertices(config, members, Some(degrees)))
    }

    fn from_box_vertices(
        config: &BondConfiguration,
        mut members: Vec<usize>,
        degrees: Option<Vec<usize>>,
    ) -> Self {
        let spec = config.spec();
        members.sort_unstable();
        let local = |idx: usize| members.binary_search(&idx).ok();
        let adjacency: Vec<Vec<usize>> = members
            .iter()
            .map(|&v| {
                let mut list: Vec<usize> = config.open_neighbors(v).filter_map(local).collect();
                list.sort_unstable();
                list
            })
            .collect();
        let degrees = degrees.unwrap_or_else(|| adjacency.iter().map(Vec::len).collect());
        let origin = local(spec.origin_index());
        Self {
            dim: spec.dim(),
            lattice: Some(spec),
            box_index: members,
            adjacency,
            degrees,
            origin,
        }
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    /// Always false: clusters hold at least one vertex.
    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    /// Lattice dimension, or `⌈max degree / 2⌉` for abstract graphs.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The sampled box, for lattice clusters.
    pub fn lattice(&self) -> Option<LatticeSpec> {
        self.lattice
    }

    pub fn origin(&self) -> Option<usize> {
        self.origin
    }

    pub fn require_origin(&self) -> Result<usize, ClusterError> {
        self.origin.ok_or(ClusterError::NoOrigin)
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Walk degree `ν(v)`.
    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// True when every walk degree equals the adjacency length.
    pub fn is_closed(&self) -> bool {
        self.adjacency.iter().zip(&self.degrees).all(|(a, &d)| a.len() == d)
    }

    /// Lattice point of `v`, for lattice clusters.
    pub fn point(&self, v: usize) -> Option<Vec<i32>> {
        self.lattice.map(|spec| spec.point_of(self.box_index[v]))
    }

    /// Local index of a lattice point.
    pub fn vertex_at(&self, point: &[i32]) -> Option<usize> {
        let idx = self.lattice?.index_of(point)?;
        self.box_index.binary_search(&idx).ok()
    }

    /// Edges `(a, b)` with `a < b`, in increasing order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, list) in self.adjacency.iter().enumerate() {
            out.extend(list.iter().filter(|&&b| a < b).map(|&b| (a, b)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_connected(&self) -> bool {
        self.distances_from(0).iter().all(Option::is_some)
    }

    pub fn is_bipartite(&self) -> bool {
        let dist = self.distances_from(0);
        self.edges().iter().all(|&(a, b)| dist[a].map(|x| x % 2) != dist[b].map(|x| x % 2))
    }

    /// Breadth-first graph distances from `source`; `None` when unreachable.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        if source >= self.len() {
            return dist;
        }
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let next = dist[v].map(|x| x + 1);
            for &u in &self.adjacency[v] {
                if dist[u].is_none() {
                    dist[u] = next;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Chemical distances `D(0, x)` from the origin.
    pub fn chemical_distances(&self) -> Result<Vec<Option<usize>>, ClusterError> {
        Ok(self.distances_from(self.require_origin()?))
    }

    /// `D(0, x)`.
    pub fn chemical_distance(&self, x: usize) -> Result<usize, ClusterError> {
        if x >= self.len() {
            return Err(ClusterError::VertexOutOfRange(x));
        }
        self.chemical_distances()?[x].ok_or(ClusterError::Unreachable(x))
    }

    /// The chemical ball of radius `r` inside this graph, keeping the walk
    /// degrees of this graph.
    ///
    /// For a lattice cluster `C_n` the degrees agree with those of the
    /// infinite cluster only on vertices strictly inside the box, so
    /// `n ≥ r + 1` is required.
    pub fn ball(&self, r: usize) -> Result<Self, ClusterError> {
        if let Some(spec) = self.lattice {
            if spec.radius() < r + 1 {
                return Err(ClusterError::BoxTooSmall { r, n: spec.radius(), needed: r + 1 });
            }
        }
        self.induced_ball(r)
    }

    /// Vertices within chemical distance `r` of the origin, with the walk
    /// degrees of this graph and no box-size check.
    pub fn induced_ball(&self, r: usize) -> Result<Self, ClusterError> {
        let dist = self.chemical_distances()?;
        let keep: Vec<usize> = (0..self.len()).filter(|&v| dist[v].is_some_and(|x| x <= r)).collect();
        Ok(self.induced(&keep))
    }

    /// Subgraph induced on the sorted vertex list `keep`, keeping degrees.
    fn induced(&self, keep: &[usize]) -> Self {
        let local = |v: usize| keep.binary_search(&v).ok();
        let adjacency = keep
            .iter()
            .map(|&v| self.adjacency[v].iter().filter_map(|&u| local(u)).collect())
            .collect();
        Self {
            dim: self.dim,
            lattice: self.lattice,
            box_index: if self.lattice.is_some() {
                keep.iter().map(|&v| self.box_index[v]).collect()
            } else {
                Vec::new()
            },
            adjacency,
            degrees: keep.iter().map(|&v| self.degrees[v]).collect(),
            origin: self.origin.and_then(local),
        }
    }

    /// Same graph with vertex `v` renamed `perm[v]`; lattice data is dropped.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.len());
        let mut adjacency = vec![Vec::new(); self.len()];
        let mut degrees = vec![0; self.len()];
        for v in 0..self.len() {
            let mut list: Vec<usize> = self.adjacency[v].iter().map(|&u| perm[u]).collect();
            list.sort_unstable();
            adjacency[perm[v]] = list;
            degrees[perm[v]] = self.degrees[v];
        }
        Self {
            dim: self.dim,
            lattice: None,
            box_index: Vec::new(),
            adjacency,
            degrees,
            origin: self.origin.map(|o| perm[o]),
        }
    }

    /// `|C_n| / n^d` for the origin component of `config`.
    pub fn volume_growth_ratio(config: &BondConfiguration) -> VolumeRatio {
        let spec = config.spec();
        assert!(spec.radius() >= 1, "volume ratio needs n >= 1");
        VolumeRatio {
            volume: Self::component_of_origin(config).len(),
            scale: spec.radius().pow(spec.dim() as u32),
        }
    }

    /// `|B_r(C)| / r^d`.
    pub fn ball_growth_ratio(config: &BondConfiguration, r: usize) -> Result<VolumeRatio, ClusterError> {
        assert!(r >= 1, "ball ratio needs r >= 1");
        let spec = config.spec();
        Ok(VolumeRatio {
            volume: Self::chemical_ball(config, r)?.len(),
            scale: r.pow(spec.dim() as u32),
        })
    }
}

/// Breadth-first search over open edges from `start`, stopping at depth
/// `max_depth`, returning the reached box indices.
fn flood(config: &BondConfiguration, start: usize, max_depth: usize) -> Vec<usize> {
    let volume = config.spec().volume();
    let mut depth = vec![usize::MAX; volume];
    depth[start] = 0;
    let mut order = vec![start];
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        if depth[v] == max_depth {
            continue;
        }
        for u in config.open_neighbors(v) {
            if depth[u] == usize::MAX {
                depth[u] = depth[v] + 1;
                order.push(u);
            }
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(d: usize, n: usize) -> LatticeSpec {
        LatticeSpec::new(d, n).unwrap()
    }

    fn l1(p: &[i32]) -> usize {
        p.iter().map(|x| x.unsigned_abs() as usize).sum()
    }

    #[test]
    fn full_box_is_one_cluster() {
        let s = spec(2, 3);
        let c = ClusterGraph::component_of_origin(&BondConfiguration::full(s));
        assert_eq!(c.len(), 49);
        assert_eq!(c.edge_count(), s.edge_count());
        let l = ClusterGraph::largest_cluster(&BondConfiguration::full(s)).unwrap();
        assert_eq!(l, c);
    }

    #[test]
    fn closed_box_isolates_origin() {
        let s = spec(2, 2);
        let config = BondConfiguration::closed(s);
        let c = ClusterGraph::component_of_origin(&config);
        assert_eq!(c.len(), 1);
        assert_eq!(c.edge_count(), 0);
        assert_eq!(c.degree(0), 0);
        assert_eq!(c.point(0), Some(vec![0, 0]));
        assert!(ClusterGraph::largest_cluster(&config).is_none());
        assert_eq!(ClusterGraph::volume_growth_ratio(&config), VolumeRatio { volume: 1, scale: 4 });
    }

    #[test]
    fn largest_prefers_strict_maximum_then_lexicographic() {
        let s = spec(2, 4);
        let mut config = BondConfiguration::closed(s);
        let at = |x: i32, y: i32| s.index_of(&[x, y]).unwrap();
        // five vertices along y = 2, three along y = -3
        for x in -2..2 {
            config.set_open(at(x, 2), 0, true);
        }
        for x in 0..2 {
            config.set_open(at(x, -3), 0, true);
        }
        let l = ClusterGraph::largest_cluster(&config).unwrap();
        assert_eq!(l.len(), 5);
        assert_eq!(l.origin(), None);
        // a second three-vertex component closer to the lexicographic start
        for x in -4..-2 {
            config.set_open(at(x, -1), 0, true);
        }
        config.set_open(at(-2, 2), 0, false);
        config.set_open(at(-1, 2), 0, false);
        let l = ClusterGraph::largest_cluster(&config).unwrap();
        assert_eq!(l.len(), 3);
        assert_eq!(l.point(0), Some(vec![-4, -1]));
    }

    #[test]
    fn full_lattice_distance_is_l1() {
        for d in [2, 3] {
            for n in 0..=5 {
                let s = spec(d, n);
                let c = ClusterGraph::component_of_origin(&BondConfiguration::full(s));
                let dist = c.chemical_distances().unwrap();
                for v in 0..c.len() {
                    assert_eq!(dist[v], Some(l1(&c.point(v).unwrap())));
                }
            }
        }
    }

    #[test]
    fn ball_zero_is_origin() {
        let s = spec(2, 3);
        let config = BondConfiguration::sample(s, 0.7, 3).unwrap();
        let b = ClusterGraph::chemical_ball(&config, 0).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.degree(0), config.open_degree(s.origin_index()));
    }

    #[test]
    fn ball_needs_large_enough_box() {
        let config = BondConfiguration::full(spec(2, 3));
        assert!(matches!(
            ClusterGraph::chemical_ball(&config, 4),
            Err(ClusterError::BoxTooSmall { .. })
        ));
        let c = ClusterGraph::component_of_origin(&config);
        assert!(c.ball(3).is_err());
        assert_eq!(c.ball(2).unwrap().len(), 13);
        assert!(c.ball(2).unwrap().degrees().iter().all(|&d| d == 4));
    }

    #[test]
    fn full_ball_sizes() {
        let config = BondConfiguration::full(spec(2, 6));
        for r in 0..=6 {
            let b = ClusterGraph::chemical_ball(&config, r).unwrap();
            assert_eq!(b.len(), 2 * r * r + 2 * r + 1);
        }
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert_eq!(ClusterGraph::from_edges(0, &[], 0), Err(ClusterError::Empty));
        assert_eq!(ClusterGraph::from_edges(3, &[(0, 1)], 0), Err(ClusterError::Disconnected));
        assert_eq!(ClusterGraph::from_edges(2, &[(0, 0)], 0), Err(ClusterError::BadEdge(0, 0)));
        assert_eq!(
            ClusterGraph::from_edges(2, &[(0, 1), (1, 0)], 0),
            Err(ClusterError::BadEdge(1, 0))
        );
        assert_eq!(ClusterGraph::from_edges(2, &[(0, 2)], 0), Err(ClusterError::VertexOutOfRange(2)));
    }

    #[test]
    fn unreachable_distance_is_reported() {
        let s = spec(2, 3);
        let mut config = BondConfiguration::closed(s);
        config.set_open(s.index_of(&[1, 1]).unwrap(), 0, true);
        config.set_open(s.index_of(&[1, 1]).unwrap(), 1, true);
        let l = ClusterGraph::largest_cluster(&config).unwrap();
        assert_eq!(l.chemical_distance(0), Err(ClusterError::NoOrigin));
        let p = ClusterGraph::path(3);
        assert_eq!(p.chemical_distance(2), Ok(2));
        assert_eq!(p.chemical_distance(7), Err(ClusterError::VertexOutOfRange(7)));
    }

    #[test]
    fn small_named_graphs() {
        assert!(ClusterGraph::path(4).is_bipartite());
        assert!(!ClusterGraph::cycle(3).is_bipartite());
        assert_eq!(ClusterGraph::complete(4).edge_count(), 6);
        assert_eq!(ClusterGraph::star(5).max_degree(), 5);
        assert_eq!(ClusterGraph::star(5).dim(), 3);
    }
}
