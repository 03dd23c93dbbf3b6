use std::collections::{BTreeSet, HashSet};

use crate::percolation::{BondConfiguration, ClusterGraph, LatticeSpec};

/// Canonical form of a small rooted graph: the lexicographically least sorted
/// edge list over all relabelings sending the origin to 0.
pub fn rooted_canonical_form(graph: &ClusterGraph) -> (usize, Vec<(usize, usize)>) {
    let n = graph.len();
    let origin = graph.origin().unwrap_or(0);
    let edges = graph.edges();
    let others: Vec<usize> = (0..n).filter(|&v| v != origin).collect();
    let mut best: Option<Vec<(usize, usize)>> = None;
    let mut perm = vec![0usize; n];
    permute(&others, &mut Vec::new(), &mut |order| {
        perm[origin] = 0;
        for (i, &v) in order.iter().enumerate() {
            perm[v] = i + 1;
        }
        let mut relabeled: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| (perm[a].min(perm[b]), perm[a].max(perm[b])))
            .collect();
        relabeled.sort_unstable();
        if best.as_ref().is_none_or(|b| relabeled < *b) {
            best = Some(relabeled);
        }
    });
    (n, best.unwrap_or_default())
}

fn permute(rest: &[usize], prefix: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if prefix.len() == rest.len() {
        visit(prefix);
        return;
    }
    for &v in rest {
        if !prefix.contains(&v) {
            prefix.push(v);
            permute(rest, prefix, visit);
            prefix.pop();
        }
    }
}

/// Every open cluster of `Z^2` containing the origin with between 2 and
/// `max_vertices` vertices, one representative per rooted isomorphism class.
///
/// Clusters are grown edge by edge from the origin inside a box large enough
/// to hold them, and returned as lattice clusters of that box.
pub fn small_lattice_clusters(max_vertices: usize) -> Vec<ClusterGraph> {
    let n = max_vertices.max(1);
    let spec = LatticeSpec::new(2, n).expect("small box");
    let origin = spec.origin_index();
    // an edge is (lower endpoint box index, axis)
    type EdgeSet = Vec<(usize, usize)>;
    let vertices_of = |set: &EdgeSet| -> BTreeSet<usize> {
        let mut out = BTreeSet::from([origin]);
        for &(v, axis) in set {
            out.insert(v);
            out.insert(v + spec.stride(axis));
        }
        out
    };
    let mut seen: HashSet<EdgeSet> = HashSet::new();
    let mut layer: Vec<EdgeSet> = vec![Vec::new()];
    let mut all: Vec<(usize, EdgeSet)> = Vec::new();
    while !layer.is_empty() {
        let mut next = Vec::new();
        for set in &layer {
            let verts = vertices_of(set);
            for &v in &verts {
                for axis in 0..2 {
                    let x = spec.coordinate(v, axis);
                    let mut candidates = Vec::new();
                    if x < n as i32 {
                        candidates.push((v, axis));
                    }
                    if x > -(n as i32) {
                        candidates.push((v - spec.stride(axis), axis));
                    }
                    for e in candidates {
                        if set.contains(&e) {
                            continue;
                        }
                        let mut grown = set.clone();
                        grown.push(e);
                        grown.sort_unstable();
                        if vertices_of(&grown).len() <= max_vertices && seen.insert(grown.clone()) {
                            next.push(grown);
                        }
                    }
                }
            }
        }
        next.sort_unstable();
        all.extend(next.iter().map(|set| (vertices_of(set).len(), set.clone())));
        layer = next;
    }
    all.sort_unstable_by(|a, b| (a.0, a.1.len(), &a.1).cmp(&(b.0, b.1.len(), &b.1)));

    let mut classes = HashSet::new();
    let mut out = Vec::new();
    for (_, set) in all {
        let mut config = BondConfiguration::closed(spec);
        for &(v, axis) in &set {
            config.set_open(v, axis, true);
        }
        let cluster = ClusterGraph::component_of_origin(&config);
        if classes.insert(rooted_canonical_form(&cluster)) {
            out.push(cluster);
        }
    }
    out
}

/// Small named graphs that do not embed in `Z^2`, or embed only with other
/// roots, used alongside the lattice clusters.
pub fn hand_built_bases() -> Vec<(String, ClusterGraph)> {
    let g = |n, e: &[(usize, usize)], o| ClusterGraph::from_edges(n, e, o).expect("connected");
    vec![
        ("K3".into(), ClusterGraph::complete(3)),
        ("K4".into(), ClusterGraph::complete(4)),
        ("K5".into(), ClusterGraph::complete(5)),
        ("K6".into(), ClusterGraph::complete(6)),
        ("C5".into(), ClusterGraph::cycle(5)),
        ("star5-centre".into(), ClusterGraph::star(5)),
        ("star5-leaf".into(), g(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)], 1)),
        ("K4-minus-edge".into(), g(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (2, 3)], 0)),
        ("house".into(), g(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 4)], 0)),
        ("K2,3".into(), g(5, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)], 2)),
        ("triangle-tail".into(), g(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)], 4)),
    ]
}

/// Every rooted lattice cluster class and hand-built graph with at most
/// `max_vertices` vertices, lattice classes named `z2-000`, `z2-001`, ….
pub fn sweep_bases(max_vertices: usize) -> Vec<(String, ClusterGraph)> {
    let mut bases: Vec<(String, ClusterGraph)> = small_lattice_clusters(max_vertices)
        .into_iter()
        .enumerate()
        .map(|(i, c)| (format!("z2-{i:03}"), c))
        .collect();
    bases.extend(hand_built_bases().into_iter().filter(|(_, g)| g.len() <= max_vertices));
    bases
}
