#![allow(dead_code)]

use perc_range::percolation::{BondConfiguration, ClusterGraph, LatticeSpec};
use proptest::prelude::*;

/// Connected graphs on `2..=max` vertices: a random tree plus extra edges.
pub fn connected_graph(max: usize) -> impl Strategy<Value = ClusterGraph> {
    (2..=max)
        .prop_flat_map(|n| {
            let parents: Vec<_> = (1..n).map(|i| 0..i).collect();
            (Just(n), parents, proptest::collection::vec((0..n, 0..n), 0..n))
        })
        .prop_map(|(n, parents, extra)| {
            let mut edges: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
            for (a, b) in extra {
                let e = (a.min(b), a.max(b));
                if a != b && !edges.iter().any(|&(x, y)| (x.min(y), x.max(y)) == e) {
                    edges.push(e);
                }
            }
            ClusterGraph::from_edges(n, &edges, 0).unwrap()
        })
}

pub fn full_plane(radius: usize) -> ClusterGraph {
    ClusterGraph::component_of_origin(&BondConfiguration::full(LatticeSpec::new(2, radius).unwrap()))
}

pub fn sampled(d: usize, radius: usize, p: f64, seed: u64) -> BondConfiguration {
    let spec = LatticeSpec::new(d, radius).unwrap();
    if p == 0.0 {
        BondConfiguration::closed(spec)
    } else {
        BondConfiguration::sample(spec, p, seed).unwrap()
    }
}
