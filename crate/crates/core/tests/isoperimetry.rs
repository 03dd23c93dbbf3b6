mod common;

use common::{connected_graph, full_plane, sampled};
use perc_range::isoperimetry::{
    connected_subsets, flip_closure_bound_check, folner_function, folner_lower_bound_check, isoperimetric_beta,
    isoperimetric_beta_exhaustive, lemma_neud_check, prune_to_satisfiable, unsatisfied_edge_fraction, FolnerValue,
    IsoError, IsoGraph, SubsetSelection, Verdict,
};
use perc_range::percolation::ClusterGraph;
use perc_range::wreath::WreathGraph;
use proptest::prelude::*;

#[test]
fn relative_boundary_of_a_plane_point() {
    let host = ClusterGraph::component_of_origin(&sampled(2, 1, 0.0, 1));
    let g = IsoGraph::relative(&host, &full_plane(3)).unwrap();
    assert_eq!(g.total_degree(0), 4);
    assert_eq!(folner_function(&g, 1.0, 4, true).unwrap().value, FolnerValue::Unbounded);
    assert_eq!(folner_function(&g, 0.25, 4, true).unwrap().value, FolnerValue::Exact(1));
}

#[test]
fn cap_gives_lower_bound() {
    let g = IsoGraph::internal(&ClusterGraph::cycle(8));
    assert_eq!(folner_function(&g, 2.0, 8, true).unwrap().value, FolnerValue::Exact(4));
    assert_eq!(folner_function(&g, 2.0, 3, true).unwrap().value, FolnerValue::AtLeast(4));
}

#[test]
fn small_bases_satisfy_the_wreath_bound() {
    for g in [ClusterGraph::path(2), ClusterGraph::path(3), ClusterGraph::complete(3)] {
        let w = WreathGraph::new(g.clone()).unwrap();
        let checks = folner_lower_bound_check(&IsoGraph::internal(&g), &w, &[1.0, 2.0, 3.0], 24).unwrap();
        assert!(checks.iter().all(|c| c.verdict == Verdict::Holds));
    }
}

#[test]
fn neud_check_needs_small_boundary() {
    let g = ClusterGraph::path(2);
    let w = WreathGraph::new(g.clone()).unwrap();
    let base = IsoGraph::internal(&g);
    assert!(matches!(lemma_neud_check(&w, &base, &[0], 1.0), Err(IsoError::Precondition { .. })));
    let all: Vec<usize> = (0..w.vertex_count()).collect();
    assert!(lemma_neud_check(&w, &base, &all, 1.0).unwrap().holds());
}

#[test]
fn star_erodes_completely() {
    let mut adj = vec![vec![1, 2, 3, 4]];
    adj.extend((0..4).map(|_| vec![0]));
    let r = prune_to_satisfiable(&adj, 6.0);
    assert!(r.remaining.is_empty() && !r.hypothesis_holds);
}

#[test]
fn flip_closure_rejects_false_premise() {
    assert!(matches!(flip_closure_bound_check(&[0b00, 0b01], 2, 2), Err(IsoError::PremiseViolated { .. })));
    let cube: Vec<u32> = (0..8).collect();
    let r = flip_closure_bound_check(&cube, 3, 3).unwrap();
    assert!(r.holds && r.size == 8);
}

fn random_adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        let (a, b) = (a % n, b % n);
        if a != b && !adj[a].contains(&b) {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    adj
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn folner_monotone_in_k(g in connected_graph(8), k in 0.1f64..3.0, dk in 0.0f64..2.0) {
        let iso = IsoGraph::internal(&g);
        let a = folner_function(&iso, k, 8, true).unwrap().value;
        let b = folner_function(&iso, k + dk, 8, true).unwrap().value;
        match (a, b) {
            (FolnerValue::Exact(x), FolnerValue::Exact(y)) => prop_assert!(x <= y),
            (FolnerValue::Unbounded, other) => prop_assert_eq!(other, FolnerValue::Unbounded),
            _ => {}
        }
    }

    #[test]
    fn connected_equals_unrestricted(g in connected_graph(8), k in 0.1f64..4.0) {
        let iso = IsoGraph::internal(&g);
        let c = folner_function(&iso, k, 8, true).unwrap().value;
        let u = folner_function(&iso, k, 8, false).unwrap().value;
        prop_assert_eq!(c, u);
    }

    #[test]
    fn boundary_is_symmetric(g in connected_graph(8), pick in proptest::collection::vec(any::<bool>(), 8)) {
        let iso = IsoGraph::internal(&g);
        let flags: Vec<bool> = pick.into_iter().take(g.len()).collect();
        let s = SubsetSelection::from_flags(&iso, flags);
        prop_assert_eq!(s.boundary_size(), s.complement().boundary_size());
    }

    #[test]
    fn beta_relabel_invariant(g in connected_graph(8), shift in 0usize..8) {
        let n = g.len();
        let perm: Vec<usize> = (0..n).map(|v| (v + shift) % n).collect();
        let h = g.relabel(&perm);
        let a = isoperimetric_beta(&IsoGraph::with_walk_degrees(&g), 1.0, 0.25, 16, 2, n).unwrap();
        let b = isoperimetric_beta(&IsoGraph::with_walk_degrees(&h), 1.0, 0.25, 16, 2, n).unwrap();
        prop_assert_eq!(a.beta, b.beta);
        let e = isoperimetric_beta_exhaustive(&IsoGraph::with_walk_degrees(&g), 1.0, 0.25, 16, 2).unwrap();
        prop_assert_eq!(a.beta, e.beta);
    }

    #[test]
    fn enumeration_counts_connected_sets(g in connected_graph(9)) {
        let iso = IsoGraph::internal(&g);
        let sets = connected_subsets(&iso, g.len()).unwrap();
        let brute = (1u32..(1 << g.len()))
            .filter(|m| iso.is_connected_subset(&(0..g.len()).map(|v| m >> v & 1 == 1).collect::<Vec<_>>()))
            .count();
        prop_assert_eq!(sets.len(), brute);
    }

    #[test]
    fn pruning_keeps_degree(n in 4usize..20, edges in proptest::collection::vec((0usize..20, 0usize..20), 0..80), b in 0.5f64..6.0) {
        let adj = random_adjacency(n, &edges);
        let r = prune_to_satisfiable(&adj, b);
        prop_assert_eq!(r.hypothesis_holds, unsatisfied_edge_fraction(&adj, b).is_some_and(|f| f < 0.5));
        if r.hypothesis_holds {
            prop_assert!(!r.remaining.is_empty());
        }
        if let Some(m) = r.min_degree {
            prop_assert!(3.0 * m as f64 >= b);
        }
    }

    #[test]
    fn flip_closed_families_are_large(sites in 1usize..8, free in any::<u32>(), base in any::<u32>()) {
        let full = (1u32 << sites) - 1;
        let (free, base) = (free & full, base & full & !free);
        let mut family = Vec::new();
        let mut sub = free;
        loop {
            family.push(base | sub);
            if sub == 0 { break; }
            sub = (sub - 1) & free;
        }
        let r = flip_closure_bound_check(&family, sites, free.count_ones()).unwrap();
        prop_assert!(r.holds);
    }
}
