mod common;

use common::{connected_graph, full_plane, sampled};
use perc_range::percolation::ClusterGraph;
use perc_range::walk::{
    confinement_probability, exact_confinement, exact_laplace, exact_visit_laws, killed_operator_report, mc_laplace,
    simulate_walk, WalkError, DEFAULT_BUDGET,
};
use proptest::prelude::*;

#[test]
fn path_of_two_visits_both_sites() {
    let g = ClusterGraph::path(2);
    // After one step the walk has seen both vertices.
    assert!((exact_laplace(&g, 0.5, 1, false, DEFAULT_BUDGET).unwrap() - 0.25).abs() < 1e-15);
    assert_eq!(exact_laplace(&g, 0.5, 3, true, DEFAULT_BUDGET).unwrap(), 0.0);
    assert!((exact_laplace(&g, 0.5, 2, true, DEFAULT_BUDGET).unwrap() - 0.25).abs() < 1e-15);
}

#[test]
fn plane_two_steps() {
    // N_2 = 2 w.p. 1/4 (back to the origin), else 3.
    let v = exact_laplace(&full_plane(3), 0.5, 2, false, DEFAULT_BUDGET).unwrap();
    assert!((v - (0.25 * 0.25 + 0.75 * 0.125)).abs() < 1e-15);
}

#[test]
fn invalid_alpha_rejected() {
    let g = ClusterGraph::path(3);
    assert!(exact_laplace(&g, 1.5, 2, false, DEFAULT_BUDGET).is_err());
    assert!(mc_laplace(&g, 0.0, &[2], 10, 1).is_err());
}

#[test]
fn isolated_origin_cannot_walk() {
    let g = ClusterGraph::component_of_origin(&sampled(2, 2, 0.0, 1));
    assert!(matches!(simulate_walk(&g, 3, 1), Err(_)));
}

#[test]
fn monte_carlo_is_deterministic_across_workers() {
    let g = ClusterGraph::component_of_origin(&sampled(2, 6, 0.7, 5));
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let a = one.install(|| mc_laplace(&g, 0.7, &[4, 8], 20_000, 9).unwrap());
    let b = three.install(|| mc_laplace(&g, 0.7, &[4, 8], 20_000, 9).unwrap());
    assert_eq!(a, b);
}

#[test]
fn monte_carlo_matches_exact() {
    let g = full_plane(8);
    let s = mc_laplace(&g, 0.8, &[6], 200_000, 3).unwrap();
    let e = s.get(6).unwrap();
    let exact = exact_laplace(&g, 0.8, 6, false, DEFAULT_BUDGET).unwrap();
    assert!((e.value - exact).abs() < 5.0 * e.stderr);
    let c = confinement_probability(&g, 2, 6, 200_000, 3).unwrap();
    let exact = exact_confinement(&g, 2, 6).unwrap();
    assert!((c.value - exact).abs() < 5.0 * c.stderr);
}

#[test]
fn killed_ball_is_not_killed_on_finite_cluster() {
    let g = ClusterGraph::path(3);
    assert!(matches!(killed_operator_report(&g, 5, &[]), Err(WalkError::NotKilled)));
}

#[test]
fn spectral_bound_on_the_plane() {
    let rep = killed_operator_report(&full_plane(11), 10, &[]).unwrap();
    assert!(rep.lambda1 > 0.0 && rep.lambda1 <= rep.gap_bound);
    assert!(rep.dirichlet_within_ball_size());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn walks_stay_on_edges(seed in any::<u64>(), n in 0usize..60) {
        let g = ClusterGraph::component_of_origin(&sampled(2, 6, 0.7, seed));
        prop_assume!(g.len() > 1);
        let w = simulate_walk(&g, n, seed).unwrap();
        prop_assert!(w.is_valid_in(&g));
        prop_assert_eq!(w.len(), n);
        prop_assert!(w.visited_count() <= (n + 1).min(g.len()));
        prop_assert_eq!(w, simulate_walk(&g, n, seed).unwrap());
    }

    #[test]
    fn laplace_monotone(g in connected_graph(6), a in 0.05f64..0.9, da in 0.01f64..0.09, n in 1usize..7) {
        let lo = exact_laplace(&g, a, n, false, DEFAULT_BUDGET).unwrap();
        let hi = exact_laplace(&g, a + da, n, false, DEFAULT_BUDGET).unwrap();
        let later = exact_laplace(&g, a, n + 1, false, DEFAULT_BUDGET).unwrap();
        prop_assert!(lo <= hi);
        prop_assert!(later <= lo * (1.0 + 1e-12));
    }

    #[test]
    fn visit_laws_are_distributions(g in connected_graph(6), n in 0usize..8) {
        let laws = exact_visit_laws(&g, n, DEFAULT_BUDGET).unwrap();
        for law in &laws {
            prop_assert!((law.laplace(1.0 - 1e-15, false) - 1.0).abs() < 1e-9);
            prop_assert!(law.laplace(0.5, true) <= law.laplace(0.5, false));
        }
    }

    #[test]
    fn confinement_decreases(n in 0usize..30, r in 1usize..4) {
        let g = full_plane(6);
        let a = exact_confinement(&g, r, n).unwrap();
        let b = exact_confinement(&g, r, n + 1).unwrap();
        let c = exact_confinement(&g, r + 1, n).unwrap();
        prop_assert!(b <= a + 1e-15 && a <= c + 1e-15);
    }
}
