mod common;

use common::connected_graph;
use perc_range::percolation::ClusterGraph;
use perc_range::walk::{exact_laplace, DEFAULT_BUDGET};
use perc_range::wreath::{identity_sweep, sweep_bases, verify_identity, LamplighterKernel, WreathGraph};
use proptest::prelude::*;

#[test]
fn k2_wreath_is_an_eight_cycle() {
    let w = WreathGraph::new(ClusterGraph::path(2)).unwrap();
    assert_eq!(w.vertex_count(), 8);
    assert_eq!(w.edge_count(), 8);
    assert!((0..8).all(|v| w.degree(v) == 2));
    assert!(w.to_cluster().is_connected());
}

#[test]
fn single_vertex_kernel_rejected() {
    assert!(LamplighterKernel::new(ClusterGraph::path(1), 0.5).is_err());
    assert!(LamplighterKernel::new(ClusterGraph::path(2), 1.0).is_err());
}

#[test]
fn sweep_covers_lattice_and_hand_built_bases() {
    let bases = sweep_bases(6);
    assert!(bases.iter().all(|(_, g)| g.len() <= 6 && g.is_connected()));
    assert!(bases.iter().any(|(id, _)| id.starts_with("z2-")));
    let rows = identity_sweep(&bases, &[0.5], 3).unwrap();
    assert_eq!(rows.len(), bases.len() * 3);
    assert!(rows.iter().all(|r| r.gap <= 1e-12));
}

#[test]
fn lamps_follow_the_trajectory() {
    let k = LamplighterKernel::new(ClusterGraph::path(3), 0.3).unwrap();
    let law = k.lamp_law_given_path(&[0, 1, 0]);
    // Sites 0 and 1 were touched; site 2 stays off.
    assert!((law[0] - 0.09).abs() < 1e-15);
    assert!(law.iter().enumerate().filter(|(m, _)| m & 4 != 0).all(|(_, &p)| p == 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kernel_is_reversible(g in connected_graph(5), alpha in 0.05f64..0.95) {
        let k = LamplighterKernel::new(g, alpha).unwrap();
        prop_assert!(k.detailed_balance_violation() < 1e-12);
        for s in 0..k.wreath().vertex_count() {
            let total: f64 = k.step_distribution(s).iter().map(|x| x.1).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn position_marginal_is_the_base_walk(g in connected_graph(5), alpha in 0.05f64..0.95, steps in 0usize..6) {
        let k = LamplighterKernel::new(g.clone(), alpha).unwrap();
        let marginal = k.position_marginal(&k.distribution(steps, None));
        let mut base = vec![0.0; g.len()];
        base[g.origin().unwrap()] = 1.0;
        for _ in 0..steps {
            let mut next = vec![0.0; g.len()];
            for (x, &m) in base.iter().enumerate() {
                for &y in g.neighbors(x) {
                    next[y] += m / g.degree(x) as f64;
                }
            }
            base = next;
        }
        for (a, b) in marginal.iter().zip(&base) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn return_identity(g in connected_graph(5), alpha in 0.05f64..0.95, n in 1usize..5) {
        let check = verify_identity(&g, alpha, n).unwrap();
        prop_assert!(check.gap <= 1e-12);
        let pinned = exact_laplace(&g, alpha, 2 * n, true, DEFAULT_BUDGET).unwrap();
        prop_assert!((pinned - check.rhs).abs() <= 1e-15);
    }
}
