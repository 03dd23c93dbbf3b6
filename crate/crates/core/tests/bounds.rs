mod common;

use common::{connected_graph, full_plane};
use perc_range::bounds::{
    alpha_transfer, fit_values, lemma_4_5_check, lower_bound_assemble, lower_bound_displayed, nash_ode_solve,
    piecewise_constants_fit, surrogate_scan, BoundsError, NashProfile,
};
use perc_range::walk::{exact_laplace, DEFAULT_BUDGET};
use proptest::prelude::*;

#[test]
fn surrogate_minimizer() {
    let (r, _) = surrogate_scan(64, 2, 64);
    assert!(r >= 1 && r <= 64);
}

#[test]
fn displayed_bound_needs_a_radius() {
    assert!(matches!(lower_bound_displayed(0, 0.5, 2, 1.0), Err(BoundsError::ZeroRadius)));
}

#[test]
fn nash_tail_approaches_d_over_d_plus_2() {
    for d in [2usize, 3] {
        let sol = nash_ode_solve(&NashProfile::new(d, 1000), 1e5, 10.0, 1e-8).unwrap();
        let target = d as f64 / (d as f64 + 2.0);
        assert!((sol.tail_slope().unwrap() - target).abs() / target < 0.05);
        assert!(sol.is_strictly_decreasing());
        assert!(piecewise_constants_fit(&sol, 1e-3).is_clean());
    }
}

#[test]
fn tiny_threshold_rejected() {
    let mut p = NashProfile::new(2, 1000);
    p.c = 0.01;
    assert!(nash_ode_solve(&p, 10.0, 1.0, 1e-8).is_err());
}

#[test]
fn exponent_fit_recovers_power_law() {
    let pts: Vec<(usize, f64, f64)> = (20..=120).step_by(10).map(|n| (n, (-0.3 * (n as f64).sqrt()).exp(), 1e-6)).collect();
    let fit = fit_values(&pts).unwrap();
    assert!((fit.slope - 0.5).abs() < 1e-12);
}

#[test]
fn visit_fact_on_the_plane() {
    let plane = full_plane(9);
    for n in 1..=4 {
        assert!(lemma_4_5_check(&plane, n, DEFAULT_BUDGET).unwrap().fact_holds());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inverse_is_galois(d in 1usize..4, n in 1usize..100_000, k in 0.0f64..50.0, log_y in 0.0f64..500.0) {
        let p = NashProfile::new(d, n);
        prop_assume!(p.validate().is_ok());
        // F⁻¹(F(k)) ≤ k and F(F⁻¹(y)) ≥ y.
        prop_assert!(p.f_inverse_log(p.log_f(k)) <= k * (1.0 + 1e-12) + 1e-12);
        prop_assert!(p.log_f(p.f_inverse_log(log_y)) >= log_y * (1.0 - 1e-12));
    }

    #[test]
    fn transfer_monotone(c0 in 0.01f64..10.0, a0 in 0.05f64..0.95, a in 0.05f64..0.95, b in 0.05f64..0.95) {
        let (lo, hi) = (a.min(b), a.max(b));
        let x = alpha_transfer(c0, a0, lo).unwrap();
        let y = alpha_transfer(c0, a0, hi).unwrap();
        prop_assert!(y <= x + 1e-12 && y > 0.0);
    }

    #[test]
    fn rigorous_bound_below_pinned(g in connected_graph(6), alpha in 0.05f64..0.95, n in 1usize..5, r in 1usize..5) {
        let rep = lower_bound_assemble(&g, r, n, alpha).unwrap();
        let pinned = exact_laplace(&g, alpha, 2 * n, true, DEFAULT_BUDGET).unwrap();
        prop_assert!(rep.rigorous <= pinned * (1.0 + 1e-12));
    }
}
