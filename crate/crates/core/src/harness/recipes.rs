use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;

use super::spec::ExperimentSpec;
use super::{op, Context, HarnessError};
use crate::bounds::{
    fit_exponent, lemma_4_5_check, lower_bound_assemble, nash_ode_solve, piecewise_constants_fit, write_curve_csv,
    BoundCurve, BoundSide, NashProfile,
};
use crate::isoperimetry::{
    flip_closure_bound_check, folner_function, folner_lower_bound_check, isoperimetric_beta,
    isoperimetric_beta_exhaustive, lemma_neud_check, prune_to_satisfiable, quasi_isometry_constants,
    unsatisfied_edge_fraction, write_profile_csv, FolnerValue, IsoError, IsoGraph, Verdict,
};
use crate::percolation::{classify_boxes, BlockClass, BondConfiguration, ClusterGraph, LatticeSpec};
use crate::rng::{chain_seed, stream_rng};
use crate::walk::{
    confinement_probability, exact_confinement, exact_laplace, exact_visit_laws, killed_operator_report,
    mc_laplace, mc_laplace_multi, WalkError, DEFAULT_BUDGET,
};
use crate::wreath::{identity_sweep as sweep, small_lattice_clusters, sweep_bases, write_sweep_csv, WreathGraph};

pub const DEFAULT_SEED: u64 = 20_240_601;

pub(crate) fn dispatch(recipe: &str, spec: &ExperimentSpec, ctx: &mut Context) -> Result<(), HarnessError> {
    match recipe {
        "identity-sweep" => identity_sweep(spec, ctx),
        "confinement" => confinement(spec, ctx),
        "spectral-bracket" => spectral_bracket(spec, ctx),
        "exponent-fit" => exponent_fit(spec, ctx),
        "isoperimetry-small" => isoperimetry_small(spec, ctx),
        "folner-wreath" => folner_wreath(spec, ctx),
        "pruning-property" => pruning_property(spec, ctx),
        "nash-curve" => nash_curve(spec, ctx),
        "lemma45" => lemma45(spec, ctx),
        "renorm-field" => renorm_field(spec, ctx),
        other => Err(HarnessError::UnknownRecipe(other.into())),
    }
}

fn csv_rows<S: Serialize>(rows: &[S]) -> Result<Vec<u8>, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        op(w.serialize(row), "writing csv")?;
    }
    op(w.into_inner(), "writing csv")
}

fn csv_with<F>(write: F) -> Result<Vec<u8>, HarnessError>
where
    F: FnOnce(&mut Vec<u8>) -> csv::Result<()>,
{
    let mut buf = Vec::new();
    op(write(&mut buf), "writing csv")?;
    Ok(buf)
}

fn json<S: Serialize>(value: &S) -> Vec<u8> {
    serde_json::to_vec_pretty(value).expect("artifact serializes")
}

fn lattice(d: usize, n: usize) -> Result<LatticeSpec, HarnessError> {
    op(LatticeSpec::new(d, n), format!("lattice d={d} n={n}"))
}

fn configuration(spec: LatticeSpec, p: f64, seed: u64) -> Result<BondConfiguration, HarnessError> {
    if p == 0.0 {
        Ok(BondConfiguration::closed(spec))
    } else if p == 1.0 {
        Ok(BondConfiguration::full(spec))
    } else {
        op(BondConfiguration::sample(spec, p, seed), "sampling configuration")
    }
}

fn identity_sweep(spec: &ExperimentSpec, ctx: &mut Context) -> Result<(), HarnessError> {
    let max_vertices = spec.max_vertices.unwrap_or(6);
    let alphas = spec.alpha_list.clone().unwrap_or(vec![0.3, 0.5, 0.7]);
    let n_max = spec.n_max.unwrap_or(5);
    let tol = spec.tolerance.unwrap_or(1e-12);
    let bases = sweep_bases(max_vertices);
    let rows = op(sweep(&bases, &alphas, n_max), "identity sweep")?;
    let worst = rows.iter().map(|r| r.gap).fold(0.0, f64::max);
    ctx.artifact("identity_sweep.csv", csv_with(|b| write_sweep_csv(&rows, b))?);
    ctx.note("bases", bases.len());
    ctx.note("rows", rows.len());
    ctx.note("worst_gap", worst);
    ctx.check(
        "return identity",
        !rows.is_empty() && worst <= tol,
        format!("worst gap {worst:.3e} over {} rows on {} bases (tolerance {tol:e})", rows.len(), bases.len()),
    );
    Ok(())
}

/// First clusters (by chain index) with at least two vertices.
fn sampled_clusters(
    d: usize,
    radius: usize,
    p: f64,
    master: u64,
    count: usize,
    accept: impl Fn(&ClusterGraph) -> bool,
) -> Result<Vec<(u64, u64, ClusterGraph)>, HarnessError> {
    let spec = lattice(d, radius)?;
    let mut out = Vec::new();
    for i in 0..(count as u64 * 200).max(200) {
        if out.len() == count {
            break;
        }
        let seed = chain_seed(master, i);
        let cluster = ClusterGraph::component_of_origin(&configuration(spec, p, seed)?);
        if cluster.len() >= 2 && accept(&cluster) {
            out.push((i, seed, cluster));
        }
    }
    if out.len() < count {
        return Err(HarnessError::Operation {
            context: "sampling clusters".into(),
            message: format!("only {} of {count} acceptable clusters found", out.len()),
        });
    }
    Ok(out)
}

#[derive(Serialize)]
struct OracleRow {
    chain: u64,
    vertices: usize,
    quantity: &'static str,
    n: usize,
    parameter: f64,
    exact: f64,
    estimate: f64,
    stderr: f64,
    z: f64,
    agrees: bool,
}

fn agrees(exact: f64, estimate: f64, stderr: f64, sigma: f64) -> (f64, bool) {
    if stderr == 0.0 {
        (0.0, (exact - estimate).abs() <= 1e-12)
    } else {
        let z = (estimate - exact) / stderr;
        (z, z.abs() <= sigma)
    }
}

fn confinement(spec: &ExperimentSpec, ctx: &mut Context) -> Result<(), HarnessError> {
    let d = spec.d.unwrap_or(2);
    let p = spec.p.unwrap_or(0.7);
    let radius = spec.box_radius.unwrap_or(8);
    let count = spec.seeds.unwrap_or(5);
    let alphas = spec.alpha_list.clone().unwrap_or(vec![0.5, 0.9]);
    let n_list = spec.n_list.clone().unwrap_or(vec![6, 10, 12]);
    let r_list = spec.r_list.clone().unwrap_or(vec![2, 3]);
    let samples = spec.samples.unwrap_or(1_000_000);
    let sigma = spec.sigma.unwrap_or(4.0);
    let master = spec.seed.unwrap_or(DEFAULT_SEED);
    let clusters = sampled_clusters(d, radius, p, master, count, |_| true)?;
    ctx.manifest = clusters.iter().map(|c| c.1).collect();
    let mut rows = Vec::new();
    for (chain, seed, cluster) in &clusters {
        let series = op(mc_laplace_multi(cluster, &alphas, &n_list, samples, *seed), "monte carlo laplace")?;
        for s in &series {
            for e in &s.entries {
                let exact = op(exact_laplace(cluster, s.alpha, e.n, false, DEFAULT_BUDGET), "exact laplace")?;
                let (z, ok) = agrees(exact, e.value, e.stderr, sigma);
                rows.push(OracleRow {
                    chain: *chain,
                    vertices: cluster.len(),
                    quantity: "laplace",
                    n: e.n,
                    parameter: s.alpha,
                    exact,
                    estimate: e.value,
                    stderr: e.stderr,
                    z,
                    agrees: ok,
                });
            }
        }
        for &r in &r_list {
            for &n in &n_list {
                let exact = op(exact_confinement(cluster, r, n), "exact confinement")?;
                let est = op(
                    confinement_probability(cluster, r, n, samples, chain_seed(*seed, r as u64)),
                    "monte carlo confinement",
                )?;
                let (z, ok) = agrees(exact, est.value, est.stderr, sigma);
                rows.push(OracleRow {
                    chain: *chain,
                    vertices: cluster.len(),
                    quantity: "confinement",
                    n,
                    parameter: r as f64,
                    exact,
                    estimate: est.value,
                    stderr: est.stderr,
                    z,
                    agrees: ok,
                });
            }
        }
    }
    ctx.artifact("oracle_comparison.csv", csv_rows(&rows)?);
    for quantity in ["laplace", "confinement"] {
        let picked: Vec<&OracleRow> = rows.iter().filter(|r| r.quantity == quantity).collect();
        let worst = picked.iter().map(|r| r.z.abs()).fold(0.0, f64::max);
        let bad = picked.iter().filter(|r| !r.agrees).count();
        ctx.note(&format!("{quantity}_worst_z"), worst);
        ctx.check(
            &format!("monte carlo {quantity} within {sigma} standard errors of exact"),
            bad == 0,
            format!("{} comparisons on {} clusters, worst |z| = {worst:.2}, {bad} outside", picked.len(), clusters.len()),
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct SpectralRow {
    p: f64,
    chain: u64,
    r: usize,
    ball_size: usize,
    half_ball_size: usize,
    lambda1: f64,
    bound: f64,
    holds: bool,
}

#[derive(Serialize)]
struct SurvivalRow {
    r: usize,
    n: usize,
    survival: f64,
    lambda1: f64,
    rate: f64,
    relative_error: f64,
}

fn spectral_bracket(spec: &ExperimentSpec, ctx: &mut Context) -> Result<(), HarnessError> {
    let d = spec.d.unwrap_or(2);
    let p_list = spec.p_list.clone().unwrap_or(vec![0.7, 1.0]);
    let r_list = spec.r_list.clone().unwrap_or(vec![5, 10, 20]);
    let count = spec.seeds.unwrap_or(5);
    let survival_r = spec.survival_r_list.clone().unwrap_or(vec![3, 5]);
    let factor = spec.survival_factor.unwrap_or(50);
    let tol = spec.tolerance.unwrap_or(0.1);
    let master = spec.seed.unwrap_or(DEFAULT_SEED);
    let mut rows = Vec::new();
    let mut skipped = 0;
    for &p in &p_list {
        for &r in &r_list {
            let box_spec = lattice(d, r + 1)?;
            let mut found = 0;
            for i in 0..(count as u64 * 200) {
                if found == count {
                    break;
                }
                let seed = chain_seed(master, i);
                let cluster = ClusterGraph::component_of_origin(&configuration(box_spec, p, seed)?);
                if cluster.len() < 2 {
                    skipped += 1;
                    continue;
                }
                let rep = match killed_operator_report(&cluster, r, &[]) {
                    Err(WalkError::NotKilled) => {
                        skipped += 1;
                        continue;
                    }
                    other => op(other, "killed operator")?,
                };
                found += 1;
                if !ctx.manifest.contains(&seed) {
                    ctx.manifest.push(seed);
                }
                rows.push(SpectralRow {
                    p,
                    chain: i,
                    r,
                    ball_size: rep.ball_size,
                    half_ball_size: rep.half_ball_size,
                    lambda1: rep.lambda1,
                    bound: rep.gap_bound,
                    holds: rep.lambda1 <= rep.gap_bound,
                });
            }
        }
    }
    let violations = rows.iter().filter(|r| !r.holds).count();
    let expected = p_list.len() * r_list.len() * count;
    ctx.note("skipped_chains", skipped);
    ctx.check(
        "spectral gap below 8d|B_r|/(r^2|B_r/2|)",
        violations == 0 && rows.len() == expected,
        format!("{} balls ({expected} requested), {violations} violations", rows.len()),
    );
    ctx.artifact("spectral.csv", csv_rows(&rows)?);

    let mut survival = Vec::new();
    for &r in &survival_r {
        let full = ClusterGraph::component_of_origin(&BondConfiguration::full(lattice(d, r + 1)?));
        let n = factor * r * r;
        let rep = op(killed_operator_report(&full, r, &[n]), "killed operator")?;
        let prob = rep.survival[0].p;
        let target = (1.0 - rep.lambda1).ln();
        let rate = prob.ln() / n as f64;
        survival.push(SurvivalRow {
            r,
            n,
            survival: prob,
            lambda1: rep.lambda1,
            rate,
            relative_error: ((rate - target) / target).abs(),
        });
    }
    let worst = survival.iter().map(|s| s.relative_error).fold(0.0, f64::max);
    ctx.check(
        "survival decays at rate log(1 - lambda1)",
        survival.iter().all(|s| s.survival > 0.0) && worst <= tol,
        format!("worst relative error {worst:.4} over r = {survival_r:?} (tolerance {tol})"),
    );
    ctx.artifact("survival.csv", csv_rows(&survival)?);

    let full = ClusterGraph::component_of_origin(&BondConfiguration::full(lattice(d, 2)?));
    let unit = op(killed_operator_report(&full, 1, &[]), "killed operator")?;
    let expected_unit = if d == 2 { Some(0.5) } else { None };
    ctx.note("lambda1_unit_ball", unit.lambda1);
    if let Some(v) = expected_unit {
        ctx.check(
            "unit ball gap is 1/2",
            (unit.lambda1 - v).abs() <= 1e-10,
            format!("lambda1(B_1) = {:.15}", unit.lambda1),
        );
    }
    Ok(())
}

fn reaches_box(cluster: &ClusterGraph, radius: usize) -> bool {
    (0..cluster.len()).any(|v| {
        cluster
            .point(v)
            .is_some_and(|x| x.iter().any(|c| c.unsigned_abs() as usize == radius))
    })
}

fn exponent_fit(spec: &ExperimentSpec, ctx: &mut Context) -> Result<(), HarnessError> {
    let d = spec.d.unwrap_or(2);
    let alpha = spec.alpha.unwrap_or(0.9);
    let p_list = spec.p_list.clone().unwrap_or(vec![1.0, 0.7]);
    let n_list = spec.n_list.clone().unwrap_or((20..=120).step_by(10).collect());
    let samples = spec.samples.unwrap_or(1_000_000);
    let radius = spec.box_radius.unwrap_or(125);
    let (lo, hi) = (spec.slope_low.unwrap_or(0.35), spec.slope_high.unwrap_or(0.65));
    let master = spec.seed.unwrap_or(DEFAULT_SEED);
    let mut curves = Vec::new();
    let mut fits = serde_json::Map::new();
    for &p in &p_list {
        let (_, seed, cluster) = sampled_clusters(d, radius, p, master, 1, |c| reaches_box(c, radius))?.remove(0);
        ctx.manifest.push(seed);
        let series = op(mc_laplace(&cluster, alpha, &n_list, samples, seed), "monte carlo laplace")?.with_p(p);
        ctx.artifact(&format!("laplace_p{p}.csv"), csv_with(|b| series.write_csv(b))?);
        for side in [BoundSide::Upper, BoundSide::Lower] {
            if let Ok(curve) = BoundCurve::envelope(&series, side) {
                curves.push(curve);
            }
        }
        let name = format!("slope in [{lo}, {hi}] at p = {p}");
        match fit_exponent(&series) {
            Ok(fit) => {
                let all_used = fit.points_used == n_list.len();
                ctx.check(
                    &name,
                    all_used && fit.slope >= lo && fit.slope <= hi,
                    format!(
                        "slope {:.4}, intercept {:.4}, residual {:.2e}, {} of {} points above the noise floor (target {:.3})",
                        fit.slope,
                        fit.intercept,
                        fit.residual,
                        fit.points_used,
                        n_list.len(),
                        d as f64 / (d as f64 + 2.0)
                    ),
                );
                fits.insert(format!("p={p}"), serde_json::to_value(&fit).expect("fit serializes"));
            }
            Err(e) => ctx.check(&name, false, e.to_string()),
        }
    }
    ctx.artifact("bound_curves.csv", csv_with(|b| write_curve_csv(&curves, b))?);
    ctx.artifact("fit.json", json(&fits));
    ctx.note("fits", fits);
    Ok(())
}

#[derive(Serialize)]
struct IsoOracleRow {
    chain: u64,
    box_radius: usize,
    vertices: usize,
    beta_search: Option<f64>,
    beta_exhaustive: Option<f64>,
    same_argmin: bool,
}

fn isoperimetry_small(spec: &ExperimentSpec, ctx: &mut Context) -> Result<(), HarnessError> {
    let d = spec.d.unwrap_or(2);
    let p = spec.p.unwrap_or(0.7);
    let n = spec.n.unwrap_or(4);
    let count = spec.seeds.unwrap_or(20);
    let cap = spec.cap.unwrap_or(16);
    let c = spec.c.unwrap_or(1.0);
    let gamma = spec.gamma.unwrap_or(1.0 / (2.0 * (d as f64 + 2.0)));
    let oracle_box = spec.oracle_box.unwrap_or(2.min(n));
    let limit = spec.oracle_limit.unwrap_or(25);
    let master = spec.seed.unwrap_or(DEFAULT_SEED);
    ctx.manifest = crate::rng::seed_manifest(master, count);
    let relative = |radius: usize, seed: u64| -> Result<(ClusterGraph, IsoGraph), HarnessError> {
        let host = ClusterGraph::component_of_origin(&configuration(lattice(d, radius)?, p, seed)?);
        let sup = ClusterGraph::component_of_origin(&configuration(lattice(d, radius + 1)?, p, seed)?);
        let g = op(IsoGraph::relative(&host, &sup), "relative boundary")?;
        Ok((host, g))
    };
    let mut reports = Vec::new();
    let mut oracle = Vec::new();
    let mut positive = true;
    let mut multi = 0;
    for (i, &seed) in ctx.manifest.clone().iter().enumerate() {
        let (host, g) = relative(n, seed)?;
        let rep = op(isoperimetric_beta(&g, c, gamma, n, d, cap), "isoperimetric search")?;
        if host.len() >= 2 {
            multi += 1;
            positive &= rep.beta.is_some_and(|b| b > 0.0);
        }
        reports.push(rep);
        for radius in BTreeSet::from([oracle_box, n]) {
            let (small, sg) = relative(radius, seed)?;
            if small.len() > limit {
                continue;
            }
            let fast = op(isoperimetric_beta(&sg, c, gamma, n, d, small.len()), "isoperimetric search")?;
            let slow = op(isoperimetric_beta_exhaustive(&sg, c, gamma, n, d), "exhaustive oracle")?;
            oracle.push(IsoOracleRow {
                chain: i as u64,
                box_radius: radius,
                vertices: small.len(),
                beta_search: fast.beta,
                beta_exhaustive: slow.beta,
                same_argmin: fast.argmin_vertices == slow.argmin_vertices,
            });
        }
    }
    ctx.artifact("isoperimetry.json", json(&reports));
    ctx.artifact("isoperimetry_oracle.csv", csv_rows(&oracle)?);
    let exact = reports.iter().filter(|r| r.exact).count();
    ctx.note("clusters", reports.len());
    ctx.note("exact_under_cap", exact);
    ctx.note("cap", cap);
    let min_beta = reports.iter().filter_map(|r| r.beta).fold(f64::INFINITY, f64::min);
    ctx.check(
        "beta positive",
        positive && multi > 0,
        format!("{multi} clusters with >= 2 vertices at n = {n}, smallest beta {min_beta:.4} (cap {cap}, {exact} searches exhaustive)"),
    );
    let full_at_n = oracle.iter().filter(|r| r.box_radius == n).count();
    let mismatches = oracle
        .iter()
        .filter(|r| r.beta_search != r.beta_exhaustive || !r.same_argmin)
        .count();
    ctx.check(
        "search matches exhaustive oracle",
        !oracle.is_empty() && mismatches == 0,
        format!(
            "{} instances with <= {limit} vertices ({full_at_n} at n = {n}, the rest at n = {oracle_box}), {mismatches} mismatches",
            oracle.len()
        ),
    );
    Ok(())
}

#[derive(Serialize)]
struct WreathRow {
    base: String,
    sites: usize,
    k: f64,
    wreath_value: String,
    base_value: String,
    rhs: Option<f64>,
    verdict: Verdict,
}

fn show(v: FolnerValue) -> String {
    match v {
        FolnerValue::Exact(x) => x.to_string(),
        FolnerValue::AtLeast(x) => format!(">={x}"),
        FolnerValue::Unbounded => "inf".into(),
    }
}

fn folner_wreath(spec: &ExperimentSpec, ctx: &mut Context) -> Result<(), HarnessError> {
    let k_list = spec.k_list.clone().unwrap_or(vec![1.0, 2.0, 3.0]);
    let cap = spec.cap.unwrap_or(24);
    let plane = ClusterGraph::component_of_origin(&BondConfiguration::full(lattice(2, 4)?));
    let mut bases: Vec<(String, IsoGraph, ClusterGraph)> = Vec::new();
    for (name, g) in [
        ("K2", ClusterGraph::path(2)),
        ("P3", ClusterGraph::path(3)),
        ("K3", ClusterGraph::complete(3)),
    ] {
        bases.push((name.into(), IsoGraph::internal(&g), g));
    }
    let point = ClusterGraph::component_of_origin(&BondConfiguration::closed(lattice(2, 1)?));
    let mut lattice_bases = vec![point];
    lattice_bases.extend(small_lattice_clusters(3));
    for (i, g) in lattice_bases.into_iter().enumerate() {
        let iso = op(IsoGraph::relative(&g, &plane), "relative boundary")?;
        bases.push((format!("z2-rel-{i}-{}v", g.len()), iso, g));
    }
    let mut rows = Vec::new();
    for (name, iso, g) in &bases {
        let w = op(WreathGraph::new(g.clone()), "wreath product")?;
        for check in op(folner_lower_bound_check(iso, &w, &k_list, cap), "wreath Folner")? {
            rows.push(WreathRow {
                base: name.clone(),
                sites: g.len(),
                k: check.k,
                wreath_value: show(check.wreath_value),
                base_value: show(check.base_value),
                rhs: check.rhs,
                verdict: check.verdict,
            });
        }
    }
    ctx.artifact("folner_wreath.csv", csv_rows(&rows)?);
    let held = rows.iter().filter(|r| r.verdict == Verdict::Holds).count();
    let exact = rows.iter().filter(|r| !r.wreath_value.starts_with(">=")).count();
    ctx.check(
        "wreath Folner lower bound",
        held == rows.len() && exact == rows.len(),
        format!("{held} of {} (base, k) pairs hold, {exact} with exact wreath values, on {} bases", rows.len(), bases.len()),
    );

    // Connected restriction agrees with the unrestricted minimum.
    let mut profile = Vec::new();
    let mut sound = true;
    for (name, iso, g) in bases.iter().take(3) {
        let w = op(WreathGraph::new(g.clone()), "wreath product")?;
        let lifted = op(IsoGraph::wreath(&w, iso), "wreath boundary")?;
        for &k in &k_list {
            let conn = op(folner_function(&lifted, k, cap, true), "Folner")?;
            let any = op(folner_function(&lifted, k, cap, false), "Folner")?;
            sound &= conn.value == any.value;
            ctx.note(&format!("folner_{name}_wreath_k{k}"), show(conn.value));
            profile.push(conn);
            profile.push(any);
        }
    }
    ctx.artifact("folner_profile.csv", csv_with(|b| write_profile_csv(&profile, b))?);
    ctx.check("connected restriction is sound", sound, "connected and unrestricted Folner values agree on K2, P3, K3 wreaths");

    // Every subset of the K2 wreath against the bad-point and
    // unsatisfiable-point fractions.
    let k2 = ClusterGraph::path(2);
    let w = op(WreathGraph::new(k2.clone()), "wreath product")?;
    let base = IsoGraph::internal(&k2);
    let mut qualifying = 0;
    let mut failing = 0;
    for mask in 1u32..(1 << w.vertex_count()) {
        let subset: Vec<usize> = (0..w.vertex_count()).filter(|&v| mask >> v & 1 == 1).collect();
        for &k in &k_list {
            match lemma_neud_check(&w, &base, &subset, k) {
                Ok(rep) => {
                    qualifying += 1;
                    failing += usize::from(!rep.holds());
                }
                Err(IsoError::Precondition { .. }) => {}
                Err(e) => return Err(HarnessError::Operation { context: "bad-point check".into(), message: e.to_string() }),
            }
        }
    }
    ctx.check(
        "bad and unsatisfiable fractions on the K2 wreath",
        qualifying > 0 && failing == 0,
        format!("{} subsets x {} values of k, {qualifying} meet the boundary precondition, {failing} fail", (1u32 << w.vertex_count()) - 1, k_list.len()),
    );

    let p3 = ClusterGraph::path(3);
    let w = op(WreathGraph::new(p3.clone()), "wreath product")?;
    let iso = IsoGraph::internal(&p3);
    let single = op(IsoGraph::wreath(&w, &iso), "wreath boundary")?;
    let double = op(IsoGraph::wreath_jumps(&w, &iso), "jump boundary")?;
    let (c1, c2, sets) = op(quasi_isometry_constants(&single, &double, 8), "boundary comparison")?;
    ctx.note("jump_boundary_ratio", serde_json::json!({ "c1": c1, "c2": c2, "sets": sets }));
    Ok(())
}

fn random_graph(rng: &mut impl Rng) -> Vec<Vec<usize>> {
    let n = rng.random_range(4..=24);
    let q: f64 = rng.random_range(0.1..0.9);
    let mut adj = vec![Vec::new(); n];
    for a in 0..n {
        for b in a + 1..n {
            if rng.random::<f64>() < q {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }
    adj
}

fn random_family(rng: &mut impl Rng) -> (Vec<u32>, usize) {
    let sites = rng.random_range(2..=10);
    let full = (1u32 << sites) - 1;
    let mut family = BTreeSet::new();
    for _ in 0..rng.random_range(1..=3) {
        let free = rng.random::<u32>() & full;
        let base = rng.random::<u32>() & full & !free;
        // enumerate the subcube base + (subsets of free)
        let mut sub = free;
        loop {
            family.insert(base | sub);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & free;
        }
    }
    (family.into_iter().collect(), sites)
}

fn pruning_property(spec: &ExperimentSpec, ctx: &mut Context) -> Result<(), HarnessError> {
    let wanted = spec.graphs.unwrap_or(1000);
    let families = spec.families.unwrap_or(500);
    let master = spec.seed.unwrap_or(DEFAULT_SEED);
    ctx.manifest = vec![master];
    let mut rng = stream_rng(master, 0);
    let (mut accepted, mut attempts, mut failures, mut eroded) = (0, 0, 0, 0);
    while accepted < wanted && attempts < wanted * 1000 {
        attempts += 1;
        let adj = random_graph(&mut rng);
        let max_degree = adj.iter().map(Vec::len).max().unwrap_or(0);
        if max_degree == 0 {
            continue;
        }
        let b: f64 = rng.random_range(0.5..=(max_degree as f64 + 0.5));
        if !unsatisfied_edge_fraction(&adj, b).is_some_and(|f| f < 0.5) {
            continue;
        }
        accepted += 1;
        let result = prune_to_satisfiable(&adj, b);
        eroded += usize::from(result.rounds > 0);
        let ok = result.hypothesis_holds && result.min_degree.is_some_and(|m| 3.0 * m as f64 >= b);
        failures += usize::from(!ok);
    }
    ctx.note("graphs_drawn", attempts);
    ctx.note("graphs_with_erasures", eroded);
    ctx.check(
        "erasure leaves a nonempty graph of degree >= b/3",
        accepted == wanted && failures == 0,
        format!("{accepted} graphs meeting the hypothesis ({eroded} with erasures), {failures} failures"),
    );

    let mut rng = stream_rng(master, 1);
    let (mut held, mut violated_premise, mut drawn) = (0, 0, 0);
    let mut bound_failures = 0;
    while held < families && drawn < families * 100 {
        drawn += 1;
        let (family, sites) = random_family(&mut rng);
        let members: BTreeSet<u32> = family.iter().copied().collect();
        let y = family
            .iter()
            .map(|&f| (0..sites).filter(|&s| members.contains(&(f ^ (1 << s)))).count())
            .min()
            .unwrap_or(0) as u32;
        match flip_closure_bound_check(&family, sites, y) {
            Ok(r) => {
                held += 1;
                bound_failures += usize::from(!r.holds);
            }
            Err(e) => return Err(HarnessError::Operation { context: "flip closure".into(), message: e.to_string() }),
        }
        if matches!(flip_closure_bound_check(&family, sites, y + 1), Err(IsoError::PremiseViolated { .. })) {
            violated_premise += 1;
        }
    }
    ctx.check(
        "flip-closed families have at least 2^Y members",
        held == families && bound_failures == 0 && violated_premise == held,
        format!("{held} families, {bound_failures} below 2^Y, premise at Y + 1 rejected in {violated_premise}"),
    );
    Ok(())
}

#[derive(Serialize)]
struct CurveRow {
    t: f64,
    a: f64,
    log_a: f64,
}

fn nash_curve(spec: &ExperimentSpec, ctx: &mut Context) -> Result<(), HarnessError> {
    let d_list = spec.d_list.clone().unwrap_or(vec![2, 3]);
    let n = spec.n.unwrap_or(1000);
    let t_max = spec.t_max.unwrap_or(1e5);
    let step = spec.step.unwrap_or(10.0);
    let rtol = spec.rtol.unwrap_or(1e-8);
    let conv_tol = spec.tolerance.unwrap_or(1e-6);
    let slope_tol = spec.slope_tolerance.unwrap_or(0.05);
    let fit_tol = spec.fit_tolerance.unwrap_or(1e-3);
    for d in d_list {
        let mut profile = NashProfile::new(d, n);
        profile.scale = spec.scale.unwrap_or(profile.scale);
        profile.c = spec.c.unwrap_or(profile.c);
        profile.gamma = spec.gamma.unwrap_or(profile.gamma);
        let sol = op(nash_ode_solve(&profile, t_max, step, rtol), "Nash ODE")?;
        let fine = op(nash_ode_solve(&profile, t_max, step / 2.0, rtol), "Nash ODE")?;
        let rows: Vec<CurveRow> = sol.samples.iter().map(|&(t, u)| CurveRow { t, a: (-u).exp(), log_a: -u }).collect();
        ctx.artifact(&format!("nash_d{d}.csv"), csv_rows(&rows)?);
        let positive = rows.iter().all(|r| r.a > 0.0);
        ctx.check(
            &format!("a(t) positive and strictly decreasing, d = {d}"),
            positive && sol.is_strictly_decreasing() && sol.samples[0] == (0.0, 0.0),
            format!("{} samples, a(t_max) = {:.4e}", rows.len(), rows.last().map_or(1.0, |r| r.a)),
        );
        let change = (-(fine.final_u() - sol.final_u())).exp_m1().abs();
        ctx.check(
            &format!("step halving, d = {d}"),
            change < conv_tol,
            format!("relative change of a(t_max) = {change:.3e} (tolerance {conv_tol:e})"),
        );
        let target = d as f64 / (d as f64 + 2.0);
        let slope = sol.tail_slope().unwrap_or(f64::NAN);
        let rel = ((slope - target) / target).abs();
        ctx.check(
            &format!("tail slope, d = {d}"),
            rel <= slope_tol,
            format!("slope {slope:.4} against {target:.4} ({:.2}% off)", 100.0 * rel),
        );
        let fit = piecewise_constants_fit(&sol, fit_tol);
        let signs = [fit.c3, fit.c9, fit.c13].iter().all(|c| c.is_some_and(|v| v > 0.0));
        ctx.check(
            &format!("regime fits, d = {d}"),
            fit.is_clean() && signs,
            format!(
                "c3 = {:?}, c9 = {:?}, c13 = {:?}, worst residual {:.2e}, continuity gaps {:?}",
                fit.c3,
                fit.c9,
                fit.c13,
                fit.regimes.iter().map(|r| r.max_residual).fold(0.0, f64::max),
                fit.continuity_gaps
            ),
        );
        ctx.artifact(&format!("nash_fit_d{d}.json"), json(&fit));
    }
    Ok(())
}

#[derive(Serialize)]
struct LowerRow {
    base: String,
    alpha: f64,
    n: usize,
    r: usize,
    confinement: f64,
    displayed: f64,
    rigorous: f64,
    pinned: f64,
}

#[derive(Serialize)]
struct FactCsvRow {
    n: usize,
    m: usize,
    lhs: f64,
    rhs: f64,
}

fn lemma45(spec: &ExperimentSpec, ctx: &mut Context) -> Result<(), HarnessError> {
    let max_vertices = spec.max_vertices.unwrap_or(6);
    let alphas = spec.alpha_list.clone().unwrap_or(vec![0.3, 0.5, 0.7]);
    let n_max = spec.n_max.unwrap_or(5);
    let fact_n_max = spec.fact_n_max.unwrap_or(5);
    let lemma_n_max = spec.lemma_n_max.unwrap_or(4);
    let bases = sweep_bases(max_vertices);
    let mut rows = Vec::new();
    for (name, g) in &bases {
        let laws = op(exact_visit_laws(g, 2 * n_max, DEFAULT_BUDGET), "exact visit laws")?;
        for &alpha in &alphas {
            for n in 1..=n_max {
                let pinned = laws[2 * n].laplace(alpha, true);
                for r in 1..=n {
                    let rep = op(lower_bound_assemble(g, r, n, alpha), "lower bound")?;
                    rows.push(LowerRow {
                        base: name.clone(),
                        alpha,
                        n,
                        r,
                        confinement: rep.confinement,
                        displayed: rep.displayed,
                        rigorous: rep.rigorous,
                        pinned,
                    });
                }
            }
        }
    }
    ctx.artifact("lower_bound.csv", csv_rows(&rows)?);
    let over = |f: &dyn Fn(&LowerRow) -> f64| rows.iter().filter(|r| f(r) > r.pinned).count();
    let worst = |f: &dyn Fn(&LowerRow) -> f64| rows.iter().map(|r| f(r) / r.pinned).fold(0.0, f64::max);
    let displayed_over = over(&|r| r.displayed);
    let rigorous_over = over(&|r| r.rigorous);
    ctx.check(
        "assembled lower bound below the pinned value",
        displayed_over == 0,
        format!(
            "{displayed_over} of {} (base, alpha, n, r) instances exceed it, worst ratio {:.3}",
            rows.len(),
            worst(&|r| r.displayed)
        ),
    );
    ctx.check(
        "lower bound with the actual ball volume below the pinned value",
        rigorous_over == 0,
        format!("{rigorous_over} of {} instances exceed it, worst ratio {:.4}", rows.len(), worst(&|r| r.rigorous)),
    );

    let full = ClusterGraph::component_of_origin(&BondConfiguration::full(lattice(2, 2 * fact_n_max + 1)?));
    let mut facts = Vec::new();
    let mut fact_ok = true;
    for n in 1..=fact_n_max {
        let rep = op(lemma_4_5_check(&full, n, DEFAULT_BUDGET), "visit-count fact")?;
        fact_ok &= rep.fact_holds();
        facts.extend(rep.rows.iter().map(|r| FactCsvRow { n, m: r.m, lhs: r.lhs, rhs: r.rhs }));
    }
    let worst_fact = facts.iter().map(|r| r.lhs / r.rhs).fold(0.0, f64::max);
    ctx.artifact("visit_fact.csv", csv_rows(&facts)?);
    ctx.check(
        "squared visit law below the pinned tail on the plane",
        fact_ok,
        format!("{} (n, m) pairs for n <= {fact_n_max}, worst ratio {worst_fact:.4}", facts.len()),
    );

    let mut c0 = f64::INFINITY;
    for (_, g) in &bases {
        for n in 0..=lemma_n_max {
            let rep = op(lemma_4_5_check(g, n, DEFAULT_BUDGET), "visit-count lemma")?;
            c0 = c0.min(rep.c0_prime);
        }
    }
    ctx.note("empirical_c0_prime", c0);
    ctx.check(
        "pinned half-Laplace dominates the alpha_1 Laplace",
        c0 > 0.0 && c0.is_finite(),
        format!("smallest ratio {c0:.4e} over {} bases, n <= {lemma_n_max}", bases.len()),
    );
    Ok(())
}

#[derive(Serialize)]
struct RenormRow {
    p: f64,
    chain: u64,
    blocks: usize,
    classified: usize,
    good: usize,
    bad: usize,
}

fn renorm_field(spec: &ExperimentSpec, ctx: &mut Context) -> Result<(), HarnessError> {
    let d = spec.d.unwrap_or(2);
    let p_list = spec.p_list.clone().unwrap_or(vec![1.0, 0.0, 0.95]);
    let radius = spec.box_radius.unwrap_or(60);
    let scale = spec.block_scale.unwrap_or(10);
    let count = spec.seeds.unwrap_or(20);
    let threshold = spec.good_fraction.unwrap_or(0.9);
    let master = spec.seed.unwrap_or(DEFAULT_SEED);
    ctx.manifest = crate::rng::seed_manifest(master, count);
    let box_spec = lattice(d, radius)?;
    let mut rows = Vec::new();
    for &p in &p_list {
        for (i, &seed) in ctx.manifest.iter().enumerate() {
            let field = op(classify_boxes(&configuration(box_spec, p, seed)?, scale), "renormalization")?;
            rows.push(RenormRow {
                p,
                chain: i as u64,
                blocks: field.blocks.len(),
                classified: field.classified(),
                good: field.count(BlockClass::Good),
                bad: field.count(BlockClass::Bad),
            });
        }
    }
    ctx.artifact("renorm.csv", csv_rows(&rows)?);
    for &p in &p_list {
        let picked: Vec<&RenormRow> = rows.iter().filter(|r| r.p == p).collect();
        let classified: usize = picked.iter().map(|r| r.classified).sum();
        let good: usize = picked.iter().map(|r| r.good).sum();
        let fraction = good as f64 / classified.max(1) as f64;
        let (name, passed) = if p == 1.0 {
            ("all blocks good at p = 1".to_string(), classified > 0 && good == classified)
        } else if p == 0.0 {
            ("all blocks bad at p = 0".to_string(), classified > 0 && good == 0)
        } else {
            (format!("good fraction above {threshold} at p = {p}"), classified > 0 && fraction > threshold)
        };
        ctx.check(&name, passed, format!("{good} of {classified} classified blocks good over {} seeds", picked.len()));
    }
    Ok(())
}
