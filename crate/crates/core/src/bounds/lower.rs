use serde::{Deserialize, Serialize};

use super::BoundsError;
use crate::percolation::ClusterGraph;
use crate::walk::{exact_confinement, exact_visit_laws};

/// `α₁ = 1/(2√5)`.
pub const ALPHA_ONE: f64 = 0.223_606_797_749_978_97;

/// Minimises the surrogate exponent `r^d + n/r²` over `r = 1..=r_max`.
pub fn surrogate_scan(n: usize, d: usize, r_max: usize) -> (usize, f64) {
    (1..=r_max.max(1))
        .map(|r| {
            let rf = r as f64;
            (r, rf.powi(d as i32) + n as f64 / (rf * rf))
        })
        .fold((0, f64::INFINITY), |best, cand| if cand.1 < best.1 { cand } else { best })
}

/// `α^{r^d} / (2d r^d) · P(sup_{i ≤ n} D(0, X_i) ≤ r)²`.
pub fn lower_bound_displayed(r: usize, alpha: f64, d: usize, confinement: f64) -> Result<f64, BoundsError> {
    if r == 0 {
        return Err(BoundsError::ZeroRadius);
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(BoundsError::InvalidAlpha(alpha));
    }
    let vol = (r as f64).powi(d as i32);
    Ok(alpha.powf(vol) / (2.0 * d as f64 * vol) * confinement * confinement)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub r: usize,
    pub n: usize,
    pub alpha: f64,
    pub confinement: f64,
    /// The product with the volume bounds `|B_r| ≤ r^d` and `ν(B_r) ≤ 2d r^d`.
    pub displayed: f64,
    /// `ν(0) α^{|B_r|} / ν(B_r) · P(…)²` with the actual ball.
    pub rigorous: f64,
    pub ball_size: usize,
    pub ball_weight: usize,
}

/// Lower bounds on `E[α^{N_{2n}} 1{X_{2n} = 0}]` from the exact confinement
/// probability of the chemical ball `B_r`.
pub fn lower_bound_assemble(cluster: &ClusterGraph, r: usize, n: usize, alpha: f64) -> Result<LowerBoundReport, BoundsError> {
    let displayed_unit = lower_bound_displayed(r, alpha, cluster.dim(), 1.0)?;
    let confinement = exact_confinement(cluster, r, n)?;
    let ball = cluster.induced_ball(r)?;
    let origin = cluster.require_origin()?;
    let ball_weight: usize = ball.degrees().iter().sum();
    let rigorous = cluster.degree(origin) as f64 * alpha.powi(ball.len() as i32) / ball_weight as f64
        * confinement
        * confinement;
    Ok(LowerBoundReport {
        r,
        n,
        alpha,
        confinement,
        displayed: displayed_unit * confinement * confinement,
        rigorous,
        ball_size: ball.len(),
        ball_weight,
    })
}

/// Decay constant for `α` given one for `α₀`: unchanged when `α ≤ α₀`,
/// else scaled by `log α / log α₀`.
pub fn alpha_transfer(c0: f64, alpha0: f64, alpha: f64) -> Result<f64, BoundsError> {
    for a in [alpha0, alpha] {
        if !(a > 0.0 && a < 1.0) {
            return Err(BoundsError::InvalidAlpha(a));
        }
    }
    Ok(if alpha <= alpha0 { c0 } else { c0 * alpha.ln() / alpha0.ln() })
}

/// `P(N_n = m)² ≤ 2d (2m+1)^d P(N_{2n} ≤ 2m, X_{2n} = 0)` at one `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactRow {
    pub m: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma45Report {
    pub n: usize,
    pub rows: Vec<FactRow>,
    /// Largest `lhs / rhs` over the rows.
    pub worst_ratio: f64,
    /// `E[(1/2)^{N_{2n}} 1{X_{2n} = 0}]`.
    pub pinned_half: f64,
    /// `E[α₁^{N_n}]`.
    pub unpinned_alpha1: f64,
    /// `pinned_half / unpinned_alpha1`.
    pub c0_prime: f64,
}

impl Lemma45Report {
    pub fn fact_holds(&self) -> bool {
        self.rows.iter().all(|r| r.lhs <= r.rhs * (1.0 + 1e-12))
    }
}

pub fn lemma_4_5_check(cluster: &ClusterGraph, n: usize, budget: u64) -> Result<Lemma45Report, BoundsError> {
    let laws = exact_visit_laws(cluster, 2 * n, budget)?;
    let (half, double) = (&laws[n], &laws[2 * n]);
    let d = cluster.dim() as i32;
    let rows: Vec<FactRow> = half
        .unpinned
        .iter()
        .enumerate()
        .filter(|&(_, &q)| q > 0.0)
        .map(|(m, &q)| FactRow {
            m,
            lhs: q * q,
            rhs: 2.0 * d as f64 * ((2 * m + 1) as f64).powi(d) * double.pinned_at_most(2 * m),
        })
        .collect();
    let worst_ratio = rows.iter().map(|r| r.lhs / r.rhs).fold(0.0, f64::max);
    let pinned_half = double.laplace(0.5, true);
    let unpinned_alpha1 = half.laplace(ALPHA_ONE, false);
    Ok(Lemma45Report { n, rows, worst_ratio, pinned_half, unpinned_alpha1, c0_prime: pinned_half / unpinned_alpha1 })
}
