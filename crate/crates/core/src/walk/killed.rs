use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::{check_walkable, WalkError};
use crate::percolation::ClusterGraph;

/// Balls up to this size use the dense symmetric eigensolver.
const DENSE_LIMIT: usize = 2000;
/// Largest ball handled at all.
const BALL_LIMIT: usize = 20_000;
const POWER_ITERATIONS: usize = 2_000_000;
const POWER_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SurvivalPoint {
    pub n: usize,
    pub p: f64,
}

/// Spectral data of the walk killed on leaving the chemical ball `B_r(C)`.
///
/// Serializes to the fields `r, ball_size, half_ball_size, lambda1,
/// paper_bound, rayleigh_h, survival`; the remaining fields are diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KilledOperatorReport {
    pub r: usize,
    pub ball_size: usize,
    pub half_ball_size: usize,
    /// Smallest eigenvalue of `Id − P^{B_r}` in `l²(ν)`.
    pub lambda1: f64,
    /// `8 d |B_r| / (r² |B_{⌊r/2⌋}|)`.
    #[serde(rename = "paper_bound")]
    pub gap_bound: f64,
    /// `ξ(h, h) / ‖h‖²_ν` for `h(x) = (r − D(0, x)) 1_{B_r}`.
    pub rayleigh_h: f64,
    /// `P_0(σ_r > n)`.
    pub survival: Vec<SurvivalPoint>,
    #[serde(skip)]
    pub dirichlet_h: f64,
    #[serde(skip)]
    pub norm_h: f64,
    /// `(1/2d) (r/2)² |B_{⌊r/2⌋}|`.
    #[serde(skip)]
    pub norm_floor: f64,
    /// Residual `‖S v − μ v‖` of the returned top eigenvector.
    #[serde(skip)]
    pub residual: f64,
}

impl KilledOperatorReport {
    /// Whether `ξ(h, h) ≤ |B_r|`.
    pub fn dirichlet_within_ball_size(&self) -> bool {
        self.dirichlet_h <= self.ball_size as f64
    }

    /// Whether `‖h‖² ≥ (1/2d)(r/2)²|B_{r/2}|`.
    pub fn norm_above_floor(&self) -> bool {
        self.norm_h >= self.norm_floor
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// The ball as a sub-Markovian kernel: `p(x, y) = 1/ν(x)` for adjacent
/// `x, y ∈ B_r`, mass `1 − Σ_y p(x, y)` killed.
struct Killed {
    ball: ClusterGraph,
}

impl Killed {
    /// `S = ν^{1/2} P ν^{-1/2}`, with entries `1/√(ν_x ν_y)`.
    fn dense_symmetric(&self) -> DMatrix<f64> {
        let m = self.ball.len();
        let mut s = DMatrix::zeros(m, m);
        for x in 0..m {
            for &y in self.ball.neighbors(x) {
                s[(x, y)] = 1.0 / ((self.ball.degree(x) * self.ball.degree(y)) as f64).sqrt();
            }
        }
        s
    }

    fn apply_symmetric(&self, v: &[f64], out: &mut [f64]) {
        for x in 0..self.ball.len() {
            let nx = self.ball.degree(x) as f64;
            out[x] = self
                .ball
                .neighbors(x)
                .iter()
                .map(|&y| v[y] / (nx * self.ball.degree(y) as f64).sqrt())
                .sum();
        }
    }

    fn residual(&self, v: &[f64], mu: f64) -> f64 {
        let mut sv = vec![0.0; v.len()];
        self.apply_symmetric(v, &mut sv);
        sv.iter().zip(v).map(|(a, b)| (a - mu * b).powi(2)).sum::<f64>().sqrt()
    }

    /// Largest eigenvalue of `S` and the residual of its eigenvector.
    fn top_eigenvalue(&self) -> Result<(f64, f64), WalkError> {
        if self.ball.len() <= DENSE_LIMIT {
            Ok(self.dense_top())
        } else {
            self.power_top()
        }
    }

    fn dense_top(&self) -> (f64, f64) {
        let eig = SymmetricEigen::new(self.dense_symmetric());
        let (i, &mu) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("ball is nonempty");
        let v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
        (mu, self.residual(&v, mu))
    }

    /// Power iteration on `(I + S) / 2`, whose spectrum lies in `[0, 1]`.
    fn power_top(&self) -> Result<(f64, f64), WalkError> {
        let m = self.ball.len();
        let mut v = vec![1.0 / (m as f64).sqrt(); m];
        let mut sv = vec![0.0; m];
        let mut res = f64::INFINITY;
        for iter in 1..=POWER_ITERATIONS {
            self.apply_symmetric(&v, &mut sv);
            for (s, &x) in sv.iter_mut().zip(&v) {
                *s = 0.5 * (x + *s);
            }
            let norm = sv.iter().map(|x| x * x).sum::<f64>().sqrt();
            for (x, s) in v.iter_mut().zip(&sv) {
                *x = s / norm;
            }
            if iter % 64 == 0 {
                self.apply_symmetric(&v, &mut sv);
                let mu: f64 = sv.iter().zip(&v).map(|(a, b)| a * b).sum();
                res = self.residual(&v, mu);
                if res < POWER_TOLERANCE {
                    return Ok((mu, res));
                }
            }
        }
        Err(WalkError::NoConvergence { residual: res })
    }

    /// `P(σ_r > n)` for each `n` in increasing order, from the origin.
    fn survival(&self, n_list: &[usize]) -> Vec<SurvivalPoint> {
        let origin = self.ball.origin().expect("balls contain the origin");
        let mut order = n_list.to_vec();
        order.sort_unstable();
        order.dedup();
        let mut u = vec![0.0; self.ball.len()];
        u[origin] = 1.0;
        let mut next = vec![0.0; u.len()];
        let mut step = 0;
        let mut out = Vec::with_capacity(order.len());
        for &n in &order {
            while step < n {
                next.iter_mut().for_each(|x| *x = 0.0);
                for (x, &mass) in u.iter().enumerate() {
                    if mass != 0.0 {
                        let share = mass / self.ball.degree(x) as f64;
                        for &y in self.ball.neighbors(x) {
                            next[y] += share;
                        }
                    }
                }
                std::mem::swap(&mut u, &mut next);
                step += 1;
            }
            out.push(SurvivalPoint { n, p: u.iter().sum() });
        }
        out
    }
}

/// Builds the killed kernel on `B_r(C)` and reports `λ₁`, the bound
/// `8d|B_r|/(r²|B_{r/2}|)`, the Rayleigh quotient of the tent function `h`
/// and the survival probabilities `P(σ_r > n)`.
///
/// For a lattice cluster `C_n` the box must satisfy `n ≥ r + 1`, so the ball
/// and its degrees are those of the infinite-volume cluster.
pub fn killed_operator_report(
    cluster: &ClusterGraph,
    r: usize,
    n_list: &[usize],
) -> Result<KilledOperatorReport, WalkError> {
    check_walkable(cluster, 0)?;
    if r == 0 {
        return Err(WalkError::NotKilled);
    }
    let ball = cluster.ball(r)?;
    let half = cluster.ball(r / 2)?.len();
    if ball.len() > BALL_LIMIT {
        return Err(WalkError::BallTooLarge { size: ball.len(), limit: BALL_LIMIT });
    }
    if ball.is_closed() {
        return Err(WalkError::NotKilled);
    }
    let killed = Killed { ball };
    let ball = &killed.ball;
    let (mu, residual) = killed.top_eigenvalue()?;
    let lambda1 = 1.0 - mu;

    let d = cluster.dim() as f64;
    let dist = ball.chemical_distances()?;
    let h: Vec<f64> = dist.iter().map(|d| (r - d.expect("ball is connected")) as f64).collect();
    // energies under the weights ν(x)/2d, which lie in (0, 1]
    let norm_h: f64 = (0..ball.len()).map(|x| ball.degree(x) as f64 * h[x] * h[x]).sum::<f64>() / (2.0 * d);
    let cross: f64 = (0..ball.len())
        .map(|x| ball.neighbors(x).iter().map(|&y| h[x] * h[y]).sum::<f64>())
        .sum::<f64>()
        / (2.0 * d);
    let dirichlet_h = norm_h - cross;
    let rf = r as f64;

    Ok(KilledOperatorReport {
        r,
        ball_size: ball.len(),
        half_ball_size: half,
        lambda1,
        gap_bound: 8.0 * d * ball.len() as f64 / (rf * rf * half as f64),
        rayleigh_h: dirichlet_h / norm_h,
        survival: killed.survival(n_list),
        dirichlet_h,
        norm_h,
        norm_floor: (rf / 2.0).powi(2) * half as f64 / (2.0 * d),
        residual,
    })
}

/// Exact `P_0(sup_{i ≤ n} D(0, X_i) ≤ r)` for the walk on `cluster`.
pub fn exact_confinement(cluster: &ClusterGraph, r: usize, n: usize) -> Result<f64, WalkError> {
    check_walkable(cluster, n)?;
    let killed = Killed { ball: cluster.induced_ball(r)? };
    Ok(killed.survival(&[n])[0].p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::percolation::{BondConfiguration, LatticeSpec};

    fn full(n: usize) -> ClusterGraph {
        ClusterGraph::component_of_origin(&BondConfiguration::full(LatticeSpec::new(2, n).unwrap()))
    }

    #[test]
    fn star_ball_has_half_gap() {
        let rep = killed_operator_report(&full(3), 1, &[0, 1, 2]).unwrap();
        assert_eq!(rep.ball_size, 5);
        assert!((rep.lambda1 - 0.5).abs() < 1e-12);
        assert_eq!(rep.survival[0].p, 1.0);
        assert_eq!(rep.survival[1].p, 1.0);
        assert!((rep.survival[2].p - 0.25).abs() < 1e-15);
    }

    #[test]
    fn radius_two_bound() {
        let rep = killed_operator_report(&full(3), 2, &[]).unwrap();
        assert_eq!((rep.ball_size, rep.half_ball_size), (13, 5));
        assert!((rep.gap_bound - 10.4).abs() < 1e-12);
        assert!(rep.lambda1 <= rep.gap_bound);
        assert!(rep.lambda1 <= rep.rayleigh_h + 1e-12);
    }

    #[test]
    fn tent_energy_counts_level_edges() {
        // every edge of the plane joins two distance levels
        let g = full(6);
        let rep = killed_operator_report(&g, 5, &[]).unwrap();
        assert_eq!(rep.dirichlet_h, g.ball(5).unwrap().edge_count() as f64 / 4.0);
        assert!(rep.dirichlet_within_ball_size());
        assert!(rep.norm_above_floor());
    }

    #[test]
    fn needs_a_margin_around_the_ball() {
        assert!(killed_operator_report(&full(3), 3, &[]).is_err());
        assert_eq!(killed_operator_report(&full(3), 0, &[]), Err(WalkError::NotKilled));
        // the ball covers the whole graph, nothing is killed
        assert_eq!(killed_operator_report(&ClusterGraph::path(3), 2, &[]), Err(WalkError::NotKilled));
    }

    #[test]
    fn survival_is_nonincreasing() {
        let rep = killed_operator_report(&full(5), 4, &[0, 1, 5, 10, 40, 41, 80]).unwrap();
        for w in rep.survival.windows(2) {
            assert!(w[1].p <= w[0].p);
        }
    }

    #[test]
    fn power_iteration_matches_dense() {
        let k = Killed { ball: full(7).ball(6).unwrap() };
        let (dense, res) = k.dense_top();
        let (power, _) = k.power_top().unwrap();
        assert!(res < 1e-10);
        assert!((dense - power).abs() < 1e-9, "{dense} vs {power}");
    }

    #[test]
    fn json_fields() {
        let rep = killed_operator_report(&full(3), 1, &[0]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&rep.to_json()).unwrap();
        let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(
            keys,
            ["ball_size", "half_ball_size", "lambda1", "paper_bound", "r", "rayleigh_h", "survival"]
        );
        assert_eq!(v["survival"][0]["n"], 0);
    }
}
