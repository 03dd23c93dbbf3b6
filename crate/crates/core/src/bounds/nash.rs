use serde::{Deserialize, Serialize};

use super::fit::linear_fit;
use super::BoundsError;

const LN4: f64 = std::f64::consts::LN_2 * 2.0;

/// `F(k) = e^{Ck}` for `k < c nᵞ` and `e^{C k^d}` above, with its
/// generalized inverse `F⁻¹(y) = inf { x ≥ 0 : F(x) ≥ y }`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NashProfile {
    #[serde(rename = "C")]
    pub scale: f64,
    pub c: f64,
    pub gamma: f64,
    pub d: usize,
    pub n: usize,
}

impl NashProfile {
    /// `C = 1`, `c = 1`, `γ = 1/(2(d+2))`.
    pub fn new(d: usize, n: usize) -> Self {
        Self { scale: 1.0, c: 1.0, gamma: 1.0 / (2.0 * (d as f64 + 2.0)), d, n }
    }

    pub fn validate(&self) -> Result<(), BoundsError> {
        let bad = |msg: &str| Err(BoundsError::InvalidProfile(msg.to_string()));
        if !(self.scale > 0.0 && self.c > 0.0 && self.gamma > 0.0) {
            return bad("C, c and gamma must be positive");
        }
        if self.d < 1 || self.n < 1 {
            return bad("d and n must be at least 1");
        }
        if self.threshold() < 1.0 {
            return bad("c n^gamma must be at least 1");
        }
        Ok(())
    }

    /// `k₀ = c nᵞ`.
    pub fn threshold(&self) -> f64 {
        self.c * (self.n as f64).powf(self.gamma)
    }

    /// `log F(k)`.
    pub fn log_f(&self, k: f64) -> f64 {
        if k < self.threshold() {
            self.scale * k
        } else {
            self.scale * k.powi(self.d as i32)
        }
    }

    pub fn f(&self, k: f64) -> f64 {
        self.log_f(k).exp()
    }

    /// `F⁻¹` evaluated at `y = e^{log_y}`.
    pub fn f_inverse_log(&self, log_y: f64) -> f64 {
        if log_y <= 0.0 {
            return 0.0;
        }
        let k0 = self.threshold();
        let x = log_y / self.scale;
        if x < k0 {
            x
        } else {
            x.powf(1.0 / self.d as f64).max(k0)
        }
    }

    pub fn f_inverse(&self, y: f64) -> f64 {
        if y <= 0.0 {
            0.0
        } else {
            self.f_inverse_log(y.ln())
        }
    }

    /// Values of `u = -log a` where `F⁻¹(4/a)` changes branch.
    pub fn regime_boundaries(&self) -> [f64; 2] {
        let k0 = self.threshold();
        [self.scale * k0 - LN4, self.scale * k0.powi(self.d as i32) - LN4]
    }

    fn regime_of(&self, u: f64) -> usize {
        let [u1, u2] = self.regime_boundaries();
        if u < u1 {
            0
        } else if u < u2 {
            1
        } else {
            2
        }
    }

    // `u' = 1 / (8 F⁻¹(4 e^u)²)` using the formula of one branch, so each
    // regime is integrated as a smooth ODE.
    fn rate(&self, u: f64, regime: usize) -> f64 {
        let x = (u + LN4) / self.scale;
        let inv = match regime {
            0 => x,
            1 => self.threshold(),
            _ => x.powf(1.0 / self.d as f64),
        };
        1.0 / (8.0 * inv * inv)
    }
}

/// `a(t)` on the grid `t = 0, step, 2·step, …`, stored as `u = -log a` so
/// tiny values stay representable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NashSolution {
    pub profile: NashProfile,
    pub step: f64,
    pub rtol: f64,
    pub samples: Vec<(f64, f64)>,
    /// `(t, u)` where the solution crosses into a new branch of `F⁻¹`.
    pub crossings: Vec<(f64, f64)>,
    pub accepted_steps: usize,
}

impl NashSolution {
    pub fn a(&self, index: usize) -> f64 {
        (-self.samples[index].1).exp()
    }

    pub fn log_a(&self, index: usize) -> f64 {
        -self.samples[index].1
    }

    pub fn final_u(&self) -> f64 {
        self.samples.last().expect("grid has t = 0").1
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[1].1 > w[0].1) && self.samples.iter().all(|s| s.1.is_finite())
    }

    /// Least-squares slope of `log(-log a)` against `log t` on the last
    /// decade `[t_max/10, t_max]`.
    pub fn tail_slope(&self) -> Option<f64> {
        let t_max = self.samples.last()?.0;
        let (x, y): (Vec<f64>, Vec<f64>) = self
            .samples
            .iter()
            .filter(|&&(t, u)| t >= t_max / 10.0 && t > 0.0 && u > 0.0)
            .map(|&(t, u)| (t.ln(), u.ln()))
            .unzip();
        linear_fit(&x, &y).map(|f| f.slope)
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dp_step(profile: &NashProfile, regime: usize, u: f64, h: f64) -> (f64, f64) {
    let mut k = [0.0; 7];
    k[0] = profile.rate(u, regime);
    for s in 1..7 {
        let incr: f64 = (0..s).map(|j| A[s - 1][j] * k[j]).sum();
        k[s] = profile.rate(u + h * incr, regime);
    }
    let hi: f64 = (0..7).map(|j| B5[j] * k[j]).sum();
    let lo: f64 = (0..7).map(|j| B4[j] * k[j]).sum();
    (u + h * hi, h * (hi - lo))
}

/// Integrates `a' = -a / (8 F⁻¹(4/a)²)`, `a(0) = 1`, up to `t_max` with an
/// adaptive Dormand–Prince scheme, landing exactly on every grid point and
/// every branch change of `F⁻¹`.
pub fn nash_ode_solve(profile: &NashProfile, t_max: f64, step: f64, rtol: f64) -> Result<NashSolution, BoundsError> {
    profile.validate()?;
    if !(step > 0.0 && t_max >= 0.0 && rtol > 0.0) {
        return Err(BoundsError::InvalidProfile("step, t_max and rtol must be positive".into()));
    }
    let boundaries = profile.regime_boundaries();
    let grid = (t_max / step).round() as usize;
    let mut samples = vec![(0.0, 0.0)];
    let mut crossings = Vec::new();
    let (mut t, mut u) = (0.0f64, 0.0f64);
    let mut h = step.min(1e-3);
    let mut accepted = 0;
    for i in 1..=grid {
        let target = i as f64 * step;
        while t < target {
            let regime = profile.regime_of(u);
            let hh = h.min(target - t);
            let (next, err) = dp_step(profile, regime, u, hh);
            let scale = rtol * (1.0 + u.abs().max(next.abs()));
            let ratio = err.abs() / scale;
            if ratio > 1.0 {
                h = hh * (0.9 * ratio.powf(-0.2)).max(0.1);
                if h < 1e-14 * t.max(1.0) {
                    return Err(BoundsError::StepUnderflow { t });
                }
                continue;
            }
            let edge = boundaries.get(regime).copied().filter(|&b| next > b && u < b);
            match edge {
                Some(b) => {
                    // shrink the step until it ends on the branch change
                    let (mut lo, mut hi) = (0.0, hh);
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if dp_step(profile, regime, u, mid).0 < b {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    t += hi;
                    u = b;
                    crossings.push((t, u));
                }
                None => {
                    t = if hh == target - t { target } else { t + hh };
                    u = next;
                }
            }
            accepted += 1;
            h = hh * (0.9 * ratio.max(1e-10).powf(-0.2)).min(5.0);
        }
        samples.push((target, u));
    }
    Ok(NashSolution { profile: *profile, step, rtol, samples, crossings, accepted_steps: accepted })
}

/// One regime's linearized fit `g(u) = slope · t + intercept`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeFit {
    pub regime: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub slope: f64,
    pub intercept: f64,
    /// Largest `|u_fit - u| / (u + log 4)` over the regime.
    pub max_residual: f64,
    pub points: usize,
    pub flagged: bool,
}

/// Closed forms fitted regime by regime, with `-log(a/4)` in place of
/// `-log a`:
///
/// 1. `(-log(a/4))³ = c₃ t + c₄`,
/// 2. `-log a = c₉ t / n^{2γ} + b₂`,
/// 3. `(-log(a/4))^{(d+2)/d} = c₁₃ t + b₃`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseFit {
    pub regimes: Vec<RegimeFit>,
    pub c3: Option<f64>,
    pub c4: Option<f64>,
    pub c9: Option<f64>,
    pub c13: Option<f64>,
    /// Relative jumps of the fitted `u` at each branch change.
    pub continuity_gaps: Vec<f64>,
    pub tolerance: f64,
}

impl PiecewiseFit {
    pub fn is_clean(&self) -> bool {
        self.regimes.iter().all(|r| !r.flagged) && self.continuity_gaps.iter().all(|&g| g <= self.tolerance)
    }
}

fn transform(profile: &NashProfile, regime: usize, u: f64) -> f64 {
    match regime {
        0 => (u + LN4).powi(3),
        1 => u,
        _ => (u + LN4).powf((profile.d as f64 + 2.0) / profile.d as f64),
    }
}

fn untransform(profile: &NashProfile, regime: usize, g: f64) -> f64 {
    match regime {
        0 => g.cbrt() - LN4,
        1 => g,
        _ => g.powf(profile.d as f64 / (profile.d as f64 + 2.0)) - LN4,
    }
}

pub fn piecewise_constants_fit(solution: &NashSolution, tolerance: f64) -> PiecewiseFit {
    let profile = &solution.profile;
    let mut points: Vec<(f64, f64)> = solution.samples.clone();
    points.extend(solution.crossings.iter().copied());
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let bounds = profile.regime_boundaries();
    let mut regimes = Vec::new();
    for regime in 0..3 {
        let lo = if regime == 0 { f64::NEG_INFINITY } else { bounds[regime - 1] };
        let hi = bounds.get(regime).copied().unwrap_or(f64::INFINITY);
        let inside: Vec<(f64, f64)> = points.iter().copied().filter(|&(_, u)| u >= lo && u <= hi).collect();
        let (x, y): (Vec<f64>, Vec<f64>) = inside.iter().map(|&(t, u)| (t, transform(profile, regime, u))).unzip();
        let Some(line) = linear_fit(&x, &y) else {
            continue;
        };
        let max_residual = inside
            .iter()
            .map(|&(t, u)| (untransform(profile, regime, line.slope * t + line.intercept) - u).abs() / (u + LN4))
            .fold(0.0, f64::max);
        regimes.push(RegimeFit {
            regime,
            t_start: inside.first().unwrap().0,
            t_end: inside.last().unwrap().0,
            slope: line.slope,
            intercept: line.intercept,
            max_residual,
            points: inside.len(),
            flagged: max_residual > tolerance,
        });
    }
    let find = |r: usize| regimes.iter().find(|f| f.regime == r);
    let n2g = (profile.n as f64).powf(2.0 * profile.gamma);
    let mut gaps = Vec::new();
    for pair in regimes.windows(2) {
        let t = pair[0].t_end;
        let left = untransform(profile, pair[0].regime, pair[0].slope * t + pair[0].intercept);
        let right = untransform(profile, pair[1].regime, pair[1].slope * t + pair[1].intercept);
        gaps.push((left - right).abs() / (left.abs() + LN4));
    }
    PiecewiseFit {
        c3: find(0).map(|f| f.slope),
        c4: find(0).map(|f| f.intercept),
        c9: find(1).map(|f| f.slope * n2g),
        c13: find(2).map(|f| f.slope),
        regimes,
        continuity_gaps: gaps,
        tolerance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // t(u) from separating variables branch by branch.
    fn closed_form_time(p: &NashProfile, u: f64) -> f64 {
        let [u1, u2] = p.regime_boundaries();
        let d = p.d as f64;
        let k0 = p.threshold();
        let c = p.scale;
        let cube = |v: f64| (v + LN4).powi(3);
        let pow = |v: f64| (v + LN4).powf((d + 2.0) / d);
        let mut t = 8.0 / (3.0 * c * c) * (cube(u.min(u1).max(0.0)) - cube(0.0));
        if u > u1 {
            t += 8.0 * k0 * k0 * (u.min(u2) - u1);
        }
        if u > u2 {
            t += 8.0 / c.powf(2.0 / d) * d / (d + 2.0) * (pow(u) - pow(u2));
        }
        t
    }

    #[test]
    fn inverse_is_a_galois_connection() {
        let p = NashProfile::new(2, 1000);
        for i in 0..400 {
            let k = i as f64 * 0.05;
            assert!(p.f_inverse_log(p.log_f(k)) <= k + 1e-12);
            let y = 1.0 + i as f64 * 0.37;
            assert!(p.f(p.f_inverse(y)) >= y * (1.0 - 1e-12));
        }
        assert_eq!(p.f_inverse(0.5), 0.0);
    }

    #[test]
    fn branches_of_the_inverse() {
        let p = NashProfile::new(2, 1000);
        let k0 = p.threshold();
        assert!((p.f_inverse_log(1.0) - 1.0).abs() < 1e-15);
        assert_eq!(p.f_inverse_log(k0 + 0.5), k0);
        assert!((p.f_inverse_log(100.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn solution_matches_separated_variables() {
        for d in [2, 3] {
            let p = NashProfile::new(d, 1000);
            let sol = nash_ode_solve(&p, 2000.0, 10.0, 1e-10).unwrap();
            assert_eq!(sol.samples[0], (0.0, 0.0));
            assert!(sol.is_strictly_decreasing());
            assert_eq!(sol.crossings.len(), 2);
            for &(t, u) in sol.samples.iter().step_by(20) {
                assert!((closed_form_time(&p, u) - t).abs() <= 1e-6 * t.max(1.0), "d={d} t={t}");
            }
        }
    }

    #[test]
    fn fitted_constants_match_derivation() {
        let p = NashProfile::new(2, 1000);
        let sol = nash_ode_solve(&p, 5000.0, 1.0, 1e-10).unwrap();
        let fit = piecewise_constants_fit(&sol, 1e-3);
        assert!(fit.is_clean(), "{fit:?}");
        assert!((fit.c3.unwrap() - 3.0 / 8.0).abs() < 1e-6);
        assert!((fit.c4.unwrap() - LN4.powi(3)).abs() < 1e-6);
        assert!((fit.c9.unwrap() - 1.0 / 8.0).abs() < 1e-6);
        assert!((fit.c13.unwrap() - 0.25).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_profiles() {
        let mut p = NashProfile::new(2, 10);
        p.c = 0.1;
        assert!(nash_ode_solve(&p, 10.0, 1.0, 1e-8).is_err());
        assert!(nash_ode_solve(&NashProfile::new(2, 10), 10.0, 0.0, 1e-8).is_err());
    }
}
