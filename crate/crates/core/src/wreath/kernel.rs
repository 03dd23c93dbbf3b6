use super::graph::{WreathError, WreathGraph};
use crate::percolation::ClusterGraph;

/// Lamp patterns `(lamp at source, lamp at target)` of one move.
const PATTERNS: [(u32, u32); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

/// The lamplighter walk on `A ≀ Z/2Z`.
///
/// From `(a, f)` the walker picks a base neighbour `b` with probability
/// `1/ν(a)`, and the lamps at `a` and `b` are set independently, each off with
/// probability `α` and on with probability `1 − α`.
#[derive(Clone, Debug, PartialEq)]
pub struct LamplighterKernel {
    alpha: f64,
    wreath: WreathGraph,
}

impl LamplighterKernel {
    pub fn new(base: ClusterGraph, alpha: f64) -> Result<Self, WreathError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(WreathError::InvalidAlpha(alpha));
        }
        if base.len() == 1 {
            return Err(WreathError::SingleVertex);
        }
        if !base.is_closed() {
            return Err(crate::walk::WalkError::TruncatedGraph.into());
        }
        Ok(Self { alpha, wreath: WreathGraph::new(base)? })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn wreath(&self) -> &WreathGraph {
        &self.wreath
    }

    pub fn base(&self) -> &ClusterGraph {
        self.wreath.base()
    }

    fn lamp_weight(&self, on: u32) -> f64 {
        if on == 1 {
            1.0 - self.alpha
        } else {
            self.alpha
        }
    }

    /// The base transition `p(a, b) = 1/ν(a)` for adjacent `a, b`.
    pub fn base_step(&self, a: usize, b: usize) -> f64 {
        if self.base().neighbors(a).contains(&b) {
            1.0 / self.base().degree(a) as f64
        } else {
            0.0
        }
    }

    /// One-step law from `state`, as `(target, mass)` pairs.
    pub fn step_distribution(&self, state: usize) -> Vec<(usize, f64)> {
        let (a, mask) = self.wreath.decode(state);
        let base = self.base();
        let p = 1.0 / base.degree(a) as f64;
        let mut out = Vec::with_capacity(4 * base.neighbors(a).len());
        for &b in base.neighbors(a) {
            for (x, y) in PATTERNS {
                let target = (mask & !(1 << a) & !(1 << b)) | (x << a) | (y << b);
                out.push((self.wreath.index(b, target), self.lamp_weight(x) * self.lamp_weight(y) * p));
            }
        }
        out
    }

    /// `p̃(u, v)`.
    pub fn transition(&self, u: usize, v: usize) -> f64 {
        self.step_distribution(u).into_iter().filter(|&(t, _)| t == v).map(|(_, m)| m).sum()
    }

    /// Law of `Z_steps` from `o`. With `allowed`, mass moving to a state
    /// whose position or lamp support leaves the allowed base vertices is
    /// killed.
    pub fn distribution(&self, steps: usize, allowed: Option<&[usize]>) -> Vec<f64> {
        let keep = allowed.map(|list| {
            let mask: u32 = list.iter().fold(0, |m, &a| m | (1 << a));
            move |state: usize| {
                let (a, f) = self.wreath.decode(state);
                mask & (1 << a) != 0 && f & !mask == 0
            }
        });
        let mut u = vec![0.0; self.wreath.vertex_count()];
        u[self.wreath.origin()] = 1.0;
        let mut next = vec![0.0; u.len()];
        for _ in 0..steps {
            next.iter_mut().for_each(|x| *x = 0.0);
            for (s, &mass) in u.iter().enumerate() {
                if mass == 0.0 {
                    continue;
                }
                for (t, w) in self.step_distribution(s) {
                    if keep.as_ref().is_none_or(|k| k(t)) {
                        next[t] += mass * w;
                    }
                }
            }
            std::mem::swap(&mut u, &mut next);
        }
        u
    }

    /// `P̃_o(Z_steps = o)`, optionally for the walk killed outside `allowed`.
    pub fn return_probability(&self, steps: usize, allowed: Option<&[usize]>) -> f64 {
        self.distribution(steps, allowed)[self.wreath.origin()]
    }

    /// Position marginal of a wreath distribution.
    pub fn position_marginal(&self, dist: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.wreath.sites()];
        for (s, &m) in dist.iter().enumerate() {
            out[self.wreath.decode(s).0] += m;
        }
        out
    }

    /// Law of the lamp configuration after the walker follows the fixed base
    /// trajectory `path` from the all-off configuration.
    pub fn lamp_law_given_path(&self, path: &[usize]) -> Vec<f64> {
        let mut law = vec![0.0; 1 << self.wreath.sites()];
        law[0] = 1.0;
        for w in path.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mut next = vec![0.0; law.len()];
            for (mask, &m) in law.iter().enumerate() {
                if m == 0.0 {
                    continue;
                }
                for (x, y) in PATTERNS {
                    let target = (mask as u32 & !(1 << a) & !(1 << b)) | (x << a) | (y << b);
                    next[target as usize] += m * self.lamp_weight(x) * self.lamp_weight(y);
                }
            }
            law = next;
        }
        law
    }

    pub fn measure(&self) -> ReversibleMeasure<'_> {
        ReversibleMeasure { kernel: self }
    }

    /// `max |m(u) p̃(u, v) − m(v) p̃(v, u)|` over all state pairs.
    pub fn detailed_balance_violation(&self) -> f64 {
        let m = self.measure();
        let mut worst = 0.0f64;
        for u in 0..self.wreath.vertex_count() {
            for (v, puv) in self.step_distribution(u) {
                let gap = (m.weight(u) * puv - m.weight(v) * self.transition(v, u)).abs();
                worst = worst.max(gap);
            }
        }
        worst
    }
}

/// `m(a, f) = ν(a) ((1 − α)/α)^{|f|}`, reversible for the lamplighter walk.
#[derive(Clone, Copy, Debug)]
pub struct ReversibleMeasure<'a> {
    kernel: &'a LamplighterKernel,
}

impl ReversibleMeasure<'_> {
    pub fn weight(&self, state: usize) -> f64 {
        let (a, mask) = self.kernel.wreath.decode(state);
        let ratio = (1.0 - self.kernel.alpha) / self.kernel.alpha;
        self.kernel.base().degree(a) as f64 * ratio.powi(mask.count_ones() as i32)
    }
}
