use std::cmp::Ordering;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::enumerate::{masks, search_by_root, vertices_of, Visitor, MAX_VERTICES};
use super::graph::{IsoError, IsoGraph};
use crate::wreath::WreathGraph;

/// `C₁ = log 2 / 9` in `Fol_{A≀Z/2Z}(k) ≥ exp(C₁ Fol_A(C₂ k))`.
pub const WREATH_EXPONENT: f64 = std::f64::consts::LN_2 / 9.0;
/// `C₂ = 1/1000`.
pub const WREATH_SCALE: f64 = 1.0 / 1000.0;

/// Largest graph handled by the all-subsets searches.
const EXHAUSTIVE_LIMIT: usize = 30;

/// `f_c(x)`: 1 below `c nᵞ`, `x^{1-1/d}` from there on.
pub fn profile_f(x: usize, c: f64, n: usize, gamma: f64, d: usize) -> f64 {
    let x = x as f64;
    if x < c * (n as f64).powf(gamma) {
        1.0
    } else {
        x.powf(1.0 - 1.0 / d as f64)
    }
}

// `k |∂U| ≤ |U|`, with slack for k that are not exact in binary (k/1000).
fn qualifies(k: f64, boundary: usize, size: usize) -> bool {
    k * boundary as f64 <= size as f64 * (1.0 + 1e-12)
}

/// A Følner value found by a capped search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum FolnerValue {
    /// The true minimum.
    Exact(usize),
    /// Nothing qualified up to the cap, which was below the graph size.
    AtLeast(usize),
    /// No subset of the graph qualifies.
    Unbounded,
}

impl FolnerValue {
    pub fn is_exact(self) -> bool {
        !matches!(self, FolnerValue::AtLeast(_))
    }

    /// A lower bound on the value; `None` for unbounded.
    pub fn lower(self) -> Option<usize> {
        match self {
            FolnerValue::Exact(v) | FolnerValue::AtLeast(v) => Some(v),
            FolnerValue::Unbounded => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FolnerEntry {
    pub k: f64,
    pub value: FolnerValue,
    pub connected_only: bool,
    pub cap: usize,
}

struct Smallest {
    k: f64,
    cap: usize,
    best: Option<usize>,
}

impl Visitor for Smallest {
    fn visit(&mut self, _set: u128, size: usize, boundary: usize) {
        if qualifies(self.k, boundary, size) && self.best.map_or(true, |b| size < b) {
            self.best = Some(size);
        }
    }
    fn limit(&self) -> usize {
        self.best.map_or(self.cap, |b| self.cap.min(b - 1))
    }
}

/// `Fol(k)`: the smallest `|U|` with `|∂U|/|U| ≤ 1/k`, over subsets of at
/// most `cap` vertices.
pub fn folner_function(graph: &IsoGraph, k: f64, cap: usize, connected_only: bool) -> Result<FolnerEntry, IsoError> {
    let cap = cap.min(graph.len());
    let best = if connected_only {
        search_by_root(graph, |_| Smallest { k, cap, best: None })?
            .into_iter()
            .filter_map(|s| s.best)
            .min()
    } else {
        smallest_any(graph, k, cap)?
    };
    let value = match best {
        Some(v) => FolnerValue::Exact(v),
        None if cap < graph.len() => FolnerValue::AtLeast(cap + 1),
        None => FolnerValue::Unbounded,
    };
    Ok(FolnerEntry { k, value, connected_only, cap })
}

fn smallest_any(graph: &IsoGraph, k: f64, cap: usize) -> Result<Option<usize>, IsoError> {
    let n = graph.len();
    if n > EXHAUSTIVE_LIMIT {
        return Err(IsoError::TooLarge(n));
    }
    let nbr = masks(graph)?;
    for size in 1..=cap {
        let mut set: u128 = (1 << size) - 1;
        while set < 1 << n {
            if qualifies(k, boundary_of(graph, &nbr, set), size) {
                return Ok(Some(size));
            }
            set = next_combination(set);
        }
    }
    Ok(None)
}

fn next_combination(set: u128) -> u128 {
    let low = set & set.wrapping_neg();
    let ripple = set + low;
    ripple | (((set ^ ripple) >> 2) / low)
}

fn is_connected_mask(nbr: &[u128], set: u128) -> bool {
    let mut reached = set & set.wrapping_neg();
    let mut frontier = reached;
    while frontier != 0 {
        let grown = vertices_of(frontier).into_iter().fold(0u128, |m, v| m | nbr[v]) & set & !reached;
        reached |= grown;
        frontier = grown;
    }
    reached == set
}

fn boundary_of(graph: &IsoGraph, nbr: &[u128], set: u128) -> usize {
    vertices_of(set)
        .into_iter()
        .map(|v| graph.external(v) + (nbr[v] & !set).count_ones() as usize)
        .sum()
}

pub fn write_profile_csv<W: Write>(entries: &[FolnerEntry], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "value", "exact", "connected_only", "cap"])?;
    for e in entries {
        let value = match e.value {
            FolnerValue::Exact(v) | FolnerValue::AtLeast(v) => v.to_string(),
            FolnerValue::Unbounded => "inf".to_string(),
        };
        w.write_record([
            e.k.to_string(),
            value,
            e.value.is_exact().to_string(),
            e.connected_only.to_string(),
            e.cap.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Minimiser of `|∂A|/f_c(|A|)` over connected `A`. Sets with empty
/// boundary are skipped; `beta` is `None` when nothing else is left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaReport {
    pub beta: Option<f64>,
    pub argmin_size: usize,
    pub argmin_vertices: Vec<usize>,
    pub c: f64,
    pub gamma: f64,
    pub n: usize,
    #[serde(skip)]
    pub d: usize,
    #[serde(skip)]
    pub cap: usize,
    /// True when the cap covered the whole graph.
    #[serde(skip)]
    pub exact: bool,
}

impl BetaReport {
    pub fn is_degenerate(&self) -> bool {
        self.beta.is_none()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Copy)]
struct Candidate {
    ratio: f64,
    size: usize,
    set: u128,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        let by_ratio = self.ratio.partial_cmp(&other.ratio).expect("finite ratios");
        let ord = by_ratio
            .then(self.size.cmp(&other.size))
            .then_with(|| vertices_of(self.set).cmp(&vertices_of(other.set)));
        ord == Ordering::Less
    }
}

fn keep_better(best: &mut Option<Candidate>, cand: Candidate) {
    if best.as_ref().map_or(true, |b| cand.better_than(b)) {
        *best = Some(cand);
    }
}

struct Ratios {
    f: Vec<f64>,
    cap: usize,
    best: Option<Candidate>,
}

impl Visitor for Ratios {
    fn visit(&mut self, set: u128, size: usize, boundary: usize) {
        if boundary > 0 {
            keep_better(&mut self.best, Candidate { ratio: boundary as f64 / self.f[size], size, set });
        }
    }
    fn limit(&self) -> usize {
        self.cap
    }
}

fn finish(best: Option<Candidate>, c: f64, gamma: f64, n: usize, d: usize, cap: usize, exact: bool) -> BetaReport {
    let vertices = best.map(|b| vertices_of(b.set)).unwrap_or_default();
    BetaReport {
        beta: best.map(|b| b.ratio),
        argmin_size: vertices.len(),
        argmin_vertices: vertices,
        c,
        gamma,
        n,
        d,
        cap,
        exact,
    }
}

/// `β = min |∂A| / f_c(|A|)` over connected `A` with at most `cap`
/// vertices, by growth from each root vertex.
pub fn isoperimetric_beta(
    graph: &IsoGraph,
    c: f64,
    gamma: f64,
    n: usize,
    d: usize,
    cap: usize,
) -> Result<BetaReport, IsoError> {
    let cap = cap.min(graph.len());
    let f: Vec<f64> = (0..=cap).map(|x| profile_f(x, c, n, gamma, d)).collect();
    let mut best = None;
    for part in search_by_root(graph, |_| Ratios { f: f.clone(), cap, best: None })? {
        if let Some(cand) = part.best {
            keep_better(&mut best, cand);
        }
    }
    Ok(finish(best, c, gamma, n, d, cap, cap == graph.len()))
}

/// The same minimum by scanning every subset and testing connectivity.
pub fn isoperimetric_beta_exhaustive(
    graph: &IsoGraph,
    c: f64,
    gamma: f64,
    n: usize,
    d: usize,
) -> Result<BetaReport, IsoError> {
    let size = graph.len();
    if size > EXHAUSTIVE_LIMIT {
        return Err(IsoError::TooLarge(size));
    }
    let nbr = masks(graph)?;
    let f: Vec<f64> = (0..=size).map(|x| profile_f(x, c, n, gamma, d)).collect();
    let mut best: Option<Candidate> = None;
    for set in 1u128..(1 << size) {
        let boundary = boundary_of(graph, &nbr, set);
        if boundary == 0 {
            continue;
        }
        let count = set.count_ones() as usize;
        let cand = Candidate { ratio: boundary as f64 / f[count], size: count, set };
        if best.as_ref().map_or(true, |b| cand.better_than(b)) && is_connected_mask(&nbr, set) {
            best = Some(cand);
        }
    }
    Ok(finish(best, c, gamma, n, d, size, true))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

/// One `k` of the wreath Følner comparison.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FolnerCheck {
    pub k: f64,
    pub wreath_value: FolnerValue,
    pub base_value: FolnerValue,
    /// `exp(C₁ Fol_A(C₂ k))`; `None` when the base value is unbounded.
    pub rhs: Option<f64>,
    pub verdict: Verdict,
}

/// Compares `Fol_{A≀Z/2Z}(k)` with `exp(C₁ Fol_A(C₂ k))` for each `k`,
/// using connected searches capped at `cap`. External edges of `base` are
/// lifted to the wreath.
pub fn folner_lower_bound_check(
    base: &IsoGraph,
    wreath: &WreathGraph,
    k_list: &[f64],
    cap: usize,
) -> Result<Vec<FolnerCheck>, IsoError> {
    let lifted = IsoGraph::wreath(wreath, base)?;
    k_list
        .iter()
        .map(|&k| {
            let wreath_value = folner_function(&lifted, k, cap, true)?.value;
            let base_value = folner_function(base, k * WREATH_SCALE, cap, true)?.value;
            let rhs = match base_value {
                FolnerValue::Unbounded => None,
                FolnerValue::Exact(v) | FolnerValue::AtLeast(v) => Some((WREATH_EXPONENT * v as f64).exp()),
            };
            let verdict = match (wreath_value, base_value) {
                (FolnerValue::Unbounded, _) => Verdict::Holds,
                (_, FolnerValue::Unbounded) => {
                    if wreath_value.is_exact() {
                        Verdict::Fails
                    } else {
                        Verdict::Inconclusive
                    }
                }
                (_, FolnerValue::AtLeast(_)) => Verdict::Inconclusive,
                (FolnerValue::Exact(v), _) => {
                    if v as f64 >= rhs.unwrap() {
                        Verdict::Holds
                    } else {
                        Verdict::Fails
                    }
                }
                (FolnerValue::AtLeast(v), _) => {
                    if v as f64 >= rhs.unwrap() {
                        Verdict::Holds
                    } else {
                        Verdict::Inconclusive
                    }
                }
            };
            Ok(FolnerCheck { k, wreath_value, base_value, rhs, verdict })
        })
        .collect()
}

/// Smallest and largest `|∂' U| / |∂ U|` over connected `U` (in `single`)
/// with at most `cap` vertices and nonempty boundary, for two edge sets on
/// the same vertices. Returns `(c1, c2, sets_compared)`.
pub fn quasi_isometry_constants(
    single: &IsoGraph,
    double: &IsoGraph,
    cap: usize,
) -> Result<(f64, f64, usize), IsoError> {
    assert_eq!(single.len(), double.len());
    if double.len() > MAX_VERTICES {
        return Err(IsoError::TooLarge(double.len()));
    }
    let nbr = masks(double)?;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    let mut count = 0;
    for (set, boundary) in super::enumerate::connected_subsets(single, cap)? {
        if boundary == 0 {
            continue;
        }
        let ratio = boundary_of(double, &nbr, set) as f64 / boundary as f64;
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        count += 1;
    }
    Ok((lo, hi, count))
}
