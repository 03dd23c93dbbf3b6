use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::BondConfiguration;

#[derive(Debug, Error, PartialEq)]
pub enum RenormError {
    #[error("block scale must be at least 4, got {0}")]
    ScaleTooSmall(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockClass {
    Good,
    Bad,
    /// The enlarged block leaves the sampled box.
    Unclassifiable,
}

/// Flags of one block `B_i`. Criteria fields are `None` when unclassifiable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub block: Vec<i32>,
    pub class: BlockClass,
    /// `R_i^N`: all three clauses below hold.
    pub crossing: Option<bool>,
    /// `S_i^N`: some edge of the translated row `E_i` is open.
    pub edge_event: Option<bool>,
    /// `B'_i` has exactly one crossing component `K`.
    pub crossing_cluster: Option<bool>,
    /// No open path of length `> N/10` in `B'_i` avoids `K`.
    pub long_paths_attached: Option<bool>,
    /// `K` crosses every sub-box of `B'_i` with radius `> N/10`.
    pub sub_boxes_crossed: Option<bool>,
}

/// The block field `φ_N ω` over every block meeting the sampled box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenormalizedField {
    pub scale: usize,
    pub enlarged_radius: usize,
    pub blocks: Vec<BlockReport>,
}

impl RenormalizedField {
    pub fn count(&self, class: BlockClass) -> usize {
        self.blocks.iter().filter(|b| b.class == class).count()
    }

    pub fn classified(&self) -> usize {
        self.blocks.len() - self.count(BlockClass::Unclassifiable)
    }

    /// Good blocks among classified ones; `None` when nothing is classified.
    pub fn good_fraction(&self) -> Option<f64> {
        let total = self.classified();
        (total > 0).then(|| self.count(BlockClass::Good) as f64 / total as f64)
    }

    pub fn block(&self, index: &[i32]) -> Option<&BlockReport> {
        self.blocks.iter().find(|b| b.block == index)
    }
}

/// Classifies the blocks `B_i` (centre `(2N+1)i`, radius `N`) meeting the box.
///
/// The enlarged block `B'_i` has radius `⌊5N/4⌋`; blocks whose enlarged box
/// is not contained in the sampled box are unclassifiable.
pub fn classify_boxes(config: &BondConfiguration, scale: usize) -> Result<RenormalizedField, RenormError> {
    if scale < 4 {
        return Err(RenormError::ScaleTooSmall(scale));
    }
    let spec = config.spec();
    let d = spec.dim();
    let n = spec.radius() as i64;
    let big_n = scale as i64;
    let m = (5 * scale / 4) as i64;
    let period = 2 * big_n + 1;
    let g = (n + big_n) / period;
    let side = (2 * g + 1) as usize;

    let mut blocks = Vec::with_capacity(side.pow(d as u32));
    for flat in 0..side.pow(d as u32) {
        let block: Vec<i32> = (0..d)
            .map(|k| ((flat / side.pow(k as u32)) % side) as i32 - g as i32)
            .collect();
        let center: Vec<i64> = block.iter().map(|&i| i as i64 * period).collect();
        let inside = center.iter().all(|&c| c.abs() + m <= n);
        if !inside {
            blocks.push(BlockReport {
                block,
                class: BlockClass::Unclassifiable,
                crossing: None,
                edge_event: None,
                crossing_cluster: None,
                long_paths_attached: None,
                sub_boxes_crossed: None,
            });
            continue;
        }
        let enlarged = LocalBox::new(config, &center, m as usize);
        let r = enlarged.crossing_event(scale / 10 + 1);
        let s = edge_event(config, &center, scale);
        let crossing = r.0 && r.1 && r.2;
        blocks.push(BlockReport {
            block,
            class: if crossing && s { BlockClass::Good } else { BlockClass::Bad },
            crossing: Some(crossing),
            edge_event: Some(s),
            crossing_cluster: Some(r.0),
            long_paths_attached: Some(r.1),
            sub_boxes_crossed: Some(r.2),
        });
    }
    Ok(RenormalizedField { scale, enlarged_radius: m as usize, blocks })
}

/// Some edge `(c + k e_1, c + (k+1) e_1)`, `k = 0..=⌊√N⌋`, is open.
fn edge_event(config: &BondConfiguration, center: &[i64], scale: usize) -> bool {
    let spec = config.spec();
    let mut point: Vec<i32> = center.iter().map(|&c| c as i32).collect();
    let base = point[0];
    (0..=scale.isqrt() as i32).any(|k| {
        point[0] = base + k;
        let idx = spec.index_of(&point).expect("edge row lies inside B'_i");
        config.is_open(idx, 0)
    })
}

/// Open edges induced on a cube of radius `m`, in local coordinates.
struct LocalBox {
    d: usize,
    side: usize,
    /// `open[v * d + k]`: edge from `v` to `v + e_k` is open and inside.
    open: Vec<bool>,
}

impl LocalBox {
    fn new(config: &BondConfiguration, center: &[i64], m: usize) -> Self {
        let spec = config.spec();
        let d = spec.dim();
        let side = 2 * m + 1;
        let volume = side.pow(d as u32);
        let mut open = vec![false; volume * d];
        let mut point = vec![0i32; d];
        for v in 0..volume {
            for k in 0..d {
                point[k] = ((v / side.pow(k as u32)) % side) as i32 - m as i32 + center[k] as i32;
            }
            let idx = spec.index_of(&point).expect("enlarged block lies inside the box");
            for k in 0..d {
                let local = (v / side.pow(k as u32)) % side;
                open[v * d + k] = local + 1 < side && config.is_open(idx, k);
            }
        }
        Self { d, side, open }
    }

    fn volume(&self) -> usize {
        self.side.pow(self.d as u32)
    }

    fn coord(&self, v: usize, k: usize) -> usize {
        (v / self.side.pow(k as u32)) % self.side
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.d).flat_map(move |k| {
            let stride = self.side.pow(k as u32);
            let up = self.open[v * self.d + k].then(|| v + stride);
            let down = (self.coord(v, k) > 0 && self.open[(v - stride) * self.d + k]).then(|| v - stride);
            up.into_iter().chain(down)
        })
    }

    /// Component label per vertex.
    fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.volume()];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..self.volume() {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for u in self.neighbors(v) {
                    if label[u] == usize::MAX {
                        label[u] = count;
                        stack.push(u);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    /// Bitmask of faces touched: bit `2k` for the low face of axis `k`,
    /// bit `2k+1` for the high face, relative to the cube `[lo, hi]^d`.
    fn face_bits(&self, v: usize, lo: &[usize], hi: &[usize]) -> u32 {
        let mut bits = 0;
        for k in 0..self.d {
            let x = self.coord(v, k);
            if x == lo[k] {
                bits |= 1 << (2 * k);
            }
            if x == hi[k] {
                bits |= 1 << (2 * k + 1);
            }
        }
        bits
    }

    /// The three clauses of `R^N`: unique crossing component, long paths
    /// attached, every sub-box of radius `≥ min_radius` crossed.
    fn crossing_event(&self, min_radius: usize) -> (bool, bool, bool) {
        let (label, count) = self.components();
        let full = (1u32 << (2 * self.d)) - 1;
        let lo = vec![0; self.d];
        let hi = vec![self.side - 1; self.d];
        let mut masks = vec![0u32; count];
        let mut sizes = vec![0usize; count];
        for v in 0..self.volume() {
            masks[label[v]] |= self.face_bits(v, &lo, &hi);
            sizes[label[v]] += 1;
        }
        let crossing: Vec<usize> = (0..count).filter(|&c| masks[c] == full).collect();
        if crossing.len() != 1 {
            return (false, false, false);
        }
        let k = crossing[0];
        let attached = (0..count)
            .filter(|&c| c != k && sizes[c] > min_radius)
            .all(|c| !self.has_path_of_length(&label, c, min_radius));
        let in_k: Vec<bool> = label.iter().map(|&c| c == k).collect();
        let crossed = self.crosses_sub_boxes(&in_k, min_radius);
        (true, attached, crossed)
    }

    /// Whether component `comp` contains a simple path with `len` edges.
    fn has_path_of_length(&self, label: &[usize], comp: usize, len: usize) -> bool {
        let mut on_path = vec![false; self.volume()];
        (0..self.volume())
            .filter(|&v| label[v] == comp)
            .any(|v| self.extend_path(v, len, &mut on_path))
    }

    fn extend_path(&self, v: usize, remaining: usize, on_path: &mut [bool]) -> bool {
        if remaining == 0 {
            return true;
        }
        on_path[v] = true;
        let found = self
            .neighbors(v)
            .collect::<Vec<_>>()
            .into_iter()
            .any(|u| !on_path[u] && self.extend_path(u, remaining - 1, on_path));
        on_path[v] = false;
        found
    }

    fn crosses_sub_boxes(&self, in_k: &[bool], min_radius: usize) -> bool {
        let m = (self.side - 1) / 2;
        let mut seen = vec![false; self.volume()];
        let mut stack = Vec::new();
        for s in min_radius..=m {
            let positions = self.side - 2 * s;
            for corner in 0..positions.pow(self.d as u32) {
                let lo: Vec<usize> = (0..self.d)
                    .map(|k| (corner / positions.pow(k as u32)) % positions)
                    .collect();
                let hi: Vec<usize> = lo.iter().map(|&x| x + 2 * s).collect();
                if !self.crosses(in_k, &lo, &hi, &mut seen, &mut stack) {
                    return false;
                }
            }
        }
        true
    }

    /// For every axis, some component of `K ∩ [lo, hi]^d` meets both faces.
    fn crosses(
        &self,
        in_k: &[bool],
        lo: &[usize],
        hi: &[usize],
        seen: &mut [bool],
        stack: &mut Vec<usize>,
    ) -> bool {
        let inside = |v: usize| (0..self.d).all(|k| (lo[k]..=hi[k]).contains(&self.coord(v, k)));
        let members: Vec<usize> = self.cube_vertices(lo, hi).filter(|&v| in_k[v]).collect();
        let mut crossed = 0u32;
        for &s in &members {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            stack.push(s);
            let mut mask = 0u32;
            while let Some(v) = stack.pop() {
                mask |= self.face_bits(v, lo, hi);
                for u in self.neighbors(v) {
                    if in_k[u] && !seen[u] && inside(u) {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            for k in 0..self.d {
                if (mask >> (2 * k)) & 3 == 3 {
                    crossed |= 1 << k;
                }
            }
        }
        for &v in &members {
            seen[v] = false;
        }
        crossed == (1 << self.d) - 1
    }

    fn cube_vertices<'a>(&'a self, lo: &'a [usize], hi: &'a [usize]) -> impl Iterator<Item = usize> + 'a {
        let width = hi[0] - lo[0] + 1;
        let count = width.pow(self.d as u32);
        (0..count).map(move |flat| {
            (0..self.d)
                .map(|k| (lo[k] + (flat / width.pow(k as u32)) % width) * self.side.pow(k as u32))
                .sum()
        })
    }
}
