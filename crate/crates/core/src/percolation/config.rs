use rand::Rng;
use thiserror::Error;

use super::lattice::LatticeSpec;
use crate::rng::stream_rng;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("open probability must lie in (0, 1], got {0}")]
    InvalidProbability(f64),
}

/// A sampled bond configuration `ω` on the edges of `B_n^g`.
///
/// Edge `(x, x + e_a)` is stored at slot `index(x) * d + a`; slots whose
/// endpoint would leave the box are always closed.
#[derive(Clone, Debug, PartialEq)]
pub struct BondConfiguration {
    spec: LatticeSpec,
    p: f64,
    seed: u64,
    open: Vec<bool>,
}

impl BondConfiguration {
    /// Samples each edge open independently with probability `p`.
    ///
    /// The uniform draw of edge `e` is the first `f64` of ChaCha8 stream
    /// `edge_key(e)` under `seed`, so boxes of different radius sampled with
    /// the same seed agree on their common edges.
    pub fn sample(spec: LatticeSpec, p: f64, seed: u64) -> Result<Self, ConfigError> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(ConfigError::InvalidProbability(p));
        }
        let mut config = Self::closed(spec);
        config.p = p;
        config.seed = seed;
        let d = spec.dim();
        for idx in 0..spec.volume() {
            let point = spec.point_of(idx);
            for axis in 0..d {
                if point[axis] < spec.radius() as i32 {
                    let u: f64 = stream_rng(seed, spec.edge_key(&point, axis)).random();
                    config.open[idx * d + axis] = u < p;
                }
            }
        }
        Ok(config)
    }

    /// All edges closed (the `p = 0` configuration, which `sample` rejects).
    pub fn closed(spec: LatticeSpec) -> Self {
        Self { spec, p: 0.0, seed: 0, open: vec![false; spec.volume() * spec.dim()] }
    }

    /// All edges of the box open.
    pub fn full(spec: LatticeSpec) -> Self {
        let mut config = Self::closed(spec);
        config.p = 1.0;
        for idx in 0..spec.volume() {
            for axis in 0..spec.dim() {
                if spec.coordinate(idx, axis) < spec.radius() as i32 {
                    config.open[idx * spec.dim() + axis] = true;
                }
            }
        }
        config
    }

    pub fn spec(&self) -> LatticeSpec {
        self.spec
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Status of the edge from box vertex `idx` to `idx + e_axis`.
    pub fn is_open(&self, idx: usize, axis: usize) -> bool {
        self.open[idx * self.spec.dim() + axis]
    }

    /// Opens or closes the edge from `idx` along `+e_axis`.
    ///
    /// Panics if the edge leaves the box.
    pub fn set_open(&mut self, idx: usize, axis: usize, open: bool) {
        assert!(
            self.spec.coordinate(idx, axis) < self.spec.radius() as i32,
            "edge leaves the box"
        );
        self.open[idx * self.spec.dim() + axis] = open;
    }

    pub fn open_edge_count(&self) -> usize {
        self.open.iter().filter(|&&o| o).count()
    }

    /// Open neighbours of box vertex `idx`.
    pub fn open_neighbors(&self, idx: usize) -> impl Iterator<Item = usize> + '_ {
        let spec = self.spec;
        let n = spec.radius() as i32;
        (0..spec.dim()).flat_map(move |axis| {
            let x = spec.coordinate(idx, axis);
            let stride = spec.stride(axis);
            let up = (x < n && self.is_open(idx, axis)).then(|| idx + stride);
            let down = (x > -n && self.is_open(idx - stride, axis)).then(|| idx - stride);
            up.into_iter().chain(down)
        })
    }

    pub fn open_degree(&self, idx: usize) -> usize {
        self.open_neighbors(idx).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_one_opens_every_edge() {
        let spec = LatticeSpec::new(2, 3).unwrap();
        let c = BondConfiguration::sample(spec, 1.0, 99).unwrap();
        assert_eq!(c.open_edge_count(), spec.edge_count());
        assert_eq!(c, BondConfiguration { seed: 99, ..BondConfiguration::full(spec) });
    }

    #[test]
    fn rejects_bad_probability() {
        let spec = LatticeSpec::new(2, 3).unwrap();
        assert_eq!(
            BondConfiguration::sample(spec, -1.0, 0),
            Err(ConfigError::InvalidProbability(-1.0))
        );
        assert!(BondConfiguration::sample(spec, 0.0, 0).is_err());
        assert!(BondConfiguration::sample(spec, 1.5, 0).is_err());
        assert!(BondConfiguration::sample(spec, f64::NAN, 0).is_err());
    }

    #[test]
    fn resampling_is_bit_identical() {
        let spec = LatticeSpec::new(3, 4).unwrap();
        let a = BondConfiguration::sample(spec, 0.4, 11).unwrap();
        let b = BondConfiguration::sample(spec, 0.4, 11).unwrap();
        assert_eq!(a, b);
        let c = BondConfiguration::sample(spec, 0.4, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn open_fraction_concentrates() {
        let spec = LatticeSpec::new(2, 20).unwrap();
        let c = BondConfiguration::sample(spec, 0.7, 42).unwrap();
        let m = spec.edge_count() as f64;
        let sd = (m * 0.7 * 0.3).sqrt();
        let open = c.open_edge_count() as f64;
        assert!((open - 0.7 * m).abs() < 3.0 * sd, "open {open} of {m}");
    }

    #[test]
    fn nested_boxes_share_edges() {
        let small = LatticeSpec::new(2, 3).unwrap();
        let big = LatticeSpec::new(2, 6).unwrap();
        let a = BondConfiguration::sample(small, 0.5, 8).unwrap();
        let b = BondConfiguration::sample(big, 0.5, 8).unwrap();
        for idx in 0..small.volume() {
            let p = small.point_of(idx);
            let jdx = big.index_of(&p).unwrap();
            for axis in 0..2 {
                if p[axis] < 3 {
                    assert_eq!(a.is_open(idx, axis), b.is_open(jdx, axis));
                }
            }
        }
    }

    #[test]
    fn neighbors_are_symmetric() {
        let spec = LatticeSpec::new(2, 4).unwrap();
        let c = BondConfiguration::sample(spec, 0.6, 1).unwrap();
        for v in 0..spec.volume() {
            for u in c.open_neighbors(v) {
                assert!(c.open_neighbors(u).any(|w| w == v));
            }
        }
    }
}
