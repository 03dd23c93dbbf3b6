use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LatticeError {
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("dimension {0} is not supported (edge keys pack at most 15 axes)")]
    DimensionTooLarge(usize),
    #[error("box radius {n} exceeds the edge-key limit {limit} for d = {d}")]
    RadiusTooLarge { d: usize, n: usize, limit: usize },
    #[error("box [-{n},{n}]^{d} has too many vertices")]
    BoxTooLarge { d: usize, n: usize },
}

/// The box `B_n = [-n, n]^d` of `Z^d` with its nearest-neighbour edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeSpec {
    d: usize,
    n: usize,
}

impl LatticeSpec {
    pub fn new(d: usize, n: usize) -> Result<Self, LatticeError> {
        if d < 2 {
            return Err(LatticeError::DimensionTooSmall(d));
        }
        if d > 15 {
            return Err(LatticeError::DimensionTooLarge(d));
        }
        let limit = Self::radius_limit(d);
        if n > limit {
            return Err(LatticeError::RadiusTooLarge { d, n, limit });
        }
        let side = 2 * n as u128 + 1;
        if side.checked_pow(d as u32).is_none_or(|v| v > (1u128 << 34)) {
            return Err(LatticeError::BoxTooLarge { d, n });
        }
        Ok(Self { d, n })
    }

    fn key_bits(d: usize) -> usize {
        60 / d
    }

    fn radius_limit(d: usize) -> usize {
        (1usize << (Self::key_bits(d) - 1)) - 1
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn radius(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> usize {
        2 * self.n + 1
    }

    /// `|B_n| = (2n+1)^d`.
    pub fn volume(&self) -> usize {
        self.side().pow(self.d as u32)
    }

    /// Number of edges of `B_n^g`: `d (2n)(2n+1)^{d-1}`.
    pub fn edge_count(&self) -> usize {
        self.d * 2 * self.n * self.side().pow(self.d as u32 - 1)
    }

    /// Box index of a point; the last coordinate is the most significant.
    pub fn index_of(&self, point: &[i32]) -> Option<usize> {
        debug_assert_eq!(point.len(), self.d);
        let n = self.n as i64;
        let side = self.side();
        let mut idx = 0usize;
        for &x in point.iter().rev() {
            let x = x as i64;
            if x < -n || x > n {
                return None;
            }
            idx = idx * side + (x + n) as usize;
        }
        Some(idx)
    }

    pub fn point_of(&self, mut idx: usize) -> Vec<i32> {
        let side = self.side();
        let n = self.n as i32;
        let mut point = Vec::with_capacity(self.d);
        for _ in 0..self.d {
            point.push((idx % side) as i32 - n);
            idx /= side;
        }
        point
    }

    pub fn origin_index(&self) -> usize {
        self.index_of(&vec![0; self.d]).expect("origin lies in every box")
    }

    /// Index stride of a unit step along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.side().pow(axis as u32)
    }

    /// Coordinate `axis` of the point with box index `idx`.
    pub fn coordinate(&self, idx: usize, axis: usize) -> i32 {
        ((idx / self.stride(axis)) % self.side()) as i32 - self.n as i32
    }

    /// Canonical key of the edge from `point` to `point + e_axis`.
    ///
    /// Coordinates are offset into `60/d`-bit unsigned fields, so the key is
    /// injective over every supported box and independent of `n`.
    pub fn edge_key(&self, point: &[i32], axis: usize) -> u64 {
        let bits = Self::key_bits(self.d);
        let offset = 1i64 << (bits - 1);
        let mut packed: u64 = 0;
        for (i, &x) in point.iter().enumerate() {
            packed |= ((x as i64 + offset) as u64) << (bits * i);
        }
        packed * self.d as u64 + axis as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_dimension() {
        assert_eq!(LatticeSpec::new(1, 3), Err(LatticeError::DimensionTooSmall(1)));
    }

    #[test]
    fn volume_and_edges() {
        let s = LatticeSpec::new(2, 3).unwrap();
        assert_eq!(s.volume(), 49);
        assert_eq!(s.edge_count(), 2 * 6 * 7);
        let s = LatticeSpec::new(3, 1).unwrap();
        assert_eq!(s.volume(), 27);
        assert_eq!(s.edge_count(), 3 * 2 * 9);
    }

    #[test]
    fn index_round_trip() {
        let s = LatticeSpec::new(3, 2).unwrap();
        for idx in 0..s.volume() {
            let p = s.point_of(idx);
            assert_eq!(s.index_of(&p), Some(idx));
            for axis in 0..3 {
                assert_eq!(s.coordinate(idx, axis), p[axis]);
            }
        }
        assert_eq!(s.index_of(&[3, 0, 0]), None);
    }

    #[test]
    fn edge_keys_do_not_depend_on_box() {
        let small = LatticeSpec::new(2, 2).unwrap();
        let big = LatticeSpec::new(2, 40).unwrap();
        assert_eq!(small.edge_key(&[-1, 2], 1), big.edge_key(&[-1, 2], 1));
        assert_ne!(small.edge_key(&[-1, 2], 0), small.edge_key(&[-1, 2], 1));
        assert_ne!(small.edge_key(&[2, -1], 0), small.edge_key(&[-1, 2], 0));
    }
}
