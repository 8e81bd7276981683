use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Largest grid we are willing to allocate (points, not bytes).
pub const MAX_POINTS: usize = 1 << 24;

/// Uniform grid on `[0, 2π)^n` with `M` points per axis.
///
/// Point and frequency arrays share one flat layout: axis 0 is slowest. Along
/// an axis, index `j` sits at `x = 2πj/M` and carries frequency `j` for
/// `j < M/2`, `j − M` otherwise, so frequencies cover `[−M/2, M/2)`. The
/// Nyquist value `−M/2` has no partner under negation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    n: usize,
    m: usize,
}

impl TorusGrid {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(LabError::InvalidArgument("grid dimension must be at least 1".into()));
        }
        if m < 4 || m % 2 != 0 {
            return Err(LabError::InvalidArgument(format!(
                "points per axis must be even and at least 4, got {m}"
            )));
        }
        let total = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(m).filter(|&t| t <= MAX_POINTS));
        if total.is_none() {
            return Err(LabError::InvalidArgument(format!(
                "grid {m}^{n} exceeds {MAX_POINTS} points"
            )));
        }
        Ok(TorusGrid { n, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points_per_axis(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.m as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.n as i32)
    }

    /// Total volume `(2π)^n`.
    pub fn volume(&self) -> f64 {
        (2.0 * std::f64::consts::PI).powi(self.n as i32)
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.n];
        let mut rest = flat;
        for a in (0..self.n).rev() {
            out[a] = rest % self.m;
            rest /= self.m;
        }
        out
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &j| acc * self.m + j)
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        let h = self.spacing();
        self.multi_index(flat).into_iter().map(|j| j as f64 * h).collect()
    }

    pub fn axis_frequency(&self, j: usize) -> i64 {
        if j < self.m / 2 {
            j as i64
        } else {
            j as i64 - self.m as i64
        }
    }

    pub fn frequency(&self, flat: usize) -> Vec<i64> {
        self.multi_index(flat).into_iter().map(|j| self.axis_frequency(j)).collect()
    }

    pub fn frequency_f64(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .into_iter()
            .map(|j| self.axis_frequency(j) as f64)
            .collect()
    }

    /// Flat index of an integer frequency, if it lies in `[−M/2, M/2)^n`.
    pub fn frequency_index(&self, xi: &[i64]) -> Option<usize> {
        if xi.len() != self.n {
            return None;
        }
        let half = (self.m / 2) as i64;
        let mut idx = Vec::with_capacity(self.n);
        for &x in xi {
            if x < -half || x >= half {
                return None;
            }
            idx.push(if x >= 0 { x as usize } else { (x + self.m as i64) as usize });
        }
        Some(self.flat_index(&idx))
    }

    pub fn is_nyquist(&self, xi: &[i64]) -> bool {
        let half = (self.m / 2) as i64;
        xi.iter().any(|&x| x == -half)
    }

    /// Nonzero, non-Nyquist frequencies with the first nonzero component
    /// positive: one representative of every conjugate pair `±ξ`, in flat
    /// index order.
    pub fn half_space_frequencies(&self) -> Vec<Vec<i64>> {
        (0..self.len())
            .map(|i| self.frequency(i))
            .filter(|xi| !self.is_nyquist(xi))
            .filter(|xi| xi.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(TorusGrid::new(3, 6).is_ok());
        assert!(TorusGrid::new(3, 5).is_err());
        assert!(TorusGrid::new(3, 2).is_err());
        assert!(TorusGrid::new(0, 8).is_err());
        assert!(TorusGrid::new(9, 64).is_err());
    }

    #[test]
    fn index_round_trip() {
        let g = TorusGrid::new(3, 8).unwrap();
        for flat in [0, 1, 7, 8, 63, 64, 511] {
            assert_eq!(g.flat_index(&g.multi_index(flat)), flat);
            let xi = g.frequency(flat);
            assert_eq!(g.frequency_index(&xi), Some(flat));
        }
        assert_eq!(g.frequency(7), vec![0, 0, -1]);
        assert_eq!(g.frequency(4), vec![0, 0, -4]);
        assert!(g.is_nyquist(&g.frequency(4)));
        assert_eq!(g.frequency_index(&[4, 0, 0]), None);
    }

    #[test]
    fn half_space_counts() {
        // (M−1)^n − 1 non-Nyquist nonzero frequencies, split into ± pairs.
        for (n, m) in [(1, 8), (2, 6), (3, 8)] {
            let g = TorusGrid::new(n, m).unwrap();
            let half = g.half_space_frequencies();
            assert_eq!(half.len(), ((m - 1).pow(n as u32) - 1) / 2);
            for xi in &half {
                let neg: Vec<i64> = xi.iter().map(|x| -x).collect();
                assert!(!half.contains(&neg));
            }
        }
    }
}
