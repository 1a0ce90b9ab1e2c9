//! Flat-torus discretisation parameters.

use crate::error::{GcError, Result};

/// A flat complex torus `C^n / (Z^n + i Z^n)` sampled on a uniform grid.
///
/// Real coordinates are ordered `(x^1, y^1, ..., x^n, y^n)` with
/// `z^a = x^a + i y^a`; every real axis carries `grid_points` samples and
/// Fourier modes `k` with `|k_d| <= truncation` are stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGeometry {
    /// Complex dimension (1 or 2 supported).
    pub n: usize,
    /// Grid points per real axis (power of two).
    pub grid_points: usize,
    /// Frequency truncation radius per axis.
    pub truncation: usize,
}

impl TorusGeometry {
    pub fn new(n: usize, grid_points: usize, truncation: usize) -> Result<Self> {
        if n == 0 || n > 2 {
            return Err(GcError::InvalidGeometry(format!(
                "complex dimension {n} unsupported (need 1 or 2)"
            )));
        }
        if grid_points < 4 || !grid_points.is_power_of_two() {
            return Err(GcError::InvalidGeometry(format!(
                "grid_points {grid_points} must be a power of two >= 4"
            )));
        }
        if truncation == 0 {
            return Err(GcError::InvalidGeometry("truncation must be >= 1".into()));
        }
        // Headroom for alias-free quadratic products.
        if 3 * truncation > grid_points {
            return Err(GcError::InvalidGeometry(format!(
                "truncation {truncation} exceeds grid_points/3 = {}",
                grid_points / 3
            )));
        }
        Ok(Self { n, grid_points, truncation })
    }

    /// Number of real axes.
    pub fn axes(&self) -> usize {
        2 * self.n
    }

    /// Total number of grid points.
    pub fn grid_len(&self) -> usize {
        self.grid_points.pow(self.axes() as u32)
    }

    /// Points of the stored coefficient box per axis (`2K + 1`).
    pub fn box_side(&self) -> usize {
        2 * self.truncation + 1
    }

    /// Total number of stored coefficients per component.
    pub fn box_len(&self) -> usize {
        self.box_side().pow(self.axes() as u32)
    }

    /// Iterate over the stored frequency box in storage order.
    pub fn box_freqs(&self) -> FreqIter {
        FreqIter {
            side: self.box_side() as i64,
            trunc: self.truncation as i64,
            axes: self.axes(),
            idx: 0,
            len: self.box_len(),
        }
    }

    /// Storage offset of frequency `k` inside the coefficient box.
    pub fn box_offset(&self, k: &[i64]) -> usize {
        let side = self.box_side();
        let t = self.truncation as i64;
        let mut off = 0usize;
        for &kd in k {
            debug_assert!(kd.abs() <= t);
            off = off * side + (kd + t) as usize;
        }
        off
    }

    /// Real coordinates of the grid node with multi-index `idx`.
    pub fn grid_point(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().map(|&i| i as f64 / self.grid_points as f64).collect()
    }
}

/// Iterator over the frequencies of the stored box, in storage order.
pub struct FreqIter {
    side: i64,
    trunc: i64,
    axes: usize,
    idx: usize,
    len: usize,
}

impl Iterator for FreqIter {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.idx >= self.len {
            return None;
        }
        let mut rem = self.idx as i64;
        let mut k = vec![0i64; self.axes];
        for d in (0..self.axes).rev() {
            k[d] = rem % self.side - self.trunc;
            rem /= self.side;
        }
        self.idx += 1;
        Some(k)
    }
}
