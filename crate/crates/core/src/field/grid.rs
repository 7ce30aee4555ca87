use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on [−L, L) with `n` samples.
///
/// Spectral index `j` (FFT order) carries the signed wavenumber `k(j)` and
/// frequency ξ = πk/L. The Nyquist index `n/2` is its own mirror.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub half_length: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(half_length: f64, n: usize) -> Result<Self> {
        if !(half_length > 0.0 && half_length.is_finite()) {
            return Err(Error::config(format!(
                "half_length must be positive, got {half_length}"
            )));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::config(format!(
                "n must be a power of two >= 4, got {n}"
            )));
        }
        Ok(Grid { half_length, n })
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.n as f64
    }

    #[inline]
    pub fn dxi(&self) -> f64 {
        PI / self.half_length
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.dx()
    }

    /// Signed wavenumber of FFT index `j`; the Nyquist index maps to −n/2.
    #[inline]
    pub fn k(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    #[inline]
    pub fn xi(&self, j: usize) -> f64 {
        // ξ(−k) = −ξ(k) exactly: the product is computed on |k| then signed.
        let k = self.k(j);
        let m = PI * (k.unsigned_abs() as f64) / self.half_length;
        if k < 0 {
            -m
        } else {
            m
        }
    }

    /// Index holding −ξ_j.
    #[inline]
    pub fn mirror(&self, j: usize) -> usize {
        (self.n - j) % self.n
    }

    #[inline]
    pub fn nyquist(&self) -> usize {
        self.n / 2
    }

    pub fn xi_max(&self) -> f64 {
        PI * (self.n / 2) as f64 / self.half_length
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub fn xis(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.xi(j)).collect()
    }

    /// Index of the grid point x = 0.
    pub fn origin(&self) -> usize {
        self.n / 2
    }

    /// Spectral indices with ξ² ≤ 1 (ties included up to rounding).
    pub fn lowfreq_indices(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&j| {
                let xi = self.xi(j);
                xi * xi <= 1.0 + 1e-12
            })
            .collect()
    }

    /// Representative index for each ±ξ pair with ξ > 0, excluding Nyquist.
    pub fn positive_indices(&self) -> impl Iterator<Item = usize> {
        1..self.n / 2
    }

    pub fn refined(&self) -> Grid {
        Grid {
            half_length: self.half_length,
            n: 2 * self.n,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_is_exact() {
        let g = Grid::new(37.3, 256).unwrap();
        for j in 1..g.n {
            let m = g.mirror(j);
            if j != g.nyquist() {
                assert_eq!(g.xi(m), -g.xi(j));
            }
            assert_eq!(g.mirror(m), j);
        }
        assert_eq!(g.mirror(0), 0);
        assert_eq!(g.mirror(g.nyquist()), g.nyquist());
        assert!((g.dx() * g.n as f64 - 2.0 * g.half_length).abs() < 1e-12);
        assert_eq!(g.x(g.origin()), 0.0);
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(Grid::new(10.0, 100).is_err());
        assert!(Grid::new(-1.0, 64).is_err());
    }

    #[test]
    fn lowfreq_set_includes_tie() {
        // L = π·8 puts ξ = 1 exactly on the grid at k = 8.
        let g = Grid::new(PI * 8.0, 64).unwrap();
        let low = g.lowfreq_indices();
        assert_eq!(low.len(), 17);
        let small = Grid::new(1.0, 8).unwrap();
        assert_eq!(small.lowfreq_indices(), vec![0]);
    }
}
