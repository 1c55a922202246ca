use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{AcnsError, Result};

/// Uniform discretization of the periodic box `[0, 2π)^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    n: usize,
}

impl Grid {
    pub const LENGTH: f64 = 2.0 * PI;

    pub fn new(dim: usize, n: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(AcnsError::InvalidGrid(format!("dim must be 2 or 3, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(AcnsError::InvalidGrid(format!(
                "n must be a power of two >= 8, got {n}"
            )));
        }
        Ok(Self { dim, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of grid points, `n^dim`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        Self::LENGTH
    }

    pub fn spacing(&self) -> f64 {
        Self::LENGTH / self.n as f64
    }

    /// Quadrature weight of a single grid point.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        Self::LENGTH.powi(self.dim as i32)
    }

    /// Signed integer wavenumber of FFT index `i` along one axis.
    /// The Nyquist index `n/2` maps to `+n/2`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Wavenumber used by first-derivative symbols: the Nyquist mode has no
    /// real odd counterpart, so its first derivative is set to zero.
    pub fn derivative_wavenumber(&self, i: usize) -> f64 {
        if i == self.n / 2 {
            0.0
        } else {
            self.wavenumber(i) as f64
        }
    }

    /// Per-axis indices of a flat row-major index (axis 0 slowest).
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        match self.dim {
            2 => [idx / n, idx % n, 0],
            _ => [idx / (n * n), (idx / n) % n, idx % n],
        }
    }

    pub fn ravel(&self, ix: [usize; 3]) -> usize {
        let n = self.n;
        match self.dim {
            2 => ix[0] * n + ix[1],
            _ => (ix[0] * n + ix[1]) * n + ix[2],
        }
    }

    /// Integer wavevector of flat spectral index `idx`; unused axes are zero.
    pub fn mode(&self, idx: usize) -> [i64; 3] {
        let ix = self.unravel(idx);
        let mut k = [0i64; 3];
        for a in 0..self.dim {
            k[a] = self.wavenumber(ix[a]);
        }
        k
    }

    /// Derivative wavevector (Nyquist components zeroed) of flat index `idx`.
    pub fn derivative_mode(&self, idx: usize) -> [f64; 3] {
        let ix = self.unravel(idx);
        let mut k = [0.0; 3];
        for a in 0..self.dim {
            k[a] = self.derivative_wavenumber(ix[a]);
        }
        k
    }

    pub fn mode_norm_sq(&self, idx: usize) -> i64 {
        let k = self.mode(idx);
        k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
    }

    /// Physical coordinates of grid point `idx`; unused axes are zero.
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let ix = self.unravel(idx);
        let h = self.spacing();
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = ix[a] as f64 * h;
        }
        x
    }

    /// True when mode `idx` survives the 2/3-rule truncation (`3|k_j| < n` on every axis).
    pub fn is_resolved(&self, idx: usize) -> bool {
        let k = self.mode(idx);
        k.iter().all(|kj| 3 * kj.unsigned_abs() < self.n as u64)
    }

    pub(crate) fn check_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(AcnsError::GridMismatch {
                expected_dim: self.dim,
                expected_n: self.n,
                found_dim: other.dim,
                found_n: other.n,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(Grid::new(1, 16).is_err());
        assert!(Grid::new(2, 4).is_err());
        assert!(Grid::new(3, 24).is_err());
        assert!(Grid::new(2, 8).is_ok());
    }

    #[test]
    fn spacing_times_n_is_length() {
        for n in [8, 16, 32, 64, 128, 256] {
            let g = Grid::new(2, n).unwrap();
            assert_eq!(g.spacing() * n as f64, Grid::LENGTH);
        }
    }

    #[test]
    fn ravel_roundtrip() {
        let g = Grid::new(3, 8).unwrap();
        for idx in 0..g.len() {
            assert_eq!(g.ravel(g.unravel(idx)), idx);
        }
    }

    #[test]
    fn wavenumbers_follow_fft_order() {
        let g = Grid::new(2, 8).unwrap();
        let ks: Vec<i64> = (0..8).map(|i| g.wavenumber(i)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        assert_eq!(g.derivative_wavenumber(4), 0.0);
    }
}
