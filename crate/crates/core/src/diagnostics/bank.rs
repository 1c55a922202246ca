//! Fixed bank of smooth space-time test functions for weak convergence.
//!
//! Each member is `χ(t)·cos(k·x)` or `χ(t)·sin(k·x)` (times a unit vector
//! `e_a` for vector pairings) with `1 ≤ |k| ≤ k_max`, `k` in a half space,
//! and `χ(t) = sin⁴(πt/T)`, which vanishes to third order at `t = 0, T`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{AcnsError, Result};
use crate::field::norms::trapezoid;
use crate::field::{Grid, Spectrum, VectorSpectrum};

pub const BANK_K_MAX: i64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Cos,
    Sin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub k: [i64; 3],
    pub phase: Phase,
}

#[derive(Debug, Clone)]
pub struct TestBank {
    grid: Grid,
    horizon: f64,
    members: Vec<TestFunction>,
    indices: Vec<usize>,
}

fn in_half_space(k: [i64; 3]) -> bool {
    k > [0, 0, 0]
}

impl TestBank {
    /// Bank on `grid` for the time window `[0, horizon]`.
    pub fn new(grid: Grid, horizon: f64) -> Result<Self> {
        Self::with_k_max(grid, horizon, BANK_K_MAX)
    }

    pub fn with_k_max(grid: Grid, horizon: f64, k_max: i64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(AcnsError::param(format!("test-bank horizon must be positive, got {horizon}")));
        }
        if 2 * k_max >= grid.n() as i64 {
            return Err(AcnsError::param(format!("k_max = {k_max} is not resolved on n = {}", grid.n())));
        }
        let dim = grid.dim();
        let range = |a: usize| if a < dim { -k_max..=k_max } else { 0..=0 };
        let n = grid.n() as i64;
        let mut members = Vec::new();
        let mut indices = Vec::new();
        for k0 in range(0) {
            for k1 in range(1) {
                for k2 in range(2) {
                    let k = [k0, k1, k2];
                    let norm2 = k0 * k0 + k1 * k1 + k2 * k2;
                    if norm2 == 0 || norm2 > k_max * k_max || !in_half_space(k) {
                        continue;
                    }
                    let ix = [k0.rem_euclid(n) as usize, k1.rem_euclid(n) as usize, k2.rem_euclid(n) as usize];
                    for phase in [Phase::Cos, Phase::Sin] {
                        members.push(TestFunction { k, phase });
                        indices.push(grid.ravel(ix));
                    }
                }
            }
        }
        Ok(Self {
            grid,
            horizon,
            members,
            indices,
        })
    }

    pub fn members(&self) -> &[TestFunction] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn window(&self, t: f64) -> f64 {
        if !(0.0..=self.horizon).contains(&t) {
            return 0.0;
        }
        (PI * t / self.horizon).sin().powi(4)
    }

    /// `⟨f, cos(k·x)⟩` or `⟨f, sin(k·x)⟩` for every member.
    fn spatial_pairings(&self, f: &Spectrum) -> Vec<f64> {
        let volume_factor = self.grid.cell_volume();
        self.members
            .iter()
            .zip(&self.indices)
            .map(|(m, &idx)| {
                let c = f.coeffs()[idx];
                match m.phase {
                    Phase::Cos => c.re * volume_factor,
                    Phase::Sin => -c.im * volume_factor,
                }
            })
            .collect()
    }

    fn check(&self, len: usize, dt: f64) -> Result<()> {
        if len < 2 {
            return Err(AcnsError::InsufficientSamples { needed: 2, got: len });
        }
        if ((len - 1) as f64 * dt - self.horizon).abs() > 1e-9 * self.horizon {
            return Err(AcnsError::param(format!(
                "series of {len} samples at spacing {dt} does not cover the bank horizon {}",
                self.horizon
            )));
        }
        Ok(())
    }

    fn integrate_in_time(&self, per_time: Vec<Vec<f64>>, dt: f64) -> Vec<f64> {
        let count = per_time.first().map_or(0, Vec::len);
        (0..count)
            .map(|j| {
                let values: Vec<f64> = per_time
                    .iter()
                    .enumerate()
                    .map(|(n, row)| self.window(n as f64 * dt) * row[j])
                    .collect();
                trapezoid(&values, dt)
            })
            .collect()
    }

    /// Spatial pairings of one scalar sample, one entry per member.
    pub fn scalar_sample(&self, f: &Spectrum) -> Result<Vec<f64>> {
        self.grid.check_same(&f.grid())?;
        Ok(self.spatial_pairings(f))
    }

    /// Spatial pairings of one vector sample, `dim·len()` entries ordered by component.
    pub fn vector_sample(&self, v: &VectorSpectrum) -> Result<Vec<f64>> {
        self.grid.check_same(&v.grid())?;
        Ok(v.components().iter().flat_map(|c| self.spatial_pairings(c)).collect())
    }

    /// Windowed time integrals of per-sample pairings taken at `t_n = n·dt`.
    pub fn integrate(&self, per_time: Vec<Vec<f64>>, dt: f64) -> Result<Vec<f64>> {
        self.check(per_time.len(), dt)?;
        Ok(self.integrate_in_time(per_time, dt))
    }

    /// `∫₀^T χ(t)⟨f(t), φ_j⟩ dt` for each member `j`, from spectra sampled at
    /// `t_n = n·dt` covering `[0, T]`.
    pub fn scalar_pairings(&self, series: &[Spectrum], dt: f64) -> Result<Vec<f64>> {
        let per_time = series.iter().map(|s| self.scalar_sample(s)).collect::<Result<_>>()?;
        self.integrate(per_time, dt)
    }

    /// Vector version of [`Self::scalar_pairings`].
    pub fn vector_pairings(&self, series: &[VectorSpectrum], dt: f64) -> Result<Vec<f64>> {
        let per_time = series.iter().map(|v| self.vector_sample(v)).collect::<Result<_>>()?;
        self.integrate(per_time, dt)
    }
}

/// Largest absolute pairing.
pub fn max_abs(pairings: &[f64]) -> f64 {
    pairings.iter().fold(0.0, |m, x| m.max(x.abs()))
}
