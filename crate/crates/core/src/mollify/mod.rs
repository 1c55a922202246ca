//! Smoothing kernel `ψ_α` and numerical checks of the smoothing lemma:
//! `‖f − f∗ψ_α‖_{L^p} ≤ C α^{1−σ}‖∇f‖_{L²}` and the Young-type bound for
//! `‖f∗ψ_α‖_{L^p}` in terms of `‖f‖_{W^{−s,q}}`.

mod kernel;
mod verify;

use std::collections::HashMap;

pub use kernel::{bump, normalization, BumpTransform, MollifierKernel, RHO_CUTOFF};
pub use verify::{
    approx_exponent, verify_approx_inequality, verify_young_inequality, young_exponent, young_exponent_stated,
    Backend, InequalityReport, InequalityRow, VerifyConfig,
};

use crate::error::Result;
use crate::field::{Grid, ScalarField, Spectrum, VectorField, VectorSpectrum};

/// Periodic convolution with `ψ_α` on a torus grid, applied spectrally.
#[derive(Debug, Clone)]
pub struct TorusMollifier {
    kernel: MollifierKernel,
    grid: Grid,
    symbol: Vec<f64>,
}

impl TorusMollifier {
    pub fn new(grid: Grid, alpha: f64) -> Result<Self> {
        let kernel = MollifierKernel::new(alpha, grid.dim())?;
        let kmax = (grid.dim() as f64).sqrt() * grid.n() as f64 / 2.0;
        let transform = BumpTransform::new(grid.dim(), alpha * kmax);
        let mut cache: HashMap<i64, f64> = HashMap::new();
        let symbol = (0..grid.len())
            .map(|idx| {
                let k2 = grid.mode_norm_sq(idx);
                *cache.entry(k2).or_insert_with(|| transform.eval(alpha * (k2 as f64).sqrt()))
            })
            .collect();
        Ok(Self { kernel, grid, symbol })
    }

    pub fn kernel(&self) -> MollifierKernel {
        self.kernel
    }

    /// True when the kernel support is narrower than two grid spacings.
    pub fn under_resolved(&self) -> bool {
        self.kernel.alpha() < 2.0 * self.grid.spacing()
    }

    /// Multiplier `ψ̂_α(k)` at flat mode `idx`.
    pub fn symbol(&self, idx: usize) -> f64 {
        self.symbol[idx]
    }

    pub fn apply_spectrum(&self, f: &Spectrum) -> Result<Spectrum> {
        self.grid.check_same(&f.grid())?;
        let mut out = f.clone();
        for (c, s) in out.coeffs_mut().iter_mut().zip(&self.symbol) {
            *c *= *s;
        }
        Ok(out)
    }

    pub fn apply_vector_spectrum(&self, v: &VectorSpectrum) -> Result<VectorSpectrum> {
        VectorSpectrum::from_components(
            v.components().iter().map(|c| self.apply_spectrum(c)).collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn apply(&self, f: &ScalarField) -> Result<ScalarField> {
        Ok(self.apply_spectrum(&f.transform())?.inverse())
    }

    pub fn apply_vector(&self, v: &VectorField) -> Result<VectorField> {
        Ok(self.apply_vector_spectrum(&v.transform())?.inverse())
    }
}

/// Result of [`mollify`]; `under_resolved` flags `α < 2·spacing`.
#[derive(Debug, Clone)]
pub struct Mollified {
    pub field: ScalarField,
    pub under_resolved: bool,
}

pub fn mollify(f: &ScalarField, alpha: f64) -> Result<Mollified> {
    let m = TorusMollifier::new(f.grid(), alpha)?;
    Ok(Mollified {
        field: m.apply(f)?,
        under_resolved: m.under_resolved(),
    })
}

#[cfg(test)]
mod tests;
