use num_complex::Complex64;

use super::{fft, Grid};
use crate::error::{AcnsError, Result};

/// Real scalar field sampled on the grid points (row-major, axis 0 slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

/// Fourier coefficients of a real field, unnormalized forward convention.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

/// A `dim`-component real vector field.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    components: Vec<ScalarField>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorSpectrum {
    grid: Grid,
    components: Vec<Spectrum>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(AcnsError::InvalidParameter(format!(
                "expected {} values for grid, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.coords(i))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn transform(&self) -> Spectrum {
        let mut coeffs: Vec<Complex64> = self.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft::forward(&self.grid, &mut coeffs);
        Spectrum {
            grid: self.grid,
            coeffs,
        }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// L² inner product by equal-weight quadrature.
    pub fn inner(&self, other: &ScalarField) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        Ok(s * self.grid.cell_volume())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// `self + factor * other`
    pub fn axpy(&self, factor: f64, other: &ScalarField) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + factor * b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn add(&self, other: &ScalarField) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn mul(&self, other: &ScalarField) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }

    /// Subtract the spatial mean.
    pub fn centered(&self) -> Self {
        let m = self.mean();
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v - m).collect(),
        }
    }
}

impl Spectrum {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(AcnsError::InvalidParameter(format!(
                "expected {} coefficients for grid, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Inverse transform; the (roundoff-level) imaginary residue is dropped.
    pub fn inverse(&self) -> ScalarField {
        let mut data = self.coeffs.clone();
        fft::inverse(&self.grid, &mut data);
        ScalarField {
            grid: self.grid,
            values: data.into_iter().map(|c| c.re).collect(),
        }
    }

    /// L² norm of the represented field via Parseval.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        let n = self.grid.len() as f64;
        (s * self.grid.volume() / (n * n)).sqrt()
    }

    /// L² inner product of the represented real fields via Parseval.
    pub fn inner(&self, other: &Spectrum) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        let s: f64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        let n = self.grid.len() as f64;
        Ok(s * self.grid.volume() / (n * n))
    }

    /// Largest violation of `c(-k) = conj(c(k))`, relative to the largest coefficient.
    pub fn hermitian_defect(&self) -> f64 {
        let grid = self.grid;
        let n = grid.n();
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for idx in 0..grid.len() {
            let ix = grid.unravel(idx);
            let mut jx = [0usize; 3];
            for a in 0..grid.dim() {
                jx[a] = (n - ix[a]) % n;
            }
            let j = grid.ravel(jx);
            worst = worst.max((self.coeffs[idx] - self.coeffs[j].conj()).norm());
        }
        worst / scale
    }

    /// Multiply every coefficient by a real symbol of the integer wavevector.
    pub fn apply_symbol(&self, symbol: impl Fn([i64; 3]) -> f64) -> Spectrum {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| c * symbol(self.grid.mode(idx)))
            .collect();
        Spectrum {
            grid: self.grid,
            coeffs,
        }
    }

    pub fn scaled(&self, factor: f64) -> Spectrum {
        Spectrum {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn axpy(&self, factor: f64, other: &Spectrum) -> Result<Spectrum> {
        self.grid.check_same(&other.grid)?;
        Ok(Spectrum {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b * factor)
                .collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &Spectrum) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            components: (0..grid.dim()).map(|_| ScalarField::zeros(grid)).collect(),
        }
    }

    pub fn from_components(components: Vec<ScalarField>) -> Result<Self> {
        let grid = components
            .first()
            .map(|c| c.grid())
            .ok_or_else(|| AcnsError::param("vector field needs components"))?;
        if components.len() != grid.dim() {
            return Err(AcnsError::param(format!(
                "vector field on a {}-d grid needs {} components, got {}",
                grid.dim(),
                grid.dim(),
                components.len()
            )));
        }
        for c in &components {
            grid.check_same(&c.grid())?;
        }
        Ok(Self { grid, components })
    }

    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        let mut comps: Vec<Vec<f64>> = vec![Vec::with_capacity(grid.len()); grid.dim()];
        for idx in 0..grid.len() {
            let v = f(grid.coords(idx));
            for (a, comp) in comps.iter_mut().enumerate() {
                comp.push(v[a]);
            }
        }
        Self {
            grid,
            components: comps
                .into_iter()
                .map(|values| ScalarField { grid, values })
                .collect(),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, a: usize) -> &ScalarField {
        &self.components[a]
    }

    pub fn component_mut(&mut self, a: usize) -> &mut ScalarField {
        &mut self.components[a]
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn into_components(self) -> Vec<ScalarField> {
        self.components
    }

    pub fn transform(&self) -> VectorSpectrum {
        VectorSpectrum {
            grid: self.grid,
            components: self.components.iter().map(|c| c.transform()).collect(),
        }
    }

    /// Pointwise Euclidean magnitude.
    pub fn magnitude(&self) -> ScalarField {
        let values = (0..self.grid.len())
            .map(|i| {
                self.components
                    .iter()
                    .map(|c| c.values[i] * c.values[i])
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        ScalarField {
            grid: self.grid,
            values,
        }
    }

    pub fn max_magnitude(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| {
                self.components
                    .iter()
                    .map(|c| c.values[i] * c.values[i])
                    .sum::<f64>()
            })
            .fold(0.0f64, f64::max)
            .sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| c.is_finite())
    }

    pub fn inner(&self, other: &VectorField) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.inner(b))
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).unwrap_or(0.0).sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            components: self.components.iter().map(|c| c.scaled(factor)).collect(),
        }
    }

    pub fn axpy(&self, factor: f64, other: &VectorField) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.axpy(factor, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: self.grid,
            components,
        })
    }

    pub fn sub(&self, other: &VectorField) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn add(&self, other: &VectorField) -> Result<Self> {
        self.axpy(1.0, other)
    }
}

impl VectorSpectrum {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            components: (0..grid.dim()).map(|_| Spectrum::zeros(grid)).collect(),
        }
    }

    pub fn from_components(components: Vec<Spectrum>) -> Result<Self> {
        let grid = components
            .first()
            .map(|c| c.grid())
            .ok_or_else(|| AcnsError::param("vector spectrum needs components"))?;
        if components.len() != grid.dim() {
            return Err(AcnsError::param("component count must equal grid dimension"));
        }
        for c in &components {
            grid.check_same(&c.grid())?;
        }
        Ok(Self { grid, components })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn component(&self, a: usize) -> &Spectrum {
        &self.components[a]
    }

    pub fn component_mut(&mut self, a: usize) -> &mut Spectrum {
        &mut self.components[a]
    }

    pub fn components(&self) -> &[Spectrum] {
        &self.components
    }

    pub fn inverse(&self) -> VectorField {
        VectorField {
            grid: self.grid,
            components: self.components.iter().map(|c| c.inverse()).collect(),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.l2_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn inner(&self, other: &VectorSpectrum) -> Result<f64> {
        self.grid.check_same(&other.grid)?;
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.inner(b))
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid,
            components: self.components.iter().map(|c| c.scaled(factor)).collect(),
        }
    }

    pub fn axpy(&self, factor: f64, other: &VectorSpectrum) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.axpy(factor, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: self.grid,
            components,
        })
    }

    pub fn max_abs_diff(&self, other: &VectorSpectrum) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .fold(0.0, |m, (a, b)| m.max(a.max_abs_diff(b)))
    }

    pub fn apply_symbol(&self, symbol: impl Fn([i64; 3]) -> f64 + Copy) -> Self {
        Self {
            grid: self.grid,
            components: self.components.iter().map(|c| c.apply_symbol(symbol)).collect(),
        }
    }
}
