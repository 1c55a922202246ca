//! Lebesgue, Bessel-potential Sobolev and mixed space-time norms on the torus.

use super::{ops, Grid, ScalarField, Spectrum, VectorField};
use crate::error::{AcnsError, Result};

/// Exponents accepted by [`lp_norm`].
pub const SUPPORTED_EXPONENTS: [f64; 7] = [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, f64::INFINITY];

/// Scalar or vector data that can be measured pointwise by magnitude.
pub trait FieldData {
    fn grid(&self) -> Grid;
    fn component_values(&self) -> Vec<&[f64]>;
    fn component_spectra(&self) -> Vec<Spectrum>;
}

impl FieldData for ScalarField {
    fn grid(&self) -> Grid {
        ScalarField::grid(self)
    }
    fn component_values(&self) -> Vec<&[f64]> {
        vec![self.values()]
    }
    fn component_spectra(&self) -> Vec<Spectrum> {
        vec![self.transform()]
    }
}

impl FieldData for VectorField {
    fn grid(&self) -> Grid {
        VectorField::grid(self)
    }
    fn component_values(&self) -> Vec<&[f64]> {
        self.components().iter().map(|c| c.values()).collect()
    }
    fn component_spectra(&self) -> Vec<Spectrum> {
        self.components().iter().map(|c| c.transform()).collect()
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if SUPPORTED_EXPONENTS.contains(&p) {
        Ok(())
    } else {
        Err(AcnsError::UnsupportedExponent(p))
    }
}

/// Equal-weight quadrature of `(∫ |f|^p)^{1/p}` for any `p ≥ 1` (including ∞).
pub(crate) fn lp_of_components(grid: Grid, comps: &[&[f64]], p: f64) -> f64 {
    let n = grid.len();
    let mag = |i: usize| -> f64 {
        if comps.len() == 1 {
            comps[0][i].abs()
        } else {
            comps.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt()
        }
    };
    if p.is_infinite() {
        return (0..n).map(mag).fold(0.0, f64::max);
    }
    let sum: f64 = if p == 2.0 {
        (0..n).map(|i| mag(i).powi(2)).sum()
    } else {
        (0..n).map(|i| mag(i).powf(p)).sum()
    };
    (sum * grid.cell_volume()).powf(1.0 / p)
}

/// `‖f‖_{L^p}` for `p` in [`SUPPORTED_EXPONENTS`].
pub fn lp_norm<F: FieldData>(f: &F, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(lp_of_components(f.grid(), &f.component_values(), p))
}

/// `‖f‖_{W^{k,p}} = ‖(1 - Δ)^{k/2} f‖_{L^p}`; `k` may be negative or fractional.
pub fn sobolev_norm<F: FieldData>(f: &F, k: f64, p: f64) -> Result<f64> {
    check_exponent(p)?;
    let grid = f.grid();
    if k == 0.0 {
        return Ok(lp_of_components(grid, &f.component_values(), p));
    }
    let filtered: Vec<ScalarField> = f
        .component_spectra()
        .iter()
        .map(|s| ops::bessel_potential(s, k).inverse())
        .collect();
    let refs: Vec<&[f64]> = filtered.iter().map(|c| c.values()).collect();
    Ok(lp_of_components(grid, &refs, p))
}

/// Homogeneous `Ḣ^s` norm via Parseval with symbol `|k|^s`; the mean is dropped.
pub fn homogeneous_norm<F: FieldData>(f: &F, s: f64) -> f64 {
    let grid = f.grid();
    let n = grid.len() as f64;
    let mut total = 0.0;
    for spec in f.component_spectra() {
        for (idx, c) in spec.coeffs().iter().enumerate() {
            let k2 = grid.mode_norm_sq(idx);
            if k2 == 0 {
                continue;
            }
            total += (k2 as f64).powf(s) * c.norm_sqr();
        }
    }
    (total * grid.volume() / (n * n)).sqrt()
}

/// `(∫_0^T s(t)^q dt)^{1/q}` by the trapezoidal rule on uniformly spaced samples.
pub fn time_norm(samples: &[f64], dt: f64, q: f64) -> Result<f64> {
    if samples.len() < 2 {
        return Err(AcnsError::InsufficientSamples {
            needed: 2,
            got: samples.len(),
        });
    }
    if !(dt > 0.0) {
        return Err(AcnsError::param("time spacing must be positive"));
    }
    if q.is_infinite() {
        return Ok(samples.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    if q < 1.0 {
        return Err(AcnsError::UnsupportedExponent(q));
    }
    Ok(trapezoid(&samples.iter().map(|s| s.abs().powf(q)).collect::<Vec<_>>(), dt).powf(1.0 / q))
}

/// `‖f‖_{L^q_t L^r_x}` over a uniformly sampled series, `q ∈ {1, 2, 4, ∞}`.
pub fn space_time_norm<F: FieldData>(series: &[F], dt: f64, q: f64, r: f64) -> Result<f64> {
    if ![1.0, 2.0, 4.0, f64::INFINITY].contains(&q) {
        return Err(AcnsError::UnsupportedExponent(q));
    }
    if series.len() < 2 {
        return Err(AcnsError::InsufficientSamples {
            needed: 2,
            got: series.len(),
        });
    }
    let spatial = series.iter().map(|f| lp_norm(f, r)).collect::<Result<Vec<_>>>()?;
    time_norm(&spatial, dt, q)
}

pub(crate) fn trapezoid(values: &[f64], dt: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => dt * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

/// Running trapezoidal integral, starting at zero.
pub(crate) fn cumulative_trapezoid(values: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            acc += 0.5 * dt * (values[i - 1] + v);
        }
        out.push(acc);
    }
    out
}
