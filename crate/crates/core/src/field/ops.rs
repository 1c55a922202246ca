//! Fourier-multiplier calculus: derivatives, Hodge/Leray projection, dealiasing.
//!
//! First derivatives use `i κ` with the Nyquist component of `κ` zeroed; the
//! Laplacian uses the full `-|k|²`. The projectors are built from `κ` so that
//! `div P v = 0` holds exactly for the discrete divergence.

use num_complex::Complex64;

use super::{ScalarField, Spectrum, VectorField, VectorSpectrum};
use crate::error::Result;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn gradient(f: &Spectrum) -> VectorSpectrum {
    let grid = f.grid();
    let components = (0..grid.dim())
        .map(|a| {
            let mut out = Spectrum::zeros(grid);
            for (idx, (o, c)) in out.coeffs_mut().iter_mut().zip(f.coeffs()).enumerate() {
                *o = I * grid.derivative_mode(idx)[a] * c;
            }
            out
        })
        .collect();
    VectorSpectrum::from_components(components).expect("gradient components share the grid")
}

/// Spectral partial derivative along `axis`.
pub fn partial(f: &Spectrum, axis: usize) -> Spectrum {
    let grid = f.grid();
    let mut out = Spectrum::zeros(grid);
    for (idx, (o, c)) in out.coeffs_mut().iter_mut().zip(f.coeffs()).enumerate() {
        *o = I * grid.derivative_mode(idx)[axis] * c;
    }
    out
}

pub fn divergence(v: &VectorSpectrum) -> Spectrum {
    let grid = v.grid();
    let mut out = Spectrum::zeros(grid);
    for a in 0..grid.dim() {
        let comp = v.component(a).coeffs();
        for (idx, o) in out.coeffs_mut().iter_mut().enumerate() {
            *o += I * grid.derivative_mode(idx)[a] * comp[idx];
        }
    }
    out
}

pub fn laplacian(f: &Spectrum) -> Spectrum {
    let grid = f.grid();
    let mut out = f.clone();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        *c *= -(grid.mode_norm_sq(idx) as f64);
    }
    out
}

pub fn vector_laplacian(v: &VectorSpectrum) -> VectorSpectrum {
    VectorSpectrum::from_components(v.components().iter().map(laplacian).collect())
        .expect("same grid")
}

/// Inverse Laplacian on mean-zero data; the zero mode is mapped to zero.
pub fn inverse_laplacian(f: &Spectrum) -> Spectrum {
    let grid = f.grid();
    let mut out = f.clone();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        let k2 = grid.mode_norm_sq(idx);
        if k2 == 0 {
            *c = Complex64::new(0.0, 0.0);
        } else {
            *c /= -(k2 as f64);
        }
    }
    out
}

/// Gradient projection `Q v`. Modes with vanishing derivative wavevector
/// (the mean and pure-Nyquist modes) carry no gradient part.
pub fn project_gradient(v: &VectorSpectrum) -> VectorSpectrum {
    let grid = v.grid();
    let dim = grid.dim();
    let mut out = VectorSpectrum::zeros(grid);
    for idx in 0..grid.len() {
        let kappa = grid.derivative_mode(idx);
        let k2: f64 = kappa.iter().map(|k| k * k).sum();
        if k2 == 0.0 {
            continue;
        }
        let mut dot = Complex64::new(0.0, 0.0);
        for a in 0..dim {
            dot += v.component(a).coeffs()[idx] * kappa[a];
        }
        for a in 0..dim {
            out.component_mut(a).coeffs_mut()[idx] = dot * (kappa[a] / k2);
        }
    }
    out
}

/// Solenoidal projection `P v = v - Q v`; the spatial mean stays in `P v`.
pub fn project_solenoidal(v: &VectorSpectrum) -> VectorSpectrum {
    let q = project_gradient(v);
    v.axpy(-1.0, &q).expect("same grid")
}

/// Hodge split `(P v, Q v)`.
pub fn leray_decompose(v: &VectorSpectrum) -> (VectorSpectrum, VectorSpectrum) {
    let q = project_gradient(v);
    let p = v.axpy(-1.0, &q).expect("same grid");
    (p, q)
}

/// Zero every mode outside the 2/3-rule cube.
pub fn dealias(f: &mut Spectrum) {
    let grid = f.grid();
    for (idx, c) in f.coeffs_mut().iter_mut().enumerate() {
        if !grid.is_resolved(idx) {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

pub fn dealias_vector(v: &mut VectorSpectrum) {
    for a in 0..v.grid().dim() {
        dealias(v.component_mut(a));
    }
}

/// Bessel-potential multiplier `(1 + |k|²)^{order/2}`.
pub fn bessel_potential(f: &Spectrum, order: f64) -> Spectrum {
    f.apply_symbol(|k| (1.0 + (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64).powf(order / 2.0))
}

// Physical-space conveniences.

pub fn gradient_field(f: &ScalarField) -> VectorField {
    gradient(&f.transform()).inverse()
}

pub fn divergence_field(v: &VectorField) -> ScalarField {
    divergence(&v.transform()).inverse()
}

pub fn laplacian_field(f: &ScalarField) -> ScalarField {
    laplacian(&f.transform()).inverse()
}

pub fn leray_decompose_field(v: &VectorField) -> (VectorField, VectorField) {
    let (p, q) = leray_decompose(&v.transform());
    (p.inverse(), q.inverse())
}

/// Velocity-gradient tensor `D[i][j] = ∂_j u_i` in physical space.
pub fn velocity_gradient(u: &VectorSpectrum) -> Vec<Vec<ScalarField>> {
    let dim = u.grid().dim();
    (0..dim)
        .map(|i| (0..dim).map(|j| partial(u.component(i), j).inverse()).collect())
        .collect()
}

/// Advection `(u·∇)v` evaluated pointwise from spectral data of both fields.
pub fn advection(u: &VectorField, v: &VectorSpectrum) -> Result<VectorField> {
    let grid = u.grid();
    grid.check_same(&v.grid())?;
    let dim = grid.dim();
    let mut out = VectorField::zeros(grid);
    for i in 0..dim {
        let mut acc = vec![0.0; grid.len()];
        for j in 0..dim {
            let d = partial(v.component(i), j).inverse();
            for ((a, uj), dij) in acc.iter_mut().zip(u.component(j).values()).zip(d.values()) {
                *a += uj * dij;
            }
        }
        *out.component_mut(i) = ScalarField::from_values(grid, acc)?;
    }
    Ok(out)
}

pub fn symbol_norm_sq(k: [i64; 3]) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64
}

