//! Initial velocity fields: seeded random spectra and the Taylor–Green vortex.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::ops::project_solenoidal;
use super::{Grid, VectorField, VectorSpectrum};

/// Random field with Gaussian Fourier coefficients of variance `|k|^{-slope}`
/// on `1 ≤ |k| ≤ k_max`, optionally Leray-projected, scaled to unit RMS speed.
/// The result is real because only the real part of the inverse transform is kept.
pub fn random_velocity(grid: Grid, seed: u64, k_max: f64, slope: f64, divergence_free: bool) -> VectorField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = grid.dim();
    let mut spec = VectorSpectrum::zeros(grid);
    for idx in 0..grid.len() {
        let k2 = grid.mode_norm_sq(idx) as f64;
        let in_band = k2 >= 1.0 && k2.sqrt() <= k_max && grid.is_resolved(idx);
        for a in 0..dim {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            if in_band {
                let amp = k2.powf(-slope / 4.0);
                spec.component_mut(a).coeffs_mut()[idx] = Complex64::new(re, im) * amp;
            }
        }
    }
    if divergence_free {
        spec = project_solenoidal(&spec);
    }
    let u = spec.inverse();
    let rms = (u.inner(&u).expect("same grid") / grid.volume()).sqrt();
    if rms > 0.0 {
        u.scaled(1.0 / rms)
    } else {
        u
    }
}

/// Taylor–Green vortex `(cos x₁ sin x₂, −sin x₁ cos x₂)`, multiplied by
/// `cos x₃` in three dimensions.
pub fn taylor_green(grid: Grid) -> VectorField {
    let three = grid.dim() == 3;
    VectorField::from_fn(grid, |x| {
        let z = if three { x[2].cos() } else { 1.0 };
        [x[0].cos() * x[1].sin() * z, -x[0].sin() * x[1].cos() * z, 0.0]
    })
}
