//! Radial functions on `ℝ³` sampled on a uniform grid `r_i = i·dr`.
//!
//! With `v = r·f`, the three-dimensional Fourier transform of a radial `f`
//! reduces to a sine transform of `v`, so radial Fourier multipliers act on
//! `v` as one-dimensional multipliers on its odd extension. Transforms use
//! the DST-I on `nr` intervals; the profile must vanish near `r_max`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{AcnsError, Result};
use crate::field::fft::plan;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid {
    nr: usize,
    r_max: f64,
}

impl RadialGrid {
    pub fn new(nr: usize, r_max: f64) -> Result<Self> {
        if nr < 8 {
            return Err(AcnsError::param(format!("radial grid needs at least 8 intervals, got {nr}")));
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(AcnsError::param(format!("r_max must be positive, got {r_max}")));
        }
        Ok(Self { nr, r_max })
    }

    pub fn nr(&self) -> usize {
        self.nr
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn dr(&self) -> f64 {
        self.r_max / self.nr as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        i as f64 * self.dr()
    }

    /// Samples `f(r_i)` for `i = 0..nr`.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.nr).map(|i| f(self.r(i))).collect()
    }

    /// Frequency `ρ_m = π m / r_max` of sine mode `m`.
    pub fn rho(&self, m: usize) -> f64 {
        PI * m as f64 / self.r_max
    }
}

/// DST-I: `S_m = Σ_{i=1}^{N-1} v_i sin(π i m / N)` for `m = 0..N` (`S_0 = 0`).
pub fn dst1(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    let fft = plan(2 * n, false);
    let mut buf = vec![Complex64::new(0.0, 0.0); 2 * n];
    for i in 1..n {
        buf[i] = Complex64::new(v[i], 0.0);
        buf[2 * n - i] = Complex64::new(-v[i], 0.0);
    }
    fft.process(&mut buf);
    let mut out: Vec<f64> = buf[..n].iter().map(|c| -0.5 * c.im).collect();
    out[0] = 0.0;
    out
}

/// Inverse of [`dst1`].
pub fn idst1(s: &[f64]) -> Vec<f64> {
    let n = s.len();
    let mut v = dst1(s);
    for x in v.iter_mut() {
        *x *= 2.0 / n as f64;
    }
    v
}

/// `r·f(r)` on the grid.
fn times_r(grid: &RadialGrid, f: &[f64]) -> Vec<f64> {
    f.iter().enumerate().map(|(i, x)| grid.r(i) * x).collect()
}

/// Recover `f = v / r`, with `f(0)` by Richardson extrapolation in `r²`.
pub fn divide_by_r(grid: &RadialGrid, v: &[f64]) -> Vec<f64> {
    let mut f: Vec<f64> = v.iter().enumerate().map(|(i, x)| if i == 0 { 0.0 } else { x / grid.r(i) }).collect();
    if f.len() > 2 {
        f[0] = (4.0 * f[1] - f[2]) / 3.0;
    }
    f
}

/// Sine coefficients `S(ρ_m) ≈ ∫₀^∞ r f(r) sin(ρ_m r) dr`.
pub fn sine_coefficients(grid: &RadialGrid, f: &[f64]) -> Vec<f64> {
    let dr = grid.dr();
    dst1(&times_r(grid, f)).into_iter().map(|s| s * dr).collect()
}

/// Apply the radial Fourier multiplier `m(|ξ|)`.
pub fn apply_multiplier(grid: &RadialGrid, f: &[f64], m: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut s = dst1(&times_r(grid, f));
    for (k, c) in s.iter_mut().enumerate().skip(1) {
        *c *= m(grid.rho(k));
    }
    divide_by_r(grid, &idst1(&s))
}

/// Homogeneous Sobolev norm `‖f‖_{Ḣ^s(ℝ³)}`.
pub fn homogeneous_norm(grid: &RadialGrid, f: &[f64], s: f64) -> f64 {
    let coeffs = sine_coefficients(grid, f);
    let drho = PI / grid.r_max();
    let sum: f64 = coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(m, c)| grid.rho(m).powf(2.0 * s) * c * c)
        .sum();
    (8.0 * sum * drho).sqrt()
}

/// `‖f‖_{L^p(ℝ³)}` with measure `4πr²dr`; `p = ∞` gives the maximum.
pub fn lp_norm(grid: &RadialGrid, f: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return f.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    }
    let dr = grid.dr();
    let sum: f64 = f.iter().enumerate().map(|(i, x)| x.abs().powf(p) * grid.r(i).powi(2)).sum();
    (4.0 * PI * sum * dr).powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: &RadialGrid) -> Vec<f64> {
        grid.sample(|r| (-r * r).exp())
    }

    #[test]
    fn dst_round_trips() {
        let v: Vec<f64> = (0..64).map(|i| if i == 0 { 0.0 } else { (i as f64 * 0.37).sin() }).collect();
        let back = idst1(&dst1(&v));
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn gaussian_norms_match_closed_forms() {
        let grid = RadialGrid::new(4096, 20.0).unwrap();
        let f = gaussian(&grid);
        // ‖e^{-r²}‖²_{L²} = (π/2)^{3/2}
        let l2 = lp_norm(&grid, &f, 2.0);
        assert!((l2 * l2 - (PI / 2.0).powf(1.5)).abs() < 1e-10);
        assert!((lp_norm(&grid, &f, 2.0) - homogeneous_norm(&grid, &f, 0.0)).abs() < 1e-10);
        // ‖∇e^{-r²}‖²_{L²} = 3·(π/2)^{3/2}
        let h1 = homogeneous_norm(&grid, &f, 1.0);
        assert!((h1 * h1 - 3.0 * (PI / 2.0).powf(1.5)).abs() < 1e-9);
        assert_eq!(lp_norm(&grid, &f, f64::INFINITY), 1.0);
    }

    #[test]
    fn heat_multiplier_matches_closed_form() {
        // e^{-t|ξ|²} maps e^{-r²} to (1+4t)^{-3/2} e^{-r²/(1+4t)}
        let grid = RadialGrid::new(4096, 20.0).unwrap();
        let t = 0.3;
        let out = apply_multiplier(&grid, &gaussian(&grid), |rho| (-t * rho * rho).exp());
        for (i, w) in out.iter().enumerate().take(400) {
            let r = grid.r(i);
            let exact = (1.0 + 4.0 * t).powf(-1.5) * (-r * r / (1.0 + 4.0 * t)).exp();
            assert!((w - exact).abs() < 1e-8, "r={r}: {w} vs {exact}");
        }
    }
}
