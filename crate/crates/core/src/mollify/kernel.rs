use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{AcnsError, Result};
use crate::quadrature::gauss_legendre_on;

/// Above this frequency the bump transform is below 1e−16 and is set to zero.
pub const RHO_CUTOFF: f64 = 1200.0;

/// Unnormalised bump `exp(−1/(1−r²))` on `r < 1`.
pub fn bump(r: f64) -> f64 {
    if r.abs() < 1.0 {
        (-1.0 / (1.0 - r * r)).exp()
    } else {
        0.0
    }
}

fn panels(a: f64, b: f64, count: usize, order: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / count as f64;
    (0..count)
        .flat_map(|i| gauss_legendre_on(order, a + i as f64 * h, a + (i + 1) as f64 * h))
        .collect()
}

/// Normalising constant `C` with `∫_{ℝ^d} C·bump(|x|) dx = 1`.
pub fn normalization(dim: usize) -> f64 {
    static C: OnceLock<[f64; 2]> = OnceLock::new();
    let c = C.get_or_init(|| {
        let rule = panels(0.0, 1.0, 16, 24);
        let m2: f64 = rule.iter().map(|(r, w)| w * 2.0 * PI * r * bump(*r)).sum();
        let m3: f64 = rule.iter().map(|(r, w)| w * 4.0 * PI * r * r * bump(*r)).sum();
        [1.0 / m2, 1.0 / m3]
    });
    c[dim - 2]
}

/// Fourier transform `ψ̂(ρ) = ∫ ψ(x) e^{−iξ·x} dx` of the unit-mass bump at `|ξ| = ρ`.
#[derive(Debug, Clone)]
pub struct BumpTransform {
    dim: usize,
    /// Radial rule on `[0, 1]` (d = 3) or marginal rule on `[0, 1]` (d = 2).
    nodes: Vec<(f64, f64)>,
    rho_max: f64,
}

impl BumpTransform {
    /// Accurate for `ρ ≤ rho_max` (clamped to the cutoff).
    pub fn new(dim: usize, rho_max: f64) -> Self {
        let rho_max = rho_max.clamp(1.0, RHO_CUTOFF);
        let count = ((rho_max / 6.0).ceil() as usize + 4).max(16);
        let rule = panels(0.0, 1.0, count, 16);
        let c = normalization(dim);
        let nodes = match dim {
            3 => rule.iter().map(|(r, w)| (*r, w * 4.0 * PI * r * c * bump(*r))).collect(),
            // marginal m(x) = ∫ ψ(x, y) dy, so ψ̂(ρ) = 2∫₀¹ m(x) cos(ρx) dx
            _ => {
                let inner = panels(0.0, 1.0, 16, 16);
                rule.iter()
                    .map(|(x, w)| {
                        let ymax = (1.0 - x * x).max(0.0).sqrt();
                        let m: f64 = inner
                            .iter()
                            .map(|(t, wt)| wt * ymax * 2.0 * c * bump((x * x + (t * ymax).powi(2)).sqrt()))
                            .sum();
                        (*x, 2.0 * w * m)
                    })
                    .collect()
            }
        };
        Self { dim, nodes, rho_max }
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    pub fn eval(&self, rho: f64) -> f64 {
        let rho = rho.abs();
        if rho > RHO_CUTOFF {
            return 0.0;
        }
        match self.dim {
            3 if rho < 1e-8 => self.nodes.iter().map(|(r, w)| w * r).sum(),
            3 => self.nodes.iter().map(|(r, w)| w * (rho * r).sin()).sum::<f64>() / rho,
            _ => self.nodes.iter().map(|(x, w)| w * (rho * x).cos()).sum(),
        }
    }
}

/// `ψ_α(x) = α^{−d} ψ(x/α)` with `ψ = C·bump`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierKernel {
    alpha: f64,
    dim: usize,
}

impl MollifierKernel {
    pub fn new(alpha: f64, dim: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(AcnsError::param(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !(dim == 2 || dim == 3) {
            return Err(AcnsError::param(format!("kernel dimension must be 2 or 3, got {dim}")));
        }
        Ok(Self { alpha, dim })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, r: f64) -> f64 {
        self.alpha.powi(-(self.dim as i32)) * normalization(self.dim) * bump(r / self.alpha)
    }

    /// `∫ ψ_α` by quadrature.
    pub fn mass(&self) -> f64 {
        let rule = panels(0.0, self.alpha, 16, 24);
        let sphere = if self.dim == 3 { 4.0 * PI } else { 2.0 * PI };
        rule.iter()
            .map(|(r, w)| w * sphere * r.powi(self.dim as i32 - 1) * self.value(*r))
            .sum()
    }
}
