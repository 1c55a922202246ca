//! Exact per-mode propagators for the linear acoustic–viscous part.

use std::collections::HashMap;

use num_complex::Complex64;

use super::expm::{acoustic_block_exp, phi_functions_2x2, scalar_phi, Mat2};
use crate::error::{AcnsError, Result};
use crate::field::Grid;

/// Integer key `(|k|², |κ|²)`: the viscous rate uses the full wavevector and
/// the acoustic coupling uses the derivative wavevector.
pub(crate) type ModeKey = (i64, i64);

pub(crate) fn mode_key(grid: &Grid, idx: usize) -> ModeKey {
    let kd = grid.derivative_mode(idx);
    let kappa2 = (kd[0] * kd[0] + kd[1] * kd[1] + kd[2] * kd[2]).round() as i64;
    (grid.mode_norm_sq(idx), kappa2)
}

/// ETDRK2 coefficients of one mode class, in balanced variables `(a, √ε p̂)`.
#[derive(Debug, Clone)]
pub(crate) struct EtdCoefficients {
    /// `(e^{Lh}, hφ₁(Lh), hφ₂(Lh))` for transverse velocity.
    pub transverse: [f64; 3],
    /// Same triple for the coupled longitudinal/pressure block; `None` when `κ = 0`.
    pub block: Option<[Mat2; 3]>,
}

fn balanced_block(eps: f64, mu: f64, key: ModeKey) -> (f64, f64) {
    (mu * key.0 as f64, (key.1 as f64).sqrt() / eps.sqrt())
}

fn block_matrix(nu: f64, omega: f64) -> Mat2 {
    let z = Complex64::new(0.0, 0.0);
    [[Complex64::new(-nu, 0.0), Complex64::new(0.0, -omega)], [Complex64::new(0.0, -omega), z]]
}

fn etd_coefficients(eps: f64, mu: f64, h: f64, key: ModeKey) -> EtdCoefficients {
    let (nu, omega) = balanced_block(eps, mu, key);
    let (e, p1, p2) = scalar_phi(-nu * h);
    let block = (key.1 > 0).then(|| {
        let exp = acoustic_block_exp(nu, omega, h);
        let (mut phi1, mut phi2) = phi_functions_2x2(&block_matrix(nu, omega), h);
        for row in phi1.iter_mut().chain(phi2.iter_mut()) {
            for c in row.iter_mut() {
                *c *= h;
            }
        }
        [exp, phi1, phi2]
    });
    EtdCoefficients {
        transverse: [e, h * p1, h * p2],
        block,
    }
}

/// Per-mode lookup of ETDRK2 coefficients for a fixed `(ε, μ, h)`.
#[derive(Debug, Clone)]
pub(crate) struct EtdTable {
    pub h: f64,
    classes: Vec<EtdCoefficients>,
    index: Vec<u32>,
}

impl EtdTable {
    pub fn new(grid: &Grid, eps: f64, mu: f64, h: f64) -> Self {
        let mut lookup: HashMap<ModeKey, u32> = HashMap::new();
        let mut classes = Vec::new();
        let index = (0..grid.len())
            .map(|idx| {
                let key = mode_key(grid, idx);
                *lookup.entry(key).or_insert_with(|| {
                    classes.push(etd_coefficients(eps, mu, h, key));
                    (classes.len() - 1) as u32
                })
            })
            .collect();
        Self { h, classes, index }
    }

    pub fn get(&self, idx: usize) -> &EtdCoefficients {
        &self.classes[self.index[idx] as usize]
    }
}

/// Exact propagators `exp(h M_k)` of the linear system, one per mode.
///
/// The coupled block acts on `(κ̂·û, p̂)` with
/// `M_k = [[-μ|k|², -i|κ|], [-i|κ|/ε, 0]]`; the transverse part of `û`
/// decays by `exp(-μ|k|² h)`.
#[derive(Debug, Clone)]
pub struct LinearPropagator {
    grid: Grid,
    eps: f64,
    blocks: HashMap<ModeKey, (f64, Option<Mat2>)>,
}

impl LinearPropagator {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Block acting on (longitudinal amplitude, pressure) at mode `idx`.
    /// Modes without acoustic coupling (the mean and pure-Nyquist modes) get
    /// `diag(exp(-μ|k|²h), 1)`; the mean pressure never changes.
    pub fn block(&self, idx: usize) -> Mat2 {
        let (decay, block) = &self.blocks[&mode_key(&self.grid, idx)];
        match block {
            Some(b) => {
                let s = self.eps.sqrt();
                [[b[0][0], b[0][1] * s], [b[1][0] / s, b[1][1]]]
            }
            None => [
                [Complex64::new(*decay, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ],
        }
    }

    /// Decay factor of the transverse velocity at mode `idx`.
    pub fn transverse(&self, idx: usize) -> f64 {
        self.blocks[&mode_key(&self.grid, idx)].0
    }
}

pub fn linear_propagator(eps: f64, mu: f64, dt: f64, grid: Grid) -> Result<LinearPropagator> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(AcnsError::param(format!("eps must be positive, got {eps}")));
    }
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(AcnsError::param(format!("mu must be non-negative, got {mu}")));
    }
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(AcnsError::param(format!("dt must be non-negative, got {dt}")));
    }
    let mut blocks = HashMap::new();
    for idx in 0..grid.len() {
        let key = mode_key(&grid, idx);
        blocks.entry(key).or_insert_with(|| {
            let (nu, omega) = balanced_block(eps, mu, key);
            let decay = (-nu * dt).exp();
            (decay, (key.1 > 0).then(|| acoustic_block_exp(nu, omega, dt)))
        });
    }
    Ok(LinearPropagator { grid, eps, blocks })
}
