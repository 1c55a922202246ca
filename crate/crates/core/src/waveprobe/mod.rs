//! Wave-equation structure of the artificial-compressibility pressure.
//!
//! Under `τ = t/√ε` the pressure satisfies
//!
//! ```text
//! ∂ττ p̃ − Δp̃ + μΔ div ũ − div((ũ·∇)ũ + ½(div ũ)ũ) = 0,
//! ```
//!
//! which this module checks on solver output and splits into the viscous
//! response `p̃₁` (zero data) and the advective response `p̃₂` (data from
//! `p̃(0)` and `∂τ p̃(0) = −div ũ(0)/√ε`). The Laplacian acting on `p̃` is the
//! composition `div ∇`, so that the relation holds exactly for the discrete
//! system, and forcing terms `f` are assumed absent.
//!
//! The submodules hold a free-space radial solver and the Strichartz probe.

mod radial_wave;
mod strichartz;

use num_complex::Complex64;

pub use radial_wave::{solve_radial_wave, RadialForcing, RadialProfile, RadialWaveProblem, RadialWaveSolution};
pub use strichartz::{
    random_radial_problem, strichartz_ensemble, strichartz_measure, strichartz_ratio, StrichartzMeasurement,
    StrichartzRow, StrichartzVariant,
};

use crate::acsolver::{nonlinear_spectral, ACState, AcOptions};
use crate::error::{AcnsError, Result};
use crate::field::ops::{bessel_potential, divergence, gradient, laplacian};
use crate::field::{ScalarField, Spectrum, VectorField};

#[derive(Debug, Clone, PartialEq)]
pub struct RescaledState {
    pub tau: f64,
    /// Original time, kept so that [`unrescale`] restores it bit for bit.
    pub t: f64,
    pub eps: f64,
    pub mu: f64,
    pub u_tilde: VectorField,
    pub p_tilde: ScalarField,
}

pub fn rescale(state: &ACState) -> RescaledState {
    RescaledState {
        tau: state.t / state.eps.sqrt(),
        t: state.t,
        eps: state.eps,
        mu: state.mu,
        u_tilde: state.u.clone(),
        p_tilde: state.p.clone(),
    }
}

pub fn unrescale(state: &RescaledState) -> Result<ACState> {
    if !(state.eps > 0.0 && state.eps.is_finite()) {
        return Err(AcnsError::param(format!("eps must be positive, got {}", state.eps)));
    }
    Ok(ACState {
        u: state.u_tilde.clone(),
        p: state.p_tilde.clone(),
        eps: state.eps,
        mu: state.mu,
        t: state.t,
    })
}

pub fn rescale_trajectory(states: &[ACState]) -> Vec<RescaledState> {
    states.iter().map(rescale).collect()
}

/// Which terms of the momentum equation were active in the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaveModel {
    pub nonlinear_on: bool,
    pub dealias: bool,
}

impl From<&AcOptions> for WaveModel {
    fn from(o: &AcOptions) -> Self {
        Self {
            nonlinear_on: o.nonlinear_on,
            dealias: o.dealias,
        }
    }
}

impl Default for WaveModel {
    fn default() -> Self {
        Self {
            nonlinear_on: true,
            dealias: true,
        }
    }
}

/// Spatial terms at one snapshot: `div ∇p̃`, `μΔ div ũ` and `div A`.
struct WaveTerms {
    lap_p: Spectrum,
    viscous: Spectrum,
    advective: Spectrum,
}

fn wave_terms(s: &RescaledState, model: WaveModel) -> WaveTerms {
    let p_hat = s.p_tilde.transform();
    let u_hat = s.u_tilde.transform();
    let lap_p = divergence(&gradient(&p_hat));
    let viscous = laplacian(&divergence(&u_hat)).scaled(s.mu);
    let advective = if model.nonlinear_on {
        divergence(&nonlinear_spectral(&u_hat, model.dealias)).scaled(-1.0)
    } else {
        Spectrum::zeros(p_hat.grid())
    };
    WaveTerms {
        lap_p,
        viscous,
        advective,
    }
}

/// Validates a trajectory of at least `needed` snapshots sharing grid and
/// parameters, with uniform `τ` spacing; returns the spacing.
fn uniform_spacing(traj: &[RescaledState], needed: usize) -> Result<f64> {
    if traj.len() < needed {
        return Err(AcnsError::InsufficientSamples {
            needed,
            got: traj.len(),
        });
    }
    let first = &traj[0];
    let dtau = traj[1].tau - first.tau;
    if !(dtau > 0.0) {
        return Err(AcnsError::NonuniformSpacing(format!("τ must increase, got step {dtau}")));
    }
    for (i, pair) in traj.windows(2).enumerate() {
        let step = pair[1].tau - pair[0].tau;
        if (step - dtau).abs() > 1e-9 * dtau {
            return Err(AcnsError::NonuniformSpacing(format!(
                "step {i} has Δτ = {step}, expected {dtau}"
            )));
        }
        let s = &pair[1];
        s.u_tilde.grid().check_same(&first.u_tilde.grid())?;
        if s.eps != first.eps || s.mu != first.mu {
            return Err(AcnsError::param("snapshots must share eps and mu"));
        }
    }
    Ok(dtau)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveResidual {
    /// `τ` of each interior snapshot.
    pub tau: Vec<f64>,
    /// `W^{−2,2}` norm of the left-hand side.
    pub absolute: Vec<f64>,
    /// `absolute` divided by the sum of the `W^{−2,2}` norms of the four terms.
    pub relative: Vec<f64>,
}

impl WaveResidual {
    pub fn max_relative(&self) -> f64 {
        self.relative.iter().fold(0.0, |m, &r| m.max(r))
    }

    pub fn max_absolute(&self) -> f64 {
        self.absolute.iter().fold(0.0, |m, &r| m.max(r))
    }
}

fn weak_norm(s: &Spectrum) -> f64 {
    bessel_potential(s, -2.0).l2_norm()
}

/// Residual of the pressure wave equation with `∂ττ p̃` from second central
/// differences.
pub fn pressure_wave_residual(traj: &[RescaledState], model: WaveModel) -> Result<WaveResidual> {
    let dtau = uniform_spacing(traj, 3)?;
    let p_hat: Vec<Spectrum> = traj.iter().map(|s| s.p_tilde.transform()).collect();
    let mut out = WaveResidual {
        tau: Vec::new(),
        absolute: Vec::new(),
        relative: Vec::new(),
    };
    for i in 1..traj.len() - 1 {
        let p_tt = p_hat[i + 1]
            .axpy(-2.0, &p_hat[i])?
            .axpy(1.0, &p_hat[i - 1])?
            .scaled(1.0 / (dtau * dtau));
        let terms = wave_terms(&traj[i], model);
        let residual = p_tt
            .axpy(-1.0, &terms.lap_p)?
            .axpy(1.0, &terms.viscous)?
            .axpy(-1.0, &terms.advective)?;
        let abs = weak_norm(&residual);
        let scale = weak_norm(&p_tt) + weak_norm(&terms.lap_p) + weak_norm(&terms.viscous) + weak_norm(&terms.advective);
        out.tau.push(traj[i].tau);
        out.absolute.push(abs);
        out.relative.push(if scale > 0.0 { abs / scale } else { 0.0 });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressureSplit {
    pub tau: Vec<f64>,
    /// Response to `F₁ = −μΔ div ũ` with zero data.
    pub p1: Vec<ScalarField>,
    /// Response to `F₂ = div((ũ·∇)ũ + ½(div ũ)ũ)` with the data of `p̃`.
    pub p2: Vec<ScalarField>,
    /// `max_τ ‖p̃₁ + p̃₂ − p̃‖_{L²} / max_τ ‖p̃‖_{L²}` (absolute if `p̃ ≡ 0`).
    pub reconstruction_error: f64,
}

/// Per-mode Duhamel solution of `∂ττ q + ω² q = F` with `q(0) = a`,
/// `∂τ q(0) = b`, using trapezoidal quadrature of the forcing.
fn duhamel_mode(omega: f64, a: Complex64, b: Complex64, forcing: &[Complex64], dtau: f64) -> Vec<Complex64> {
    let m = forcing.len();
    let mut out = Vec::with_capacity(m);
    let zero = Complex64::new(0.0, 0.0);
    let (mut c_acc, mut s_acc) = (zero, zero);
    let (mut prev_c, mut prev_s) = (zero, zero);
    for (j, &f) in forcing.iter().enumerate() {
        let tau = j as f64 * dtau;
        // with ω = 0 the weights are 1 and τ, giving ∫F and ∫sF
        let (wc, ws) = if omega > 0.0 {
            ((omega * tau).cos(), (omega * tau).sin())
        } else {
            (1.0, tau)
        };
        let (cur_c, cur_s) = (f * wc, f * ws);
        if j > 0 {
            c_acc += (prev_c + cur_c) * (0.5 * dtau);
            s_acc += (prev_s + cur_s) * (0.5 * dtau);
        }
        prev_c = cur_c;
        prev_s = cur_s;
        let q = if omega > 0.0 {
            a * wc + b * (ws / omega) + (c_acc * ws - s_acc * wc) / omega
        } else {
            a + b * tau + c_acc * tau - s_acc
        };
        out.push(q);
    }
    out
}

/// Solve the two forced wave equations over `[τ₀, τ₀ + horizon]`.
pub fn split_pressure(traj: &[RescaledState], model: WaveModel, horizon: f64) -> Result<PressureSplit> {
    let dtau = uniform_spacing(traj, 2)?;
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(AcnsError::param(format!("horizon must be non-negative, got {horizon}")));
    }
    let steps = (horizon / dtau).round();
    let available = traj.len() - 1;
    if (horizon / dtau - steps).abs() > 1e-6 || steps as usize > available {
        return Err(AcnsError::param(format!(
            "horizon {horizon} exceeds the trajectory length {} or is not a multiple of Δτ = {dtau}",
            available as f64 * dtau
        )));
    }
    let used = &traj[..steps as usize + 1];
    let grid = used[0].u_tilde.grid();
    let eps = used[0].eps;

    let mut f1 = Vec::with_capacity(used.len());
    let mut f2 = Vec::with_capacity(used.len());
    for s in used {
        let terms = wave_terms(s, model);
        f1.push(terms.viscous.scaled(-1.0));
        f2.push(terms.advective);
    }
    let p0 = used[0].p_tilde.transform();
    let v0 = divergence(&used[0].u_tilde.transform()).scaled(-1.0 / eps.sqrt());

    let m = used.len();
    let mut p1_hat = vec![Spectrum::zeros(grid); m];
    let mut p2_hat = vec![Spectrum::zeros(grid); m];
    let zero = Complex64::new(0.0, 0.0);
    let mut series = vec![zero; m];
    for idx in 0..grid.len() {
        let kappa = grid.derivative_mode(idx);
        let omega = (kappa[0] * kappa[0] + kappa[1] * kappa[1] + kappa[2] * kappa[2]).sqrt();
        for (slot, f) in series.iter_mut().zip(&f1) {
            *slot = f.coeffs()[idx];
        }
        for (j, q) in duhamel_mode(omega, zero, zero, &series, dtau).into_iter().enumerate() {
            p1_hat[j].coeffs_mut()[idx] = q;
        }
        for (slot, f) in series.iter_mut().zip(&f2) {
            *slot = f.coeffs()[idx];
        }
        let (a, b) = (p0.coeffs()[idx], v0.coeffs()[idx]);
        for (j, q) in duhamel_mode(omega, a, b, &series, dtau).into_iter().enumerate() {
            p2_hat[j].coeffs_mut()[idx] = q;
        }
    }

    let p1: Vec<ScalarField> = p1_hat.iter().map(Spectrum::inverse).collect();
    let p2: Vec<ScalarField> = p2_hat.iter().map(Spectrum::inverse).collect();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for ((a, b), s) in p1.iter().zip(&p2).zip(used) {
        let diff = a.add(b)?.sub(&s.p_tilde)?;
        worst = worst.max(diff.inner(&diff)?.sqrt());
        scale = scale.max(s.p_tilde.inner(&s.p_tilde)?.sqrt());
    }
    Ok(PressureSplit {
        tau: used.iter().map(|s| s.tau).collect(),
        p1,
        p2,
        reconstruction_error: if scale > 0.0 { worst / scale } else { worst },
    })
}

#[cfg(test)]
mod tests;
