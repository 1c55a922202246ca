//! Exponential time integration of the artificial-compressibility system
//!
//! ```text
//! ∂t u + (u·∇)u + ½(div u)u + ∇p − μΔu = f,     ε ∂t p + div u = 0.
//! ```
//!
//! The linear acoustic–viscous part is solved exactly per Fourier mode; the
//! quadratic term enters through a second-order exponential Runge–Kutta
//! (ETDRK2) step.

mod expm;
mod nonlinear;
mod propagator;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use expm::{acoustic_block_exp, mat2_apply, mat2_identity, mat2_mul, phi_functions_2x2, DenseMatrix, Mat2};
pub(crate) use expm::scalar_phi;
pub(crate) use nonlinear::nonlinear_spectral;
pub use propagator::{linear_propagator, LinearPropagator};

use crate::error::{AcnsError, Result};
use crate::field::{Grid, ScalarField, Spectrum, VectorField, VectorSpectrum};
use propagator::EtdTable;

pub const DEFAULT_DT_CAP: f64 = 1e-2;
pub const CFL_NUMBER: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct ACState {
    pub u: VectorField,
    pub p: ScalarField,
    pub eps: f64,
    pub mu: f64,
    pub t: f64,
}

impl ACState {
    pub fn new(u: VectorField, p: ScalarField, eps: f64, mu: f64, t: f64) -> Result<Self> {
        u.grid().check_same(&p.grid())?;
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(AcnsError::param(format!("eps must be positive, got {eps}")));
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(AcnsError::param(format!("mu must be non-negative, got {mu}")));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(AcnsError::param(format!("t must be non-negative, got {t}")));
        }
        Ok(Self {
            u,
            p: p.centered(),
            eps,
            mu,
            t,
        })
    }

    pub fn zero(grid: Grid, eps: f64, mu: f64) -> Result<Self> {
        Self::new(VectorField::zeros(grid), ScalarField::zeros(grid), eps, mu, 0.0)
    }

    pub fn grid(&self) -> Grid {
        self.u.grid()
    }

    /// `E = ∫ ½|u|² + (ε/2)|p|²`.
    pub fn energy(&self) -> f64 {
        let p2 = self.p.inner(&self.p).expect("same grid");
        0.5 * self.u.inner(&self.u).expect("same grid") + 0.5 * self.eps * p2
    }
}

/// Forcing sampled on a uniform time grid and linearly interpolated; zero
/// outside the sampled window.
#[derive(Debug, Clone)]
pub struct ForcingSeries {
    t0: f64,
    dt: f64,
    spectra: Vec<VectorSpectrum>,
}

impl ForcingSeries {
    pub fn new(t0: f64, dt: f64, samples: &[VectorField]) -> Result<Self> {
        if samples.is_empty() {
            return Err(AcnsError::InsufficientSamples { needed: 1, got: 0 });
        }
        if samples.len() > 1 && !(dt > 0.0 && dt.is_finite()) {
            return Err(AcnsError::param(format!("forcing sample spacing must be positive, got {dt}")));
        }
        let grid = samples[0].grid();
        for s in samples {
            grid.check_same(&s.grid())?;
        }
        Ok(Self {
            t0,
            dt,
            spectra: samples.iter().map(VectorField::transform).collect(),
        })
    }

    pub fn grid(&self) -> Grid {
        self.spectra[0].grid()
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.dt * (self.spectra.len() - 1) as f64
    }

    pub fn spectrum_at(&self, t: f64) -> Option<VectorSpectrum> {
        let tol = 1e-12 * (1.0 + t.abs());
        if t < self.t0 - tol || t > self.t_end() + tol {
            return None;
        }
        if self.spectra.len() == 1 {
            return Some(self.spectra[0].clone());
        }
        let s = ((t - self.t0) / self.dt).max(0.0);
        let i = (s.floor() as usize).min(self.spectra.len() - 2);
        let w = (s - i as f64).clamp(0.0, 1.0);
        Some(
            self.spectra[i]
                .scaled(1.0 - w)
                .axpy(w, &self.spectra[i + 1])
                .expect("same grid"),
        )
    }

    pub fn at(&self, t: f64) -> VectorField {
        self.spectrum_at(t)
            .map(|s| s.inverse())
            .unwrap_or_else(|| VectorField::zeros(self.grid()))
    }
}

/// Switches shared by single steps and whole integrations.
#[derive(Debug, Clone)]
pub struct AcOptions {
    pub dealias: bool,
    pub nonlinear_on: bool,
    pub forcing: Option<Arc<ForcingSeries>>,
}

impl Default for AcOptions {
    fn default() -> Self {
        Self {
            dealias: true,
            nonlinear_on: true,
            forcing: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ACStepConfig {
    pub dt: f64,
    pub dealias: bool,
    pub nonlinear_on: bool,
    pub forcing: Option<Arc<ForcingSeries>>,
}

impl ACStepConfig {
    pub fn new(dt: f64) -> Self {
        Self {
            dt,
            dealias: true,
            nonlinear_on: true,
            forcing: None,
        }
    }

    pub fn options(&self) -> AcOptions {
        AcOptions {
            dealias: self.dealias,
            nonlinear_on: self.nonlinear_on,
            forcing: self.forcing.clone(),
        }
    }
}

/// Initial pressure policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PressureInit {
    Zero,
    NsCompatible,
    /// `p₀ = ε^{-β}·profile`; the data are well prepared only for `β < 1/2`.
    Scaled { beta: f64 },
}

impl PressureInit {
    pub fn violates_well_prepared(&self) -> bool {
        matches!(self, PressureInit::Scaled { beta } if *beta >= 0.5)
    }
}

#[derive(Debug, Clone)]
pub struct InitialData {
    pub state: ACState,
    pub violates_id: bool,
}

/// Fixed mean-zero pressure profile `Σ_a cos x_a` used by the scaled policy.
pub fn pressure_profile(grid: Grid) -> ScalarField {
    let dim = grid.dim();
    ScalarField::from_fn(grid, |x| (0..dim).map(|a| x[a].cos()).sum())
}

pub fn make_initial_data(u0: VectorField, policy: PressureInit, eps: f64, mu: f64) -> Result<InitialData> {
    let grid = u0.grid();
    let p0 = match policy {
        PressureInit::Zero => ScalarField::zeros(grid),
        PressureInit::NsCompatible => crate::nsoracle::limit_pressure(&u0),
        PressureInit::Scaled { beta } => {
            if !(beta >= 0.0 && beta.is_finite()) {
                return Err(AcnsError::param(format!("beta must be non-negative, got {beta}")));
            }
            pressure_profile(grid).scaled(eps.powf(-beta))
        }
    };
    Ok(InitialData {
        state: ACState::new(u0, p0, eps, mu, 0.0)?,
        violates_id: policy.violates_well_prepared(),
    })
}

/// Advective step bound `0.5·spacing/max|u|`, capped at `dt_cap`.
pub fn cfl_bound(state: &ACState, dt_cap: f64) -> f64 {
    advective_bound(&state.u, dt_cap)
}

pub(crate) fn advective_bound(u: &VectorField, dt_cap: f64) -> f64 {
    let umax = u.max_magnitude();
    if umax > 0.0 {
        (CFL_NUMBER * u.grid().spacing() / umax).min(dt_cap)
    } else {
        dt_cap
    }
}

/// `N(u) = −(u·∇)u − ½(div u)u`, pseudo-spectrally.
pub fn nonlinear_rhs(state: &ACState, dealias: bool) -> VectorField {
    nonlinear_spectral(&state.u.transform(), dealias).inverse()
}

/// Spectral-space integrator holding `(û, √ε p̂)`.
#[derive(Debug, Clone)]
pub struct AcIntegrator {
    grid: Grid,
    eps: f64,
    mu: f64,
    options: AcOptions,
    u_hat: VectorSpectrum,
    c_hat: Spectrum,
    t: f64,
    tables: Vec<EtdTable>,
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

impl AcIntegrator {
    pub fn new(state: &ACState, options: AcOptions) -> Result<Self> {
        if let Some(f) = &options.forcing {
            state.grid().check_same(&f.grid())?;
        }
        let mut out = Self {
            grid: state.grid(),
            eps: state.eps,
            mu: state.mu,
            options,
            u_hat: VectorSpectrum::zeros(state.grid()),
            c_hat: Spectrum::zeros(state.grid()),
            t: state.t,
            tables: Vec::new(),
        };
        out.reset(state)?;
        Ok(out)
    }

    /// Reload the state from physical space, keeping cached coefficients.
    pub fn reset(&mut self, state: &ACState) -> Result<()> {
        self.grid.check_same(&state.grid())?;
        if state.eps != self.eps || state.mu != self.mu {
            return Err(AcnsError::param("reset must keep eps and mu"));
        }
        self.u_hat = state.u.transform();
        let mut c = state.p.transform().scaled(self.eps.sqrt());
        c.coeffs_mut()[0] = ZERO;
        self.c_hat = c;
        self.t = state.t;
        Ok(())
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn set_time(&mut self, t: f64) {
        self.t = t;
    }

    pub fn options(&self) -> &AcOptions {
        &self.options
    }

    pub fn state(&self) -> ACState {
        ACState {
            u: self.u_hat.inverse(),
            p: self.c_hat.scaled(1.0 / self.eps.sqrt()).inverse(),
            eps: self.eps,
            mu: self.mu,
            t: self.t,
        }
    }

    pub fn velocity_spectrum(&self) -> &VectorSpectrum {
        &self.u_hat
    }

    /// Largest stable step for the current velocity.
    pub fn step_bound(&self, dt_cap: f64) -> f64 {
        if self.options.nonlinear_on {
            advective_bound(&self.u_hat.inverse(), dt_cap)
        } else {
            dt_cap
        }
    }

    fn table(&mut self, h: f64) -> usize {
        if let Some(i) = self.tables.iter().position(|t| t.h == h) {
            return i;
        }
        if self.tables.len() >= 4 {
            self.tables.remove(0);
        }
        self.tables.push(EtdTable::new(&self.grid, self.eps, self.mu, h));
        self.tables.len() - 1
    }

    fn rhs(&self, u_hat: &VectorSpectrum, t: f64) -> VectorSpectrum {
        let mut n = if self.options.nonlinear_on {
            nonlinear_spectral(u_hat, self.options.dealias)
        } else {
            VectorSpectrum::zeros(self.grid)
        };
        if let Some(fs) = self.options.forcing.as_ref().and_then(|f| f.spectrum_at(t)) {
            n = n.axpy(1.0, &fs).expect("same grid");
        }
        n
    }

    /// One ETDRK2 step of size `h`.
    pub fn advance(&mut self, h: f64) -> Result<()> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(AcnsError::param(format!("dt must be positive, got {h}")));
        }
        let ti = self.table(h);
        let n0 = self.rhs(&self.u_hat, self.t);
        let (u_star, c_star) = apply_stage(&self.tables[ti], &self.u_hat, &self.c_hat, &n0, None);
        let n1 = self.rhs(&u_star, self.t + h);
        let (u_new, mut c_new) = apply_stage(&self.tables[ti], &u_star, &c_star, &n1, Some(&n0));
        c_new.coeffs_mut()[0] = ZERO;
        self.u_hat = u_new;
        self.c_hat = c_new;
        self.t += h;
        self.check_finite()
    }

    fn check_finite(&self) -> Result<()> {
        let dim = self.grid.dim();
        for idx in 0..self.grid.len() {
            for a in 0..dim {
                let c = self.u_hat.component(a).coeffs()[idx];
                if !(c.re.is_finite() && c.im.is_finite()) {
                    return Err(self.non_finite(idx, &format!("velocity component {a}")));
                }
            }
            let c = self.c_hat.coeffs()[idx];
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(self.non_finite(idx, "pressure"));
            }
        }
        Ok(())
    }

    fn non_finite(&self, idx: usize, what: &str) -> AcnsError {
        let k = self.grid.mode(idx);
        AcnsError::NonFinite {
            t: self.t,
            location: format!("{what} at mode k={:?}", &k[..self.grid.dim()]),
        }
    }
}

/// Either the first stage (`corr = None`): `E x + hφ₁ n`, or the correction
/// stage: `x + hφ₂ (n − n₀)`.
fn apply_stage(
    table: &EtdTable,
    u_hat: &VectorSpectrum,
    c_hat: &Spectrum,
    n: &VectorSpectrum,
    corr: Option<&VectorSpectrum>,
) -> (VectorSpectrum, Spectrum) {
    let grid = u_hat.grid();
    let dim = grid.dim();
    let mut u_out = u_hat.clone();
    let mut c_out = c_hat.clone();
    for idx in 0..grid.len() {
        let coeffs = table.get(idx);
        let mut uv = [ZERO; 3];
        let mut nv = [ZERO; 3];
        for a in 0..dim {
            uv[a] = u_hat.component(a).coeffs()[idx];
            nv[a] = n.component(a).coeffs()[idx];
            if let Some(n0) = corr {
                nv[a] -= n0.component(a).coeffs()[idx];
            }
        }
        let kd = grid.derivative_mode(idx);
        let kn = (kd[0] * kd[0] + kd[1] * kd[1] + kd[2] * kd[2]).sqrt();
        let (mut ua, mut na) = (ZERO, ZERO);
        let mut khat = [0.0; 3];
        if coeffs.block.is_some() {
            for a in 0..dim {
                khat[a] = kd[a] / kn;
                ua += uv[a] * khat[a];
                na += nv[a] * khat[a];
            }
        }
        let [e, hp1, hp2] = coeffs.transverse;
        let c = c_hat.coeffs()[idx];
        let (new_a, new_c) = match (&coeffs.block, corr) {
            (Some([ex, p1, _]), None) => (
                ex[0][0] * ua + ex[0][1] * c + p1[0][0] * na,
                ex[1][0] * ua + ex[1][1] * c + p1[1][0] * na,
            ),
            (Some([_, _, p2]), Some(_)) => (ua + p2[0][0] * na, c + p2[1][0] * na),
            (None, _) => (ZERO, c),
        };
        for a in 0..dim {
            let ut = uv[a] - ua * khat[a];
            let nt = nv[a] - na * khat[a];
            let new_t = match corr {
                None => ut * e + nt * hp1,
                Some(_) => ut + nt * hp2,
            };
            u_out.component_mut(a).coeffs_mut()[idx] = new_t + new_a * khat[a];
        }
        c_out.coeffs_mut()[idx] = new_c;
    }
    (u_out, c_out)
}

/// One ETDRK2 step from `state`.
pub fn step(state: &ACState, config: &ACStepConfig) -> Result<ACState> {
    if config.nonlinear_on {
        let bound = cfl_bound(state, f64::INFINITY);
        if config.dt > bound * (1.0 + 1e-12) {
            return Err(AcnsError::CflViolation { dt: config.dt, bound });
        }
    }
    let mut integ = AcIntegrator::new(state, config.options())?;
    integ.advance(config.dt)?;
    Ok(integ.state())
}

/// Step-size rule: `dt = min(cfl_bound, dt_cap)`, re-evaluated every
/// `recompute_every` steps and at every snapshot, then shrunk so an integer
/// number of steps lands on the next snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtPolicy {
    pub dt_cap: f64,
    pub recompute_every: usize,
}

impl Default for DtPolicy {
    fn default() -> Self {
        Self {
            dt_cap: DEFAULT_DT_CAP,
            recompute_every: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RunStats {
    pub steps: usize,
    pub dt_min: f64,
    pub dt_max: f64,
}

impl RunStats {
    fn record(&mut self, dt: f64, count: usize) {
        if self.steps == 0 {
            self.dt_min = dt;
            self.dt_max = dt;
        } else {
            self.dt_min = self.dt_min.min(dt);
            self.dt_max = self.dt_max.max(dt);
        }
        self.steps += count;
    }

    pub(crate) fn merge(&mut self, other: &RunStats) {
        if other.steps > 0 {
            self.record(other.dt_min, 0);
            self.record(other.dt_max, other.steps);
        }
    }
}

/// Advance one snapshot interval `[t_k, t_k + interval]` under `policy`.
/// `bound` returns the current stable step; `advance` takes one step.
pub(crate) fn advance_interval<S>(
    solver: &mut S,
    interval: f64,
    policy: &DtPolicy,
    stats: &mut RunStats,
    bound: impl Fn(&S) -> f64,
    mut advance: impl FnMut(&mut S, f64) -> Result<()>,
) -> Result<()> {
    let mut done = 0.0;
    while interval - done > 1e-12 * interval {
        let remaining = interval - done;
        let dt_max = bound(solver).min(policy.dt_cap);
        let steps_needed = (remaining / dt_max * (1.0 - 1e-12)).ceil().max(1.0);
        let dt = remaining / steps_needed;
        let take = (steps_needed as usize).min(policy.recompute_every.max(1));
        for _ in 0..take {
            advance(solver, dt)?;
        }
        stats.record(dt, take);
        done += take as f64 * dt;
    }
    Ok(())
}

/// Snapshot `k` sits at `t = k·snapshot_dt`; returns the number of intervals
/// between `t_start` and `t_final`.
pub(crate) fn interval_count(t_start: f64, t_final: f64, snapshot_dt: f64) -> Result<(usize, usize)> {
    if !(snapshot_dt > 0.0 && snapshot_dt.is_finite()) {
        return Err(AcnsError::param(format!("snapshot interval must be positive, got {snapshot_dt}")));
    }
    let first = t_start / snapshot_dt;
    let last = t_final / snapshot_dt;
    let (fi, li) = (first.round(), last.round());
    if (first - fi).abs() > 1e-8 || (last - li).abs() > 1e-8 || li < fi {
        return Err(AcnsError::param(format!(
            "times {t_start}..{t_final} are not multiples of the snapshot interval {snapshot_dt}"
        )));
    }
    Ok((fi as usize, li as usize))
}

/// Integrate from `initial` to `t_final`, invoking `observe` at the initial
/// state and at every multiple of `snapshot_dt`. At each snapshot the state
/// is round-tripped through physical space so that restarting from a stored
/// snapshot reproduces the continuation exactly.
pub fn integrate(
    initial: &ACState,
    options: AcOptions,
    policy: &DtPolicy,
    t_final: f64,
    snapshot_dt: f64,
    mut observe: impl FnMut(usize, &ACState) -> Result<()>,
) -> Result<RunStats> {
    let (first, last) = interval_count(initial.t, t_final, snapshot_dt)?;
    let mut integ = AcIntegrator::new(initial, options)?;
    let mut stats = RunStats::default();
    let mut state = initial.clone();
    observe(first, &state)?;
    for k in first..last {
        let mut local = RunStats::default();
        advance_interval(
            &mut integ,
            snapshot_dt,
            policy,
            &mut local,
            |s| s.step_bound(f64::INFINITY),
            |s, dt| s.advance(dt),
        )?;
        stats.merge(&local);
        integ.set_time((k + 1) as f64 * snapshot_dt);
        state = integ.state();
        integ.reset(&state)?;
        observe(k + 1, &state)?;
    }
    Ok(stats)
}

/// Snapshots of an integration at uniform spacing.
#[derive(Debug, Clone)]
pub struct AcTrajectory {
    pub snapshot_dt: f64,
    pub states: Vec<ACState>,
    pub stats: RunStats,
}

pub fn trajectory(
    initial: &ACState,
    options: AcOptions,
    policy: &DtPolicy,
    t_final: f64,
    snapshot_dt: f64,
) -> Result<AcTrajectory> {
    let mut states = Vec::new();
    let stats = integrate(initial, options, policy, t_final, snapshot_dt, |_, s| {
        states.push(s.clone());
        Ok(())
    })?;
    Ok(AcTrajectory {
        snapshot_dt,
        states,
        stats,
    })
}
