//! Incompressible Navier–Stokes reference solver and limit-pressure recovery.
//!
//! Uses the same pseudo-spectral discretisation and ETDRK2 family as
//! [`crate::acsolver`], with the Leray projector applied to the nonlinear
//! term, so that comparisons between the two isolate the effect of `ε`.

use std::collections::HashMap;
use std::sync::Arc;


use crate::acsolver::{
    advance_interval, advective_bound, interval_count, nonlinear_spectral, scalar_phi, DtPolicy, ForcingSeries,
    RunStats, ACState,
};
use crate::error::{AcnsError, Result};
use crate::field::ops::{
    advection, bessel_potential, dealias, dealias_vector, divergence, gradient, inverse_laplacian, partial,
    project_gradient, project_solenoidal, vector_laplacian,
};
use crate::field::{Grid, ScalarField, VectorField, VectorSpectrum};

#[derive(Debug, Clone, PartialEq)]
pub struct NSState {
    pub u: VectorField,
    pub mu: f64,
    pub t: f64,
}

impl NSState {
    /// Projects `u` onto divergence-free fields.
    pub fn new(u: VectorField, mu: f64, t: f64) -> Result<Self> {
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(AcnsError::param(format!("mu must be non-negative, got {mu}")));
        }
        let u = project_solenoidal(&u.transform()).inverse();
        Ok(Self { u, mu, t })
    }

    pub fn grid(&self) -> Grid {
        self.u.grid()
    }

    pub fn energy(&self) -> f64 {
        0.5 * self.u.inner(&self.u).expect("same grid")
    }
}

/// Per-`|k|²` table of `(e^{-μ|k|²h}, hφ₁, hφ₂)`.
#[derive(Debug, Clone)]
struct ViscousTable {
    h: f64,
    coeffs: Vec<[f64; 3]>,
}

impl ViscousTable {
    fn new(grid: &Grid, mu: f64, h: f64) -> Self {
        let mut cache: HashMap<i64, [f64; 3]> = HashMap::new();
        let coeffs = (0..grid.len())
            .map(|idx| {
                let k2 = grid.mode_norm_sq(idx);
                *cache.entry(k2).or_insert_with(|| {
                    let (e, p1, p2) = scalar_phi(-mu * k2 as f64 * h);
                    [e, h * p1, h * p2]
                })
            })
            .collect();
        Self { h, coeffs }
    }
}

#[derive(Debug, Clone)]
pub struct NsIntegrator {
    grid: Grid,
    mu: f64,
    dealias: bool,
    forcing: Option<Arc<ForcingSeries>>,
    u_hat: VectorSpectrum,
    t: f64,
    tables: Vec<ViscousTable>,
}

impl NsIntegrator {
    pub fn new(state: &NSState, dealias: bool, forcing: Option<Arc<ForcingSeries>>) -> Result<Self> {
        if let Some(f) = &forcing {
            state.grid().check_same(&f.grid())?;
        }
        Ok(Self {
            grid: state.grid(),
            mu: state.mu,
            dealias,
            forcing,
            u_hat: project_solenoidal(&state.u.transform()),
            t: state.t,
            tables: Vec::new(),
        })
    }

    pub fn reset(&mut self, state: &NSState) -> Result<()> {
        self.grid.check_same(&state.grid())?;
        self.u_hat = project_solenoidal(&state.u.transform());
        self.t = state.t;
        Ok(())
    }

    pub fn state(&self) -> NSState {
        NSState {
            u: self.u_hat.inverse(),
            mu: self.mu,
            t: self.t,
        }
    }

    pub fn set_time(&mut self, t: f64) {
        self.t = t;
    }

    pub fn step_bound(&self, dt_cap: f64) -> f64 {
        advective_bound(&self.u_hat.inverse(), dt_cap)
    }

    fn table(&mut self, h: f64) -> usize {
        if let Some(i) = self.tables.iter().position(|t| t.h == h) {
            return i;
        }
        if self.tables.len() >= 4 {
            self.tables.remove(0);
        }
        self.tables.push(ViscousTable::new(&self.grid, self.mu, h));
        self.tables.len() - 1
    }

    fn rhs(&self, u_hat: &VectorSpectrum, t: f64) -> VectorSpectrum {
        let mut n = nonlinear_spectral(u_hat, self.dealias);
        if let Some(fs) = self.forcing.as_ref().and_then(|f| f.spectrum_at(t)) {
            n = n.axpy(1.0, &fs).expect("same grid");
        }
        project_solenoidal(&n)
    }

    pub fn advance(&mut self, h: f64) -> Result<()> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(AcnsError::param(format!("dt must be positive, got {h}")));
        }
        let ti = self.table(h);
        let n0 = self.rhs(&self.u_hat, self.t);
        let table = &self.tables[ti];
        let mut star = self.u_hat.clone();
        for a in 0..self.grid.dim() {
            let n = n0.component(a).coeffs();
            for (idx, c) in star.component_mut(a).coeffs_mut().iter_mut().enumerate() {
                let [e, p1, _] = table.coeffs[idx];
                *c = *c * e + n[idx] * p1;
            }
        }
        let n1 = self.rhs(&star, self.t + h);
        let table = &self.tables[ti];
        for a in 0..self.grid.dim() {
            let (n0a, n1a) = (n0.component(a).coeffs(), n1.component(a).coeffs());
            for (idx, c) in star.component_mut(a).coeffs_mut().iter_mut().enumerate() {
                *c += (n1a[idx] - n0a[idx]) * table.coeffs[idx][2];
            }
        }
        self.u_hat = project_solenoidal(&star);
        self.t += h;
        for a in 0..self.grid.dim() {
            if let Some(idx) = self.u_hat.component(a).coeffs().iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
                let k = self.grid.mode(idx);
                return Err(AcnsError::NonFinite {
                    t: self.t,
                    location: format!("velocity component {a} at mode k={:?}", &k[..self.grid.dim()]),
                });
            }
        }
        Ok(())
    }
}

/// One ETDRK2 step of the projected equations.
pub fn ns_step(state: &NSState, dt: f64) -> Result<NSState> {
    let bound = advective_bound(&state.u, f64::INFINITY);
    if dt > bound * (1.0 + 1e-12) {
        return Err(AcnsError::CflViolation { dt, bound });
    }
    let mut integ = NsIntegrator::new(state, true, None)?;
    integ.advance(dt)?;
    Ok(integ.state())
}

/// Same snapshot contract as [`crate::acsolver::integrate`].
pub fn integrate(
    initial: &NSState,
    dealias: bool,
    forcing: Option<Arc<ForcingSeries>>,
    policy: &DtPolicy,
    t_final: f64,
    snapshot_dt: f64,
    mut observe: impl FnMut(usize, &NSState) -> Result<()>,
) -> Result<RunStats> {
    let (first, last) = interval_count(initial.t, t_final, snapshot_dt)?;
    let mut integ = NsIntegrator::new(initial, dealias, forcing)?;
    let mut stats = RunStats::default();
    let mut state = integ.state();
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

#[derive(Debug, Clone)]
pub struct NsTrajectory {
    pub snapshot_dt: f64,
    pub states: Vec<NSState>,
    pub stats: RunStats,
}

pub fn trajectory(
    initial: &NSState,
    dealias: bool,
    forcing: Option<Arc<ForcingSeries>>,
    policy: &DtPolicy,
    t_final: f64,
    snapshot_dt: f64,
) -> Result<NsTrajectory> {
    let mut states = Vec::new();
    let stats = integrate(initial, dealias, forcing, policy, t_final, snapshot_dt, |_, s| {
        states.push(s.clone());
        Ok(())
    })?;
    Ok(NsTrajectory {
        snapshot_dt,
        states,
        stats,
    })
}

fn dealiased(u: &VectorField) -> VectorSpectrum {
    let mut s = u.transform();
    dealias_vector(&mut s);
    s
}

/// Pressure of the limit flow from `-Δp = div((u·∇)u)`, mean zero.
pub fn limit_pressure(u: &VectorField) -> ScalarField {
    limit_pressure_forms(u).0
}

/// Both spectral formulas `(−Δ⁻¹div((u·∇)u), −Δ⁻¹tr((Du)²))` on 2/3-truncated
/// data; they coincide when `div u = 0`.
pub fn limit_pressure_forms(u: &VectorField) -> (ScalarField, ScalarField) {
    let grid = u.grid();
    let dim = grid.dim();
    let u_hat = dealiased(u);
    let u_phys = u_hat.inverse();
    let mut adv = advection(&u_phys, &u_hat).expect("same grid").transform();
    dealias_vector(&mut adv);
    let mut div_adv = divergence(&adv);
    dealias(&mut div_adv);
    let p_adv = inverse_laplacian(&div_adv).scaled(-1.0).inverse();

    let d: Vec<Vec<ScalarField>> = (0..dim)
        .map(|i| (0..dim).map(|j| partial(u_hat.component(i), j).inverse()).collect())
        .collect();
    let mut trace = vec![0.0; grid.len()];
    for i in 0..dim {
        for j in 0..dim {
            for ((t, a), b) in trace.iter_mut().zip(d[i][j].values()).zip(d[j][i].values()) {
                *t += a * b;
            }
        }
    }
    let mut trace_hat = ScalarField::from_values(grid, trace).expect("grid length").transform();
    dealias(&mut trace_hat);
    let p_trace = inverse_laplacian(&trace_hat).scaled(-1.0).inverse();
    (p_adv, p_trace)
}

/// Limit pressure with the cross-check between the two formulas and the
/// divergence of the input.
#[derive(Debug, Clone)]
pub struct LimitPressure {
    pub p: ScalarField,
    /// `‖p_adv − p_trace‖_{L²} / max(‖p_adv‖_{L²}, tiny)`.
    pub formula_gap: f64,
    pub divergence_l2: f64,
}

pub fn limit_pressure_checked(u: &VectorField) -> LimitPressure {
    let (p_adv, p_trace) = limit_pressure_forms(u);
    let diff = p_adv.sub(&p_trace).expect("same grid");
    let norm = p_adv.inner(&p_adv).expect("same grid").sqrt();
    let gap = diff.inner(&diff).expect("same grid").sqrt() / norm.max(f64::MIN_POSITIVE);
    let divergence_l2 = divergence(&u.transform()).l2_norm();
    LimitPressure {
        p: p_adv,
        formula_gap: if norm == 0.0 { 0.0 } else { gap },
        divergence_l2,
    }
}

fn h_minus_one(v: &VectorSpectrum) -> f64 {
    v.components()
        .iter()
        .map(|c| bessel_potential(c, -1.0).l2_norm().powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Residual of a gradient-part balance in `W^{-1,2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResidual {
    pub absolute: f64,
    /// Absolute residual over the sum of the norms of the individual terms.
    pub relative: f64,
}

impl IdentityResidual {
    fn from_terms(terms: &[VectorSpectrum]) -> Self {
        let mut sum = terms[0].clone();
        for t in &terms[1..] {
            sum = sum.axpy(1.0, t).expect("same grid");
        }
        let absolute = h_minus_one(&sum);
        let scale: f64 = terms.iter().map(h_minus_one).sum();
        Self {
            absolute,
            relative: if scale > 0.0 { absolute / scale } else { 0.0 },
        }
    }
}

fn skew_pieces(u_hat: &VectorSpectrum) -> (VectorSpectrum, VectorSpectrum) {
    // div(u⊗u) and u·div u, each dealiased
    let grid = u_hat.grid();
    let dim = grid.dim();
    let mut input = u_hat.clone();
    dealias_vector(&mut input);
    let u = input.inverse();
    let div_u = divergence(&input).inverse();
    let mut flux = VectorSpectrum::zeros(grid);
    let mut udiv = VectorSpectrum::zeros(grid);
    for i in 0..dim {
        let ui = u.component(i);
        for j in 0..dim {
            let prod = ui.mul(u.component(j)).expect("same grid").transform();
            let d = partial(&prod, j);
            for (o, v) in flux.component_mut(i).coeffs_mut().iter_mut().zip(d.coeffs()) {
                *o += v;
            }
        }
        *udiv.component_mut(i) = ui.mul(&div_u).expect("same grid").transform();
    }
    dealias_vector(&mut flux);
    dealias_vector(&mut udiv);
    (flux, udiv)
}

/// Residual of `∇p = μΔQu − Q(div(u⊗u) + c·u div Qu)` at one snapshot, with
/// `c = coefficient` (the stated form uses `3/2`).
pub fn limit_gradient_identity(state: &ACState, coefficient: f64) -> IdentityResidual {
    let u_hat = state.u.transform();
    let grad_p = gradient(&state.p.transform());
    let q = project_gradient(&u_hat);
    let visc = vector_laplacian(&q).scaled(-state.mu);
    let (flux, udiv) = skew_pieces(&u_hat);
    let conv = project_gradient(&flux.axpy(coefficient, &udiv).expect("same grid"));
    IdentityResidual::from_terms(&[grad_p, visc, conv])
}

/// Gradient part of the momentum equation including the time derivative,
/// `∇p + ∂tQu − μΔQu + Q(div(u⊗u) − ½u div u − f) = 0`.
pub fn gradient_balance(state: &ACState, dqu_dt: &VectorField, forcing: Option<&VectorField>) -> Result<IdentityResidual> {
    state.grid().check_same(&dqu_dt.grid())?;
    let u_hat = state.u.transform();
    let grad_p = gradient(&state.p.transform());
    let q = project_gradient(&u_hat);
    let visc = vector_laplacian(&q).scaled(-state.mu);
    let (flux, udiv) = skew_pieces(&u_hat);
    let mut conv = flux.axpy(-0.5, &udiv).expect("same grid");
    if let Some(f) = forcing {
        state.grid().check_same(&f.grid())?;
        conv = conv.axpy(-1.0, &f.transform())?;
    }
    let dq = project_gradient(&dqu_dt.transform());
    Ok(IdentityResidual::from_terms(&[grad_p, dq, visc, project_gradient(&conv)]))
}

/// `∂tQu` from the right-hand side of the momentum equation at `state`.
pub fn gradient_rate(state: &ACState, dealias_on: bool, forcing: Option<&VectorField>) -> Result<VectorField> {
    let u_hat = state.u.transform();
    let mut rhs = nonlinear_spectral(&u_hat, dealias_on)
        .axpy(-1.0, &gradient(&state.p.transform()))?
        .axpy(state.mu, &vector_laplacian(&u_hat))?;
    if let Some(f) = forcing {
        rhs = rhs.axpy(1.0, &f.transform())?;
    }
    Ok(project_gradient(&rhs).inverse())
}


#[cfg(test)]
mod tests;
