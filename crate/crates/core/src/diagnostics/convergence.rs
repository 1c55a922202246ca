//! Convergence measurements across `ε`: the gradient part `Qu^ε`, the
//! incompressible oracle, and the limit pressure.

use serde::{Deserialize, Serialize};

use super::bank::{max_abs, TestBank};
use super::check_spacing;
use super::rates::{fit_rate, RateFit};
use crate::acsolver::{make_initial_data, trajectory, ACState, AcOptions, DtPolicy, PressureInit};
use crate::error::{AcnsError, Result};
use crate::field::ops::{project_gradient, project_solenoidal};
use crate::field::{lp_norm, time_norm, VectorField};
use crate::mollify::TorusMollifier;
use crate::nsoracle::{limit_pressure, NSState};

/// Exponent of `ε` in the bound `‖Qu^ε‖_{L²_t L^p_x} ≤ C ε^{(6−p)/(36p)}`.
pub fn q_decay_exponent(p: f64) -> f64 {
    (6.0 - p) / (36.0 * p)
}

/// Mollifier scale balancing the two halves of the `Qu^ε` estimate.
pub fn balancing_alpha(eps: f64) -> f64 {
    eps.powf(1.0 / 18.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QMeasurement {
    pub eps: f64,
    /// `‖Qu^ε‖_{L²_t L^p_x}`
    pub strong: f64,
    /// `max_φ |∫₀^T ⟨Qu^ε, φ⟩ dt|` over the test bank.
    pub weak: f64,
    pub alpha: f64,
    /// `‖Qu^ε − ψ_α∗Qu^ε‖_{L²_t L^p_x}`
    pub remainder: f64,
    /// `‖ψ_α∗Qu^ε‖_{L²_t L^p_x}`
    pub smooth: f64,
    pub under_resolved: bool,
}

pub fn q_measure(states: &[ACState], snapshot_dt: f64, p: f64) -> Result<QMeasurement> {
    check_spacing(states.iter().map(|s| s.t), snapshot_dt)?;
    if states.len() < 2 {
        return Err(AcnsError::InsufficientSamples {
            needed: 2,
            got: states.len(),
        });
    }
    let eps = states[0].eps;
    let grid = states[0].grid();
    let alpha = balancing_alpha(eps);
    let mollifier = TorusMollifier::new(grid, alpha)?;
    let bank = TestBank::new(grid, (states.len() - 1) as f64 * snapshot_dt)?;
    let (mut strong, mut remainder, mut smooth) = (Vec::new(), Vec::new(), Vec::new());
    let mut pairings = Vec::with_capacity(states.len());
    for s in states {
        let q_hat = project_gradient(&s.u.transform());
        let q = q_hat.inverse();
        let sm = mollifier.apply_vector_spectrum(&q_hat)?.inverse();
        strong.push(lp_norm(&q, p)?);
        remainder.push(lp_norm(&q.sub(&sm)?, p)?);
        smooth.push(lp_norm(&sm, p)?);
        pairings.push(bank.vector_sample(&q_hat)?);
    }
    Ok(QMeasurement {
        eps,
        strong: time_norm(&strong, snapshot_dt, 2.0)?,
        weak: max_abs(&bank.integrate(pairings, snapshot_dt)?),
        alpha,
        remainder: time_norm(&remainder, snapshot_dt, 2.0)?,
        smooth: time_norm(&smooth, snapshot_dt, 2.0)?,
        under_resolved: mollifier.under_resolved(),
    })
}

#[derive(Debug, Clone)]
pub struct QDecayConfig {
    pub u0: VectorField,
    pub p0: PressureInit,
    pub mu: f64,
    pub eps_list: Vec<f64>,
    pub p: f64,
    pub horizon: f64,
    pub snapshot_dt: f64,
    pub policy: DtPolicy,
    pub options: AcOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QDecayStudy {
    pub p: f64,
    pub paper_exponent: f64,
    pub measurements: Vec<QMeasurement>,
    /// Runs dropped from the fits, with the reason.
    pub excluded: Vec<(f64, String)>,
    /// Fit of `strong` against `ε`; `None` if some norm vanishes.
    pub strong_fit: Option<RateFit>,
    pub weak_fit: Option<RateFit>,
}

fn spans_decades(values: &[f64], decades: f64) -> bool {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(0.0, f64::max);
    lo > 0.0 && (hi / lo).log10() >= decades - 1e-9
}

/// Assemble the study from per-`ε` measurements.
pub fn q_decay_from_measurements(p: f64, measurements: Vec<QMeasurement>, excluded: Vec<(f64, String)>) -> Result<QDecayStudy> {
    if measurements.len() < super::rates::MIN_FIT_POINTS {
        return Err(AcnsError::Fit(format!(
            "only {} stable runs remain; at least {} are needed",
            measurements.len(),
            super::rates::MIN_FIT_POINTS
        )));
    }
    let eps: Vec<f64> = measurements.iter().map(|m| m.eps).collect();
    let strong: Vec<f64> = measurements.iter().map(|m| m.strong).collect();
    let weak: Vec<f64> = measurements.iter().map(|m| m.weak).collect();
    Ok(QDecayStudy {
        p,
        paper_exponent: q_decay_exponent(p),
        strong_fit: fit_rate(&eps, &strong).ok(),
        weak_fit: fit_rate(&eps, &weak).ok(),
        measurements,
        excluded,
    })
}

/// Run the artificial-compressibility solver for every `ε` and measure `Qu^ε`.
pub fn q_decay_study(cfg: &QDecayConfig) -> Result<QDecayStudy> {
    if !(4.0..=6.0).contains(&cfg.p) {
        return Err(AcnsError::param(format!("p must lie in [4, 6], got {}", cfg.p)));
    }
    if cfg.eps_list.len() < super::rates::MIN_FIT_POINTS || !spans_decades(&cfg.eps_list, 2.0) {
        return Err(AcnsError::param("the ε list needs at least 4 values spanning two decades"));
    }
    let mut measurements = Vec::new();
    let mut excluded = Vec::new();
    for &eps in &cfg.eps_list {
        let init = make_initial_data(cfg.u0.clone(), cfg.p0, eps, cfg.mu)?;
        match trajectory(&init.state, cfg.options.clone(), &cfg.policy, cfg.horizon, cfg.snapshot_dt) {
            Ok(traj) => measurements.push(q_measure(&traj.states, cfg.snapshot_dt, cfg.p)?),
            Err(e @ (AcnsError::NonFinite { .. } | AcnsError::CflViolation { .. })) => {
                excluded.push((eps, e.to_string()));
            }
            Err(e) => return Err(e),
        }
    }
    q_decay_from_measurements(cfg.p, measurements, excluded)
}

/// Distances between an artificial-compressibility run and the incompressible
/// oracle from the same data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub eps: f64,
    /// `‖Pu^ε − u‖_{L²_t L²_x}`
    pub pu_error: f64,
    /// `‖u^ε − u‖_{L²_t L²_x}`
    pub u_error: f64,
    /// `‖u‖_{L²_t L²_x}` of the oracle, for relative errors.
    pub oracle_norm: f64,
    /// `∫₀^T χ⟨p^ε − p, φ_j⟩ dt` over the test bank, `p` the limit pressure.
    pub pressure_pairings: Vec<f64>,
    pub pressure_pairing_max: f64,
    /// `max_φ |∫₀^T ⟨Qu^ε, φ⟩ dt|`
    pub q_weak: f64,
}

pub fn compare_with_oracle(ac: &[ACState], ns: &[NSState], snapshot_dt: f64) -> Result<OracleComparison> {
    check_spacing(ac.iter().map(|s| s.t), snapshot_dt)?;
    if ac.len() != ns.len() || ac.len() < 2 {
        return Err(AcnsError::MissingOracle(format!(
            "{} artificial-compressibility snapshots but {} oracle snapshots",
            ac.len(),
            ns.len()
        )));
    }
    for (a, b) in ac.iter().zip(ns) {
        if (a.t - b.t).abs() > 1e-9 * snapshot_dt {
            return Err(AcnsError::MissingOracle(format!("oracle has no snapshot at t = {}", a.t)));
        }
        a.grid().check_same(&b.grid())?;
    }
    let grid = ac[0].grid();
    let bank = TestBank::new(grid, (ac.len() - 1) as f64 * snapshot_dt)?;
    let (mut pu, mut u, mut oracle) = (Vec::new(), Vec::new(), Vec::new());
    let (mut p_pairs, mut q_pairs) = (Vec::new(), Vec::new());
    for (a, b) in ac.iter().zip(ns) {
        let u_hat = a.u.transform();
        pu.push(project_solenoidal(&u_hat).inverse().sub(&b.u)?.l2_norm());
        u.push(a.u.sub(&b.u)?.l2_norm());
        oracle.push(b.u.l2_norm());
        q_pairs.push(bank.vector_sample(&project_gradient(&u_hat))?);
        p_pairs.push(bank.scalar_sample(&a.p.sub(&limit_pressure(&b.u))?.transform())?);
    }
    let pressure_pairings = bank.integrate(p_pairs, snapshot_dt)?;
    Ok(OracleComparison {
        eps: ac[0].eps,
        pu_error: time_norm(&pu, snapshot_dt, 2.0)?,
        u_error: time_norm(&u, snapshot_dt, 2.0)?,
        oracle_norm: time_norm(&oracle, snapshot_dt, 2.0)?,
        pressure_pairing_max: max_abs(&pressure_pairings),
        pressure_pairings,
        q_weak: max_abs(&bank.integrate(q_pairs, snapshot_dt)?),
    })
}
