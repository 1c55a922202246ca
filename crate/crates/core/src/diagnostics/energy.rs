//! Energy bookkeeping and the a priori bounds that follow from it.

use serde::{Deserialize, Serialize};

use crate::acsolver::ACState;
use crate::error::{AcnsError, Result};
use crate::field::norms::cumulative_trapezoid;
use crate::field::ops::{advection, bessel_potential, divergence, project_gradient, project_solenoidal};
use crate::field::{homogeneous_norm, lp_norm, time_norm, ScalarField, VectorField, VectorSpectrum};
use crate::nsoracle::NSState;

use super::check_spacing;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub energy: f64,
    /// `μ∫₀^t ‖∇u‖²` (trapezoidal).
    pub dissipation_integral: f64,
    pub q_l2: f64,
    /// `(p, ‖Qu‖_{L^p})` pairs.
    pub q_lp: Vec<(f64, f64)>,
    pub p_l2: f64,
    #[serde(rename = "div_h-1")]
    pub div_h_minus1: f64,
    pub sqrt_eps_p_l2: f64,
}

/// `μ‖∇u‖²_{L²}` with the viscous symbol `|k|²`.
pub fn dissipation_rate(u: &VectorField, mu: f64) -> f64 {
    mu * homogeneous_norm(u, 1.0).powi(2)
}

/// How `∫ μ‖∇u‖² dt` is approximated between snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    Trapezoid,
    /// Per Fourier mode, `|k|²|û_k|²` is taken to decay exponentially between
    /// samples; the interval integral is then `h` times the logarithmic mean.
    /// Exact for linear viscous decay.
    ExponentialFit,
}

fn log_mean(a: f64, b: f64) -> f64 {
    if a <= 0.0 || b <= 0.0 {
        return 0.0;
    }
    let r = b / a;
    if (r - 1.0).abs() < 1e-6 {
        // series of (r − 1)/ln r about r = 1
        let x = r - 1.0;
        return a * (1.0 + x / 2.0 - x * x / 12.0);
    }
    (b - a) / r.ln()
}

fn modal_dissipation(u: &VectorSpectrum, mu: f64) -> Vec<f64> {
    let grid = u.grid();
    let scale = mu * grid.volume() / (grid.len() as f64).powi(2);
    (0..grid.len())
        .map(|idx| {
            let k2 = grid.mode_norm_sq(idx) as f64;
            let amp: f64 = u.components().iter().map(|c| c.coeffs()[idx].norm_sqr()).sum();
            scale * k2 * amp
        })
        .collect()
}

/// Running `∫₀^{t_j} μ‖∇u‖² dt` over uniformly spaced velocity snapshots.
pub fn dissipation_integral(velocities: &[&VectorField], mu: f64, dt: f64, quad: Quadrature) -> Vec<f64> {
    match quad {
        Quadrature::Trapezoid => {
            let rates: Vec<f64> = velocities.iter().map(|u| dissipation_rate(u, mu)).collect();
            cumulative_trapezoid(&rates, dt)
        }
        Quadrature::ExponentialFit => {
            let mut out = Vec::with_capacity(velocities.len());
            let mut acc = 0.0;
            let mut prev: Option<Vec<f64>> = None;
            for u in velocities {
                let cur = modal_dissipation(&u.transform(), mu);
                if let Some(p) = &prev {
                    acc += dt * p.iter().zip(&cur).map(|(a, b)| log_mean(*a, *b)).sum::<f64>();
                }
                out.push(acc);
                prev = Some(cur);
            }
            out
        }
    }
}

/// Per-snapshot records with `‖Qu‖_{L^p}` for each `p` in `q_exponents`.
pub fn records(states: &[ACState], snapshot_dt: f64, q_exponents: &[f64]) -> Result<Vec<DiagnosticsRecord>> {
    check_spacing(states.iter().map(|s| s.t), snapshot_dt)?;
    let Some(first) = states.first() else {
        return Ok(Vec::new());
    };
    let mu = first.mu;
    let velocities: Vec<&VectorField> = states.iter().map(|s| &s.u).collect();
    let dissipation = dissipation_integral(&velocities, mu, snapshot_dt, Quadrature::Trapezoid);
    states
        .iter()
        .zip(dissipation)
        .map(|(s, d)| {
            let u_hat = s.u.transform();
            let q = project_gradient(&u_hat);
            let q_field = q.inverse();
            let q_lp = q_exponents
                .iter()
                .map(|&p| Ok((p, lp_norm(&q_field, p)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(DiagnosticsRecord {
                t: s.t,
                energy: s.energy(),
                dissipation_integral: d,
                q_l2: q.l2_norm(),
                q_lp,
                p_l2: project_solenoidal(&u_hat).l2_norm(),
                div_h_minus1: bessel_potential(&divergence(&u_hat), -1.0).l2_norm(),
                sqrt_eps_p_l2: s.eps.sqrt() * s.p.inner(&s.p)?.sqrt(),
            })
        })
        .collect()
}

/// `|E(t) + μ∫₀^t‖∇u‖² − E(0)| / E(0)` per snapshot.
pub fn energy_identity_residual(states: &[ACState], snapshot_dt: f64) -> Result<Vec<f64>> {
    check_spacing(states.iter().map(|s| s.t), snapshot_dt)?;
    let Some(first) = states.first() else {
        return Ok(Vec::new());
    };
    let velocities: Vec<&VectorField> = states.iter().map(|s| &s.u).collect();
    let dissipation = dissipation_integral(&velocities, first.mu, snapshot_dt, Quadrature::Trapezoid);
    let e0 = first.energy();
    let defects: Vec<f64> = states
        .iter()
        .zip(&dissipation)
        .map(|(s, d)| (s.energy() + d - e0).abs())
        .collect();
    if e0 == 0.0 {
        if states.iter().any(|s| s.energy() != 0.0) {
            return Err(AcnsError::param("initial energy vanishes on a nonzero trajectory"));
        }
        return Ok(vec![0.0; states.len()]);
    }
    Ok(defects.into_iter().map(|d| d / e0).collect())
}

/// Energy inequality of an incompressible trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyInequality {
    pub t: Vec<f64>,
    /// `(½‖u(t)‖² + μ∫₀^t‖∇u‖² − ½‖u₀‖²) / ½‖u₀‖²`; positive values violate.
    pub excess: Vec<f64>,
    pub max_excess: f64,
}

pub fn energy_inequality(states: &[NSState], snapshot_dt: f64, quad: Quadrature) -> Result<EnergyInequality> {
    check_spacing(states.iter().map(|s| s.t), snapshot_dt)?;
    let Some(first) = states.first() else {
        return Err(AcnsError::InsufficientSamples { needed: 1, got: 0 });
    };
    let velocities: Vec<&VectorField> = states.iter().map(|s| &s.u).collect();
    let dissipation = dissipation_integral(&velocities, first.mu, snapshot_dt, quad);
    let e0 = first.energy();
    let scale = if e0 > 0.0 { e0 } else { 1.0 };
    let excess: Vec<f64> = states
        .iter()
        .zip(&dissipation)
        .map(|(s, d)| (s.energy() + d - e0) / scale)
        .collect();
    Ok(EnergyInequality {
        t: states.iter().map(|s| s.t).collect(),
        max_excess: excess.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x)),
        excess,
    })
}

/// Quantities bounded by the energy identity, per snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryRecord {
    pub t: f64,
    /// `ε‖p‖²`, bounded by `2E(0)`.
    pub eps_p_sq: f64,
    /// `‖u‖²`, bounded by `2E(0)`.
    pub u_sq: f64,
    /// `μ∫₀^t‖∇u‖²`, bounded by `E(0)`.
    pub dissipation: f64,
    /// `‖ε ∂t p‖_{H^{−1}} = ‖div u‖_{H^{−1}}`, bounded by `(2E(0))^{1/2}`.
    pub eps_pt_h_minus1: f64,
    pub u_l6: f64,
    pub advection_l1: f64,
    pub advection_l3_2: f64,
    pub div_u_l1: f64,
    pub div_u_l3_2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub initial_energy: f64,
    pub records: Vec<CorollaryRecord>,
    /// `‖u‖_{L²_t L⁶_x}`
    pub u_l2_l6: f64,
    /// `‖(u·∇)u‖` in `L²_t L¹_x` and `L¹_t L^{3/2}_x`.
    pub advection_l2_l1: f64,
    pub advection_l1_l3_2: f64,
    /// `‖(div u)u‖` in `L²_t L¹_x` and `L¹_t L^{3/2}_x`.
    pub div_u_l2_l1: f64,
    pub div_u_l1_l3_2: f64,
    /// Energy-derived bounds exceeded by more than 1%.
    pub violations: Vec<String>,
}

impl CorollaryReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn product_norms(u: &VectorField) -> Result<[f64; 4]> {
    let u_hat = u.transform();
    let adv = advection(u, &u_hat)?;
    let div = divergence(&u_hat).inverse();
    let comps = u
        .components()
        .iter()
        .map(|c| c.mul(&div))
        .collect::<Result<Vec<ScalarField>>>()?;
    let du = VectorField::from_components(comps)?;
    Ok([lp_norm(&adv, 1.0)?, lp_norm(&adv, 1.5)?, lp_norm(&du, 1.0)?, lp_norm(&du, 1.5)?])
}

pub fn corollary_bounds_monitor(states: &[ACState], snapshot_dt: f64) -> Result<CorollaryReport> {
    check_spacing(states.iter().map(|s| s.t), snapshot_dt)?;
    let Some(first) = states.first() else {
        return Err(AcnsError::InsufficientSamples { needed: 1, got: 0 });
    };
    let e0 = first.energy();
    let velocities: Vec<&VectorField> = states.iter().map(|s| &s.u).collect();
    let dissipation = dissipation_integral(&velocities, first.mu, snapshot_dt, Quadrature::Trapezoid);
    let mut records = Vec::with_capacity(states.len());
    let mut violations = Vec::new();
    let tol = 1.01;
    for (s, d) in states.iter().zip(dissipation) {
        let [advection_l1, advection_l3_2, div_u_l1, div_u_l3_2] = product_norms(&s.u)?;
        let r = CorollaryRecord {
            t: s.t,
            eps_p_sq: s.eps * s.p.inner(&s.p)?,
            u_sq: s.u.inner(&s.u)?,
            dissipation: d,
            eps_pt_h_minus1: bessel_potential(&divergence(&s.u.transform()), -1.0).l2_norm(),
            u_l6: lp_norm(&s.u, 6.0)?,
            advection_l1,
            advection_l3_2,
            div_u_l1,
            div_u_l3_2,
        };
        let checks = [
            ("ε‖p‖²", r.eps_p_sq, 2.0 * e0),
            ("‖u‖²", r.u_sq, 2.0 * e0),
            ("μ∫‖∇u‖²", r.dissipation, e0),
            ("‖ε∂t p‖_{H^-1}", r.eps_pt_h_minus1, (2.0 * e0).sqrt()),
        ];
        for (name, value, bound) in checks {
            if value > tol * bound {
                violations.push(format!("{name} = {value:.6e} exceeds {bound:.6e} at t = {}", s.t));
            }
        }
        records.push(r);
    }
    let series = |f: fn(&CorollaryRecord) -> f64| records.iter().map(f).collect::<Vec<_>>();
    let time = |f: fn(&CorollaryRecord) -> f64, q: f64| -> Result<f64> {
        if records.len() < 2 {
            return Ok(0.0);
        }
        time_norm(&series(f), snapshot_dt, q)
    };
    Ok(CorollaryReport {
        initial_energy: e0,
        u_l2_l6: time(|r| r.u_l6, 2.0)?,
        advection_l2_l1: time(|r| r.advection_l1, 2.0)?,
        advection_l1_l3_2: time(|r| r.advection_l3_2, 1.0)?,
        div_u_l2_l1: time(|r| r.div_u_l1, 2.0)?,
        div_u_l1_l3_2: time(|r| r.div_u_l3_2, 1.0)?,
        records,
        violations,
    })
}
