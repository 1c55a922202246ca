//! Per-run diagnostic tables, recomputed from stored snapshots.

use std::str::FromStr;

use serde::Serialize;

use super::store::{RunDir, RunKind};
use crate::diagnostics::{energy_identity_residual, energy_inequality, records, time_shift_modulus, Quadrature};
use crate::error::{AcnsError, Result};
use crate::field::VectorField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Energy,
    QNorm,
    Shift,
}

impl FromStr for Quantity {
    type Err = AcnsError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "energy" => Ok(Quantity::Energy),
            "qnorm" => Ok(Quantity::QNorm),
            "shift" => Ok(Quantity::Shift),
            other => Err(AcnsError::Config(format!("unknown quantity {other:?}; expected energy, qnorm or shift"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct EnergyRow {
    t: f64,
    energy: f64,
    dissipation_integral: Option<f64>,
    relative_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
struct QRow {
    t: f64,
    q_l2: f64,
    q_l4: f64,
    q_l6: f64,
    p_l2: f64,
    #[serde(rename = "div_h-1")]
    div_h_minus1: f64,
    sqrt_eps_p_l2: f64,
}

#[derive(Debug, Clone, Serialize)]
struct ShiftRow {
    h: f64,
    norm: f64,
    bound: f64,
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| AcnsError::Config(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| AcnsError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Shifts `m·dt` for `m = 2, 4, 8, …` below half the trajectory.
pub fn default_shifts(snapshots: usize, dt: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut m = 2;
    while 2 * m < snapshots {
        out.push(m as f64 * dt);
        m *= 2;
    }
    out
}

/// CSV table of `quantity` for the run in `run`.
pub fn diag(run: &RunDir, quantity: Quantity) -> Result<String> {
    let dt = run.meta.config.snapshot_dt;
    match (quantity, run.meta.kind) {
        (Quantity::Energy, RunKind::Ac) => {
            let states = run.load_ac_states()?;
            let residual = energy_identity_residual(&states, dt)?;
            let rows: Vec<EnergyRow> = records(&states, dt, &[])?
                .into_iter()
                .zip(residual)
                .map(|(r, res)| EnergyRow {
                    t: r.t,
                    energy: r.energy,
                    dissipation_integral: Some(r.dissipation_integral),
                    relative_residual: res,
                })
                .collect();
            to_csv(&rows)
        }
        (Quantity::Energy, RunKind::Ns) => {
            let states = run.load_ns_states()?;
            let ineq = energy_inequality(&states, dt, Quadrature::ExponentialFit)?;
            let rows: Vec<EnergyRow> = states
                .iter()
                .zip(&ineq.excess)
                .map(|(s, &x)| EnergyRow {
                    t: s.t,
                    energy: s.energy(),
                    dissipation_integral: None,
                    relative_residual: x,
                })
                .collect();
            to_csv(&rows)
        }
        (Quantity::QNorm, RunKind::Ac) => {
            let states = run.load_ac_states()?;
            let rows: Vec<QRow> = records(&states, dt, &[4.0, 6.0])?
                .into_iter()
                .map(|r| QRow {
                    t: r.t,
                    q_l2: r.q_l2,
                    q_l4: r.q_lp[0].1,
                    q_l6: r.q_lp[1].1,
                    p_l2: r.p_l2,
                    div_h_minus1: r.div_h_minus1,
                    sqrt_eps_p_l2: r.sqrt_eps_p_l2,
                })
                .collect();
            to_csv(&rows)
        }
        (Quantity::QNorm, RunKind::Ns) => Err(AcnsError::Config(
            "qnorm needs an artificial-compressibility run".into(),
        )),
        (Quantity::Shift, _) => {
            let velocities = run.load_velocities()?;
            let refs: Vec<&VectorField> = velocities.iter().collect();
            let shifts = default_shifts(velocities.len(), dt);
            let modulus = time_shift_modulus(&run.times(), &refs, dt, &shifts)?;
            let rows: Vec<ShiftRow> = modulus
                .shifts
                .iter()
                .zip(&modulus.norms)
                .map(|(&h, &norm)| ShiftRow {
                    h,
                    norm,
                    bound: modulus.constant * h.powf(crate::diagnostics::SHIFT_EXPONENT),
                })
                .collect();
            to_csv(&rows)
        }
    }
}
