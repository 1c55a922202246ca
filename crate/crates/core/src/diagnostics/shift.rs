//! Time-shift modulus `‖Pu(·+h) − Pu‖_{L²([0,T−h]×Ω)}`.

use serde::{Deserialize, Serialize};

use super::check_spacing;
use super::rates::{fit_rate, RateFit};
use crate::error::{AcnsError, Result};
use crate::field::norms::trapezoid;
use crate::field::ops::project_solenoidal;
use crate::field::VectorField;

/// Exponent of the bound `‖Pu^ε(·+h) − Pu^ε‖ ≤ C h^{1/5}`.
pub const SHIFT_EXPONENT: f64 = 0.2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftModulus {
    pub shifts: Vec<f64>,
    pub norms: Vec<f64>,
    /// `C = norm(h_max) / h_max^{1/5}`.
    pub constant: f64,
    /// Whether `norm(h) ≤ C h^{1/5}` for every shift.
    pub bound_holds: bool,
    /// `None` when some norm vanishes.
    pub fit: Option<RateFit>,
}

/// Shift norms of `Pv` over the snapshots `velocities` at spacing `snapshot_dt`.
pub fn shift_norms(velocities: &[&VectorField], snapshot_dt: f64, shifts: &[f64]) -> Result<Vec<f64>> {
    let solenoidal: Vec<VectorField> = velocities.iter().map(|u| project_solenoidal(&u.transform()).inverse()).collect();
    let last = velocities.len().saturating_sub(1);
    shifts
        .iter()
        .map(|&h| {
            let m = (h / snapshot_dt).round();
            if m < 1.0 || (h / snapshot_dt - m).abs() > 1e-6 {
                return Err(AcnsError::param(format!(
                    "shift {h} is not a positive multiple of the snapshot spacing {snapshot_dt}"
                )));
            }
            let m = m as usize;
            if m >= last {
                return Err(AcnsError::InsufficientSamples {
                    needed: m + 2,
                    got: velocities.len(),
                });
            }
            let sq: Vec<f64> = (0..=last - m)
                .map(|i| {
                    let d = solenoidal[i + m].sub(&solenoidal[i])?;
                    d.inner(&d)
                })
                .collect::<Result<_>>()?;
            Ok(trapezoid(&sq, snapshot_dt).sqrt())
        })
        .collect()
}

/// Shift norms of a trajectory with times `times`, with the upper-bound check.
pub fn time_shift_modulus(times: &[f64], velocities: &[&VectorField], snapshot_dt: f64, shifts: &[f64]) -> Result<ShiftModulus> {
    check_spacing(times.iter().copied(), snapshot_dt)?;
    if times.len() != velocities.len() {
        return Err(AcnsError::param("times and velocities differ in length"));
    }
    if shifts.iter().any(|&h| h < 2.0 * snapshot_dt * (1.0 - 1e-9)) {
        return Err(AcnsError::param(format!("shifts must be at least twice the snapshot spacing {snapshot_dt}")));
    }
    let norms = shift_norms(velocities, snapshot_dt, shifts)?;
    let (i_max, h_max) = shifts
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, &h)| if h > acc.1 { (i, h) } else { acc });
    let constant = norms[i_max] / h_max.powf(SHIFT_EXPONENT);
    let bound_holds = shifts
        .iter()
        .zip(&norms)
        .all(|(h, n)| *n <= constant * h.powf(SHIFT_EXPONENT) * (1.0 + 1e-12));
    Ok(ShiftModulus {
        shifts: shifts.to_vec(),
        fit: fit_rate(shifts, &norms).ok(),
        norms,
        constant,
        bound_holds,
    })
}
