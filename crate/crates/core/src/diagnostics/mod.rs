//! Trajectory measurements: energy bookkeeping, Hodge-component norms,
//! time-shift moduli and log-log rate fits. Every function here reads
//! snapshots and never touches solver state.

pub mod bank;
pub mod convergence;
pub mod energy;
pub mod rates;
pub mod shift;

pub use bank::{TestBank, BANK_K_MAX};
pub use convergence::{
    balancing_alpha, compare_with_oracle, q_decay_exponent, q_decay_from_measurements, q_decay_study, q_measure,
    OracleComparison, QDecayConfig, QDecayStudy, QMeasurement,
};
pub use energy::{
    corollary_bounds_monitor, dissipation_integral, dissipation_rate, energy_identity_residual, energy_inequality,
    records, CorollaryRecord, CorollaryReport, DiagnosticsRecord, EnergyInequality, Quadrature,
};
pub use rates::{fit_rate, log_space, RateFit};
pub use shift::{shift_norms, time_shift_modulus, ShiftModulus, SHIFT_EXPONENT};

use crate::error::{AcnsError, Result};

/// Checks that `times` advance by `dt` at every step.
pub(crate) fn check_spacing(times: impl Iterator<Item = f64>, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(AcnsError::param(format!("snapshot spacing must be positive, got {dt}")));
    }
    let mut start = None;
    for (i, t) in times.enumerate() {
        let t0 = *start.get_or_insert(t);
        let expected = t0 + i as f64 * dt;
        if (t - expected).abs() > 1e-9 * dt.max(expected.abs()) {
            return Err(AcnsError::NonuniformSpacing(format!(
                "snapshot {i} at t = {t}, expected {expected}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
