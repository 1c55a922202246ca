//! Convergence reports assembled from stored runs only.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::SweepConfig;
use super::store::{discover, RunDir, RunKind, RunStatus};
use crate::diagnostics::{
    compare_with_oracle, corollary_bounds_monitor, energy_identity_residual, energy_inequality, fit_rate,
    q_decay_exponent, q_measure, Quadrature, BANK_K_MAX,
};
use crate::error::{AcnsError, Result};

/// Largest tolerated oracle energy-inequality excess, relative to `E(0)`.
pub const ENERGY_INEQUALITY_TOL: f64 = 1e-8;
pub const PU_FINAL_FRACTION: f64 = 0.05;
pub const WEAK_Q_FACTOR: f64 = 10.0;
pub const PRESSURE_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Reported,
}

impl Verdict {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Reported => "reported",
        }
    }
}

/// One CSV row per `ε`. Metrics are empty for runs that did not complete.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsRow {
    pub eps: f64,
    pub status: RunStatus,
    pub violates_id: bool,
    pub excluded: bool,
    pub pu_error: Option<f64>,
    pub u_error: Option<f64>,
    pub oracle_norm: Option<f64>,
    pub pressure_pairing: Option<f64>,
    pub q_weak: Option<f64>,
    pub q_strong: Option<f64>,
    pub q_remainder: Option<f64>,
    pub q_smooth: Option<f64>,
    pub alpha: Option<f64>,
    pub energy_residual: Option<f64>,
    pub corollary_violations: Option<usize>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantitySummary {
    pub quantity: String,
    pub eps_values: Vec<f64>,
    pub norms: Vec<f64>,
    pub fitted_slope: Option<f64>,
    pub paper_exponent: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictLine {
    pub criterion: String,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub path: PathBuf,
    pub status: RunStatus,
    pub energy_inequality_max_excess: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub config: SweepConfig,
    pub oracle: OracleSummary,
    pub rows: Vec<EpsRow>,
    pub summaries: Vec<QuantitySummary>,
    pub verdicts: Vec<VerdictLine>,
    pub flags: Vec<String>,
}

impl ConvergenceReport {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.verdict != Verdict::Fail)
    }

    pub fn summary(&self, quantity: &str) -> Option<&QuantitySummary> {
        self.summaries.iter().find(|s| s.quantity == quantity)
    }

    pub fn verdict(&self, criterion_prefix: &str) -> Option<&VerdictLine> {
        self.verdicts.iter().find(|v| v.criterion.starts_with(criterion_prefix))
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).map_err(|e| AcnsError::Config(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| AcnsError::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Summaries and verdicts as a JSON document.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&serde_json::json!({
            "summaries": self.summaries,
            "verdicts": self.verdicts,
            "flags": self.flags,
            "oracle": self.oracle,
            "rows": self.rows,
        }))?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        let _ = writeln!(out, "sweep: dim={} n={} mu={} T={} u0={:?}", c.dim, c.n, c.mu, c.horizon, c.u0_spec);
        let _ = writeln!(out, "{:>10} {:>9} {:>12} {:>12} {:>12} {:>12}", "eps", "status", "|Pu-u|", "|u-u|", "weak Qu", "pressure");
        let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4e}"));
        for r in &self.rows {
            let status = if r.excluded { "excluded" } else { "ok" };
            let _ = writeln!(
                out,
                "{:>10.1e} {:>9} {:>12} {:>12} {:>12} {:>12}",
                r.eps,
                status,
                fmt(r.pu_error),
                fmt(r.u_error),
                fmt(r.q_weak),
                fmt(r.pressure_pairing)
            );
        }
        for s in &self.summaries {
            let slope = s.fitted_slope.map_or("-".into(), |v| format!("{v:.4}"));
            let paper = s.paper_exponent.map_or(String::new(), |v| format!(" (paper {v:.4})"));
            let _ = writeln!(out, "{}: slope {slope}{paper} [{}]", s.quantity, s.verdict.name());
        }
        for v in &self.verdicts {
            let _ = writeln!(out, "{} {}: {}", v.verdict.name().to_uppercase(), v.criterion, v.detail);
        }
        for f in &self.flags {
            let _ = writeln!(out, "flag: {f}");
        }
        out
    }
}

/// Windowed pairings of acoustic modes need `ω·snapshot_dt ≤ π/2` at the
/// highest bank frequency `ω = k_max/√ε`.
pub fn acoustics_resolved(snapshot_dt: f64, eps: f64) -> bool {
    snapshot_dt * BANK_K_MAX as f64 / eps.sqrt() <= std::f64::consts::FRAC_PI_2
}

fn row_for(run: &RunDir, oracle: Option<&[crate::nsoracle::NSState]>) -> Result<EpsRow> {
    let m = &run.meta;
    let eps = m.eps.unwrap_or(f64::NAN);
    let mut row = EpsRow {
        eps,
        status: m.status,
        violates_id: m.violates_id,
        excluded: m.violates_id || m.status != RunStatus::Complete,
        pu_error: None,
        u_error: None,
        oracle_norm: None,
        pressure_pairing: None,
        q_weak: None,
        q_strong: None,
        q_remainder: None,
        q_smooth: None,
        alpha: None,
        energy_residual: None,
        corollary_violations: None,
        note: String::new(),
    };
    if m.status != RunStatus::Complete {
        row.note = m.error.clone().unwrap_or_else(|| "run incomplete".into());
        return Ok(row);
    }
    if m.violates_id {
        row.note = "(ID) violated".into();
    }
    let states = run.load_ac_states()?;
    let dt = m.config.snapshot_dt;
    let q = q_measure(&states, dt, m.config.q_exponent)?;
    row.q_strong = Some(q.strong);
    row.q_remainder = Some(q.remainder);
    row.q_smooth = Some(q.smooth);
    row.alpha = Some(q.alpha);
    row.energy_residual = Some(energy_identity_residual(&states, dt)?.into_iter().fold(0.0, f64::max));
    row.corollary_violations = Some(corollary_bounds_monitor(&states, dt)?.violations.len());
    if let Some(ns) = oracle {
        let cmp = compare_with_oracle(&states, ns, dt)?;
        row.pu_error = Some(cmp.pu_error);
        row.u_error = Some(cmp.u_error);
        row.oracle_norm = Some(cmp.oracle_norm);
        row.pressure_pairing = Some(cmp.pressure_pairing_max);
        row.q_weak = Some(cmp.q_weak);
    } else {
        row.q_weak = Some(q.weak);
    }
    Ok(row)
}

fn summarize(quantity: &str, rows: &[EpsRow], pick: impl Fn(&EpsRow) -> Option<f64>, paper: Option<f64>, verdict: Verdict) -> QuantitySummary {
    let (eps, norms): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| !r.excluded)
        .filter_map(|r| pick(r).map(|v| (r.eps, v)))
        .unzip();
    QuantitySummary {
        quantity: quantity.into(),
        fitted_slope: fit_rate(&eps, &norms).ok().map(|f| f.fitted_slope),
        eps_values: eps,
        norms,
        paper_exponent: paper,
        verdict,
    }
}

/// Values of `pick` over included runs, ordered by descending `ε`.
fn series(rows: &[EpsRow], pick: impl Fn(&EpsRow) -> Option<f64>) -> Vec<f64> {
    rows.iter().filter(|r| !r.excluded).filter_map(pick).collect()
}

fn all_zero(v: &[f64]) -> bool {
    v.iter().all(|x| *x == 0.0)
}

fn decrease_verdict(criterion: &str, values: &[f64], factor: f64) -> VerdictLine {
    let (verdict, detail) = if values.len() < 2 {
        (Verdict::Fail, format!("{} usable runs; at least 2 are needed", values.len()))
    } else if all_zero(values) {
        (Verdict::Pass, "identically zero".into())
    } else {
        let first = values[0];
        let last = values[values.len() - 1];
        let achieved = first / last;
        (
            Verdict::from_bool(achieved >= factor),
            format!("decrease factor {achieved:.3} (required {factor})"),
        )
    };
    VerdictLine {
        criterion: criterion.into(),
        verdict,
        detail,
    }
}

/// Report for every run found at or below `root`.
pub fn analyze(root: &Path) -> Result<ConvergenceReport> {
    let runs = discover(root)?;
    let (oracles, mut acs): (Vec<RunDir>, Vec<RunDir>) = runs.into_iter().partition(|r| r.meta.kind == RunKind::Ns);
    let reference = acs.first().or(oracles.first()).expect("discover returns at least one run");
    let config = reference.meta.config.clone();
    if let Some(other) = acs.iter().find(|r| !r.meta.config.same_physics(&config)) {
        return Err(AcnsError::Config(format!(
            "{} belongs to a different sweep than {}",
            other.path.display(),
            reference.path.display()
        )));
    }
    let oracle = oracles
        .iter()
        .find(|o| o.meta.config.oracle_key() == config.oracle_key())
        .ok_or_else(|| AcnsError::MissingOracle(format!("no incompressible run for this configuration under {}", root.display())))?;
    acs.sort_by(|a, b| b.meta.eps.partial_cmp(&a.meta.eps).expect("finite eps"));

    let mut flags = Vec::new();
    let ns_states = if oracle.is_complete() { Some(oracle.load_ns_states()?) } else { None };
    if ns_states.is_none() {
        flags.push(format!("oracle {} did not complete", oracle.path.display()));
    }
    let excess = match &ns_states {
        Some(ns) => Some(energy_inequality(ns, config.snapshot_dt, Quadrature::ExponentialFit)?.max_excess),
        None => None,
    };

    for run in &acs {
        let eps = run.meta.eps.unwrap_or(f64::NAN);
        if !acoustics_resolved(config.snapshot_dt, eps) {
            flags.push(format!(
                "eps = {eps:e}: snapshot_dt = {} under-resolves the test-bank acoustic frequency {:.1}",
                config.snapshot_dt,
                BANK_K_MAX as f64 / eps.sqrt()
            ));
        }
    }

    let mut rows = Vec::with_capacity(acs.len());
    for run in &acs {
        let row = row_for(run, ns_states.as_deref())?;
        if row.violates_id {
            flags.push(format!("eps = {:e}: (ID) violated, excluded from rate fits", row.eps));
        }
        if row.status != RunStatus::Complete {
            flags.push(format!("eps = {:e}: {}", row.eps, row.note));
        }
        rows.push(row);
    }

    let mut verdicts = Vec::new();
    let pu = series(&rows, |r| r.pu_error);
    if !acs.is_empty() {
        let c3 = if pu.len() < 2 {
            (Verdict::Fail, format!("{} usable runs; at least 2 are needed", pu.len()))
        } else if all_zero(&pu) {
            (Verdict::Pass, "identically zero".into())
        } else {
            let strictly = pu.windows(2).all(|w| w[1] < w[0]);
            let fraction = pu[pu.len() - 1] / pu[0];
            (
                Verdict::from_bool(strictly && fraction < PU_FINAL_FRACTION),
                format!("strictly decreasing: {strictly}; final/initial {fraction:.4} (required < {PU_FINAL_FRACTION})"),
            )
        };
        verdicts.push(VerdictLine {
            criterion: "criterion 3: |Pu^eps - u_NS| strictly decreasing".into(),
            verdict: c3.0,
            detail: c3.1,
        });
        verdicts.push(decrease_verdict(
            "criterion 4: weak Qu^eps functionals",
            &series(&rows, |r| r.q_weak),
            WEAK_Q_FACTOR,
        ));
        verdicts.push(decrease_verdict(
            "criterion 9: limit-pressure pairings",
            &series(&rows, |r| r.pressure_pairing),
            PRESSURE_FACTOR,
        ));
    }
    verdicts.push(VerdictLine {
        criterion: "criterion 12: oracle energy inequality".into(),
        verdict: Verdict::from_bool(excess.is_some_and(|e| e <= ENERGY_INEQUALITY_TOL)),
        detail: match excess {
            Some(e) => format!("max relative excess {e:.3e} (tolerance {ENERGY_INEQUALITY_TOL:e})"),
            None => "oracle incomplete".into(),
        },
    });

    let verdict_of = |prefix: &str| {
        verdicts
            .iter()
            .find(|v: &&VerdictLine| v.criterion.starts_with(prefix))
            .map_or(Verdict::Reported, |v| v.verdict)
    };
    let summaries = vec![
        summarize("pu_error", &rows, |r| r.pu_error, None, verdict_of("criterion 3")),
        summarize("u_error", &rows, |r| r.u_error, None, Verdict::Reported),
        summarize("q_weak", &rows, |r| r.q_weak, None, verdict_of("criterion 4")),
        summarize(
            "q_strong",
            &rows,
            |r| r.q_strong,
            Some(q_decay_exponent(config.q_exponent)),
            Verdict::Reported,
        ),
        summarize("pressure_pairing", &rows, |r| r.pressure_pairing, None, verdict_of("criterion 9")),
        summarize("energy_residual", &rows, |r| r.energy_residual, None, Verdict::Reported),
    ];

    Ok(ConvergenceReport {
        config,
        oracle: OracleSummary {
            path: oracle.path.clone(),
            status: oracle.meta.status,
            energy_inequality_max_excess: excess,
        },
        rows,
        summaries,
        verdicts,
        flags,
    })
}
