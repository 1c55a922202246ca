use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::acsolver::{AcOptions, DtPolicy, PressureInit, DEFAULT_DT_CAP};
use crate::error::{AcnsError, Result};
use crate::field::random::{random_velocity, taylor_green};
use crate::field::{Grid, VectorField};

/// Spectral slope used by `random_full`.
pub const RANDOM_FULL_SLOPE: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum U0Spec {
    TaylorGreen,
    RandomDivfree { seed: u64, spectrum_slope: f64 },
    RandomFull { seed: u64 },
    Zero,
}

impl U0Spec {
    /// Random spectra occupy `1 ≤ |k| ≤ max(2, n/8)`.
    pub fn build(&self, grid: Grid) -> VectorField {
        let k_max = (grid.n() as f64 / 8.0).max(2.0);
        match *self {
            U0Spec::TaylorGreen => taylor_green(grid),
            U0Spec::RandomDivfree { seed, spectrum_slope } => random_velocity(grid, seed, k_max, spectrum_slope, true),
            U0Spec::RandomFull { seed } => random_velocity(grid, seed, k_max, RANDOM_FULL_SLOPE, false),
            U0Spec::Zero => VectorField::zeros(grid),
        }
    }
}

fn yes() -> bool {
    true
}

fn default_dt_cap() -> f64 {
    DEFAULT_DT_CAP
}

fn default_q() -> f64 {
    4.0
}

fn default_p0() -> PressureInit {
    PressureInit::Zero
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub dim: usize,
    pub n: usize,
    pub mu: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub eps_list: Vec<f64>,
    pub u0_spec: U0Spec,
    #[serde(default = "default_p0")]
    pub p0_policy: PressureInit,
    #[serde(default = "default_dt_cap")]
    pub dt_cap: f64,
    pub snapshot_dt: f64,
    pub output_dir: PathBuf,
    #[serde(default = "yes")]
    pub dealias: bool,
    /// Lebesgue exponent of the strong `Qu^ε` norm.
    #[serde(default = "default_q")]
    pub q_exponent: f64,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text).map_err(|e| AcnsError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| AcnsError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            AcnsError::Config(msg) => AcnsError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.dim, self.n)
    }

    pub fn initial_velocity(&self) -> Result<VectorField> {
        Ok(self.u0_spec.build(self.grid()?))
    }

    pub fn policy(&self) -> DtPolicy {
        DtPolicy {
            dt_cap: self.dt_cap,
            ..DtPolicy::default()
        }
    }

    pub fn options(&self) -> AcOptions {
        AcOptions {
            dealias: self.dealias,
            nonlinear_on: true,
            forcing: None,
        }
    }

    pub fn snapshot_count(&self) -> usize {
        (self.horizon / self.snapshot_dt).round() as usize + 1
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(AcnsError::Config(msg));
        self.grid().map_err(|e| AcnsError::Config(e.to_string()))?;
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return bad(format!("mu must be non-negative, got {}", self.mu));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return bad(format!("T must be positive, got {}", self.horizon));
        }
        if self.eps_list.is_empty() {
            return bad("eps_list is empty".into());
        }
        if self.eps_list.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return bad("eps_list entries must be positive".into());
        }
        if self.eps_list.windows(2).any(|w| w[1] >= w[0]) {
            return bad("eps_list must be strictly descending".into());
        }
        if !(self.dt_cap > 0.0 && self.dt_cap.is_finite()) {
            return bad(format!("dt_cap must be positive, got {}", self.dt_cap));
        }
        if !(self.snapshot_dt > 0.0 && self.snapshot_dt <= self.horizon) {
            return bad(format!("snapshot_dt must lie in (0, T], got {}", self.snapshot_dt));
        }
        let intervals = self.horizon / self.snapshot_dt;
        if (intervals - intervals.round()).abs() > 1e-8 {
            return bad(format!("T = {} is not a multiple of snapshot_dt = {}", self.horizon, self.snapshot_dt));
        }
        if !(4.0..=6.0).contains(&self.q_exponent) {
            return bad(format!("q_exponent must lie in [4, 6], got {}", self.q_exponent));
        }
        if let PressureInit::Scaled { beta } = self.p0_policy {
            if !(beta >= 0.0 && beta.is_finite()) {
                return bad(format!("beta must be non-negative, got {beta}"));
            }
        }
        Ok(())
    }

    /// Rate fits need at least four `ε` spanning two decades.
    pub fn validate_for_rates(&self) -> Result<()> {
        self.validate()?;
        let hi = self.eps_list[0];
        let lo = self.eps_list[self.eps_list.len() - 1];
        if self.eps_list.len() < 4 || (hi / lo).log10() < 2.0 - 1e-9 {
            return Err(AcnsError::Config(
                "rate studies need at least 4 eps values spanning two decades".into(),
            ));
        }
        Ok(())
    }

    /// Key identifying the incompressible run shared by every `ε`.
    pub fn oracle_key(&self) -> String {
        let relevant = serde_json::json!({
            "dim": self.dim,
            "n": self.n,
            "mu": self.mu,
            "T": self.horizon,
            "u0_spec": self.u0_spec,
            "dt_cap": self.dt_cap,
            "snapshot_dt": self.snapshot_dt,
            "dealias": self.dealias,
        });
        let digest = Sha256::digest(relevant.to_string().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Same configuration up to the `ε` list and output location.
    pub fn same_physics(&self, other: &SweepConfig) -> bool {
        self.oracle_key() == other.oracle_key() && self.p0_policy == other.p0_policy
    }
}
