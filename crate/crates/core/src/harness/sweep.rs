use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::config::SweepConfig;
use super::report::{analyze, ConvergenceReport};
use super::store::{run_ac, run_oracle, RunDir};
use crate::error::{AcnsError, Result};

pub const THREADS_ENV: &str = "ACNS_THREADS";

/// Worker pool sized by `ACNS_THREADS`, or rayon's default when unset.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let n: usize = value
            .trim()
            .parse()
            .map_err(|_| AcnsError::Config(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
        if n == 0 {
            return Err(AcnsError::Config(format!("{THREADS_ENV} must be positive")));
        }
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| AcnsError::Config(e.to_string()))
}

/// Every `ε` of the configuration, each in its own directory.
pub fn run(config: &SweepConfig) -> Result<Vec<RunDir>> {
    config.validate()?;
    let pool = thread_pool()?;
    pool.install(|| config.eps_list.par_iter().map(|&eps| run_ac(config, eps)).collect())
}

/// Runs every `ε` and the oracle, then analyses what was written to disk.
pub fn sweep(config: &SweepConfig) -> Result<ConvergenceReport> {
    config.validate_for_rates()?;
    let pool = thread_pool()?;
    pool.install(|| {
        let (oracle, runs) = rayon::join(
            || run_oracle(config),
            || config.eps_list.par_iter().map(|&eps| run_ac(config, eps)).collect::<Result<Vec<_>>>(),
        );
        oracle.and(runs)
    })?;
    let report = analyze(&config.output_dir)?;
    write_report(&report, &config.output_dir)?;
    Ok(report)
}

/// `report.csv`, `report.json` and `report.txt` under `dir`.
pub fn write_report(report: &ConvergenceReport, dir: &Path) -> Result<()> {
    for (name, body) in [
        ("report.csv", report.to_csv()?),
        ("report.json", report.to_json()?),
        ("report.txt", report.to_text()),
    ] {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| AcnsError::io(&path, e))?;
    }
    Ok(())
}
