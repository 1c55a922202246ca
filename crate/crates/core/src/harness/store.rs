//! On-disk runs. Each run directory holds `metadata.json` and one binary
//! snapshot per multiple of `snapshot_dt`; an interrupted run continues from
//! its last stored snapshot.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::SweepConfig;
use crate::acsolver::{self, make_initial_data, ACState, RunStats};
use crate::error::{AcnsError, Result};
use crate::field::{snapshot, ScalarField, VectorField};
use crate::nsoracle::{self, NSState};

pub const METADATA_FILE: &str = "metadata.json";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunKind {
    Ac,
    Ns,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Running,
    Complete,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEntry {
    pub index: usize,
    pub t: f64,
    pub file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub format_version: u32,
    pub kind: RunKind,
    pub config: SweepConfig,
    /// `None` for incompressible runs.
    pub eps: Option<f64>,
    pub violates_id: bool,
    pub status: RunStatus,
    pub error: Option<String>,
    pub snapshots: Vec<SnapshotEntry>,
    pub stats: RunStats,
}

#[derive(Debug, Clone)]
pub struct RunDir {
    pub path: PathBuf,
    pub meta: RunMetadata,
}

pub fn snapshot_name(index: usize) -> String {
    format!("snap_{index:05}.bin")
}

pub fn ac_run_path(config: &SweepConfig, eps: f64) -> PathBuf {
    config.output_dir.join(format!("ac_eps_{eps:e}"))
}

pub fn oracle_path(config: &SweepConfig) -> PathBuf {
    config.output_dir.join(format!("oracle_{}", config.oracle_key()))
}

impl RunDir {
    pub fn open(path: &Path) -> Result<Self> {
        let file = path.join(METADATA_FILE);
        let text = fs::read_to_string(&file).map_err(|e| AcnsError::io(&file, e))?;
        let meta: RunMetadata = serde_json::from_str(&text).map_err(|e| AcnsError::Format {
            path: file.clone(),
            reason: e.to_string(),
        })?;
        if meta.format_version != FORMAT_VERSION {
            return Err(AcnsError::Format {
                path: file,
                reason: format!("unsupported metadata version {}", meta.format_version),
            });
        }
        Ok(Self {
            path: path.to_path_buf(),
            meta,
        })
    }

    pub fn is_run(path: &Path) -> bool {
        path.join(METADATA_FILE).is_file()
    }

    fn save(&self) -> Result<()> {
        let file = self.path.join(METADATA_FILE);
        let tmp = self.path.join("metadata.json.tmp");
        let text = serde_json::to_string_pretty(&self.meta)?;
        fs::write(&tmp, text).map_err(|e| AcnsError::io(&tmp, e))?;
        fs::rename(&tmp, &file).map_err(|e| AcnsError::io(&file, e))
    }

    pub fn times(&self) -> Vec<f64> {
        self.meta.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.meta.status == RunStatus::Complete
    }

    fn read_components(&self, entry: &SnapshotEntry, expected: usize) -> Result<Vec<ScalarField>> {
        let path = self.path.join(&entry.file);
        let comps = snapshot::read(&path)?;
        if comps.len() != expected {
            return Err(AcnsError::Format {
                path,
                reason: format!("expected {expected} components, found {}", comps.len()),
            });
        }
        Ok(comps)
    }

    fn ac_state(&self, entry: &SnapshotEntry) -> Result<ACState> {
        let dim = self.meta.config.dim;
        let mut comps = self.read_components(entry, dim + 1)?;
        let p = comps.pop().expect("dim + 1 components");
        Ok(ACState {
            u: VectorField::from_components(comps)?,
            p,
            eps: self.meta.eps.ok_or_else(|| AcnsError::Format {
                path: self.path.join(METADATA_FILE),
                reason: "artificial-compressibility run without eps".into(),
            })?,
            mu: self.meta.config.mu,
            t: entry.t,
        })
    }

    fn ns_state(&self, entry: &SnapshotEntry) -> Result<NSState> {
        let comps = self.read_components(entry, self.meta.config.dim)?;
        Ok(NSState {
            u: VectorField::from_components(comps)?,
            mu: self.meta.config.mu,
            t: entry.t,
        })
    }

    fn require_kind(&self, kind: RunKind) -> Result<()> {
        if self.meta.kind != kind {
            return Err(AcnsError::Format {
                path: self.path.join(METADATA_FILE),
                reason: format!("expected a {kind:?} run, found {:?}", self.meta.kind),
            });
        }
        Ok(())
    }

    pub fn load_ac_states(&self) -> Result<Vec<ACState>> {
        self.require_kind(RunKind::Ac)?;
        self.meta.snapshots.iter().map(|e| self.ac_state(e)).collect()
    }

    pub fn load_ns_states(&self) -> Result<Vec<NSState>> {
        self.require_kind(RunKind::Ns)?;
        self.meta.snapshots.iter().map(|e| self.ns_state(e)).collect()
    }

    /// Velocities of either kind of run.
    pub fn load_velocities(&self) -> Result<Vec<VectorField>> {
        match self.meta.kind {
            RunKind::Ac => Ok(self.load_ac_states()?.into_iter().map(|s| s.u).collect()),
            RunKind::Ns => Ok(self.load_ns_states()?.into_iter().map(|s| s.u).collect()),
        }
    }

    fn record(&mut self, index: usize, t: f64, components: &[&ScalarField]) -> Result<()> {
        if self.meta.snapshots.iter().any(|s| s.index == index) {
            return Ok(());
        }
        let file = snapshot_name(index);
        snapshot::write(&self.path.join(&file), components)?;
        self.meta.snapshots.push(SnapshotEntry { index, t, file });
        self.save()
    }

    fn finish(&mut self, outcome: Result<RunStats>) -> Result<()> {
        match outcome {
            Ok(stats) => {
                self.meta.stats.merge(&stats);
                self.meta.status = RunStatus::Complete;
                self.meta.error = None;
            }
            Err(e @ (AcnsError::NonFinite { .. } | AcnsError::CflViolation { .. })) => {
                self.meta.status = RunStatus::Unstable;
                self.meta.error = Some(e.to_string());
            }
            Err(e) => return Err(e),
        }
        self.save()
    }
}

/// Existing run at `path` if its configuration matches, otherwise a fresh
/// directory.
fn prepare(path: &Path, fresh: RunMetadata) -> Result<RunDir> {
    if RunDir::is_run(path) {
        let existing = RunDir::open(path)?;
        let same = existing.meta.kind == fresh.kind
            && existing.meta.eps == fresh.eps
            && match fresh.kind {
                RunKind::Ac => existing.meta.config.same_physics(&fresh.config),
                RunKind::Ns => existing.meta.config.oracle_key() == fresh.config.oracle_key(),
            };
        if same {
            return Ok(existing);
        }
        return Err(AcnsError::Config(format!(
            "{} holds a run with a different configuration",
            path.display()
        )));
    }
    fs::create_dir_all(path).map_err(|e| AcnsError::io(path, e))?;
    let dir = RunDir {
        path: path.to_path_buf(),
        meta: fresh,
    };
    dir.save()?;
    Ok(dir)
}

fn fresh_meta(config: &SweepConfig, kind: RunKind, eps: Option<f64>, violates_id: bool) -> RunMetadata {
    RunMetadata {
        format_version: FORMAT_VERSION,
        kind,
        config: config.clone(),
        eps,
        violates_id,
        status: RunStatus::Running,
        error: None,
        snapshots: Vec::new(),
        stats: RunStats::default(),
    }
}

fn settled(dir: &RunDir) -> bool {
    dir.meta.status != RunStatus::Running
}

/// Artificial-compressibility run for one `ε`, resumed if partially present.
pub fn run_ac(config: &SweepConfig, eps: f64) -> Result<RunDir> {
    config.validate()?;
    let init = make_initial_data(config.initial_velocity()?, config.p0_policy, eps, config.mu)?;
    let mut dir = prepare(&ac_run_path(config, eps), fresh_meta(config, RunKind::Ac, Some(eps), init.violates_id))?;
    if settled(&dir) {
        return Ok(dir);
    }
    let start = match dir.meta.snapshots.last() {
        Some(last) => dir.ac_state(&last.clone())?,
        None => init.state,
    };
    let outcome = acsolver::integrate(
        &start,
        config.options(),
        &config.policy(),
        config.horizon,
        config.snapshot_dt,
        |k, s| {
            let comps: Vec<&ScalarField> = s.u.components().iter().chain(std::iter::once(&s.p)).collect();
            dir.record(k, s.t, &comps)
        },
    );
    dir.finish(outcome)?;
    Ok(dir)
}

/// Incompressible run from the same data, shared by every `ε` of the sweep.
pub fn run_oracle(config: &SweepConfig) -> Result<RunDir> {
    config.validate()?;
    let mut dir = prepare(&oracle_path(config), fresh_meta(config, RunKind::Ns, None, false))?;
    if settled(&dir) {
        return Ok(dir);
    }
    let start = match dir.meta.snapshots.last() {
        Some(last) => dir.ns_state(&last.clone())?,
        None => NSState::new(config.initial_velocity()?, config.mu, 0.0)?,
    };
    let outcome = nsoracle::integrate(
        &start,
        config.dealias,
        None,
        &config.policy(),
        config.horizon,
        config.snapshot_dt,
        |k, s| dir.record(k, s.t, &s.u.components().iter().collect::<Vec<_>>()),
    );
    dir.finish(outcome)?;
    Ok(dir)
}

/// Every run directory at or directly below `root`.
pub fn discover(root: &Path) -> Result<Vec<RunDir>> {
    if RunDir::is_run(root) {
        return Ok(vec![RunDir::open(root)?]);
    }
    let entries = fs::read_dir(root).map_err(|e| AcnsError::io(root, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| RunDir::is_run(p))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(AcnsError::NoRuns(root.to_path_buf()));
    }
    paths.iter().map(|p| RunDir::open(p)).collect()
}
