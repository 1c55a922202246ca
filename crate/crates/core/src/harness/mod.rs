//! Configuration, persisted runs, `ε`-sweeps and reports.

pub mod config;
pub mod diag;
pub mod report;
pub mod store;
pub mod sweep;

pub use config::{SweepConfig, U0Spec};
pub use diag::{diag, Quantity};
pub use report::{analyze, ConvergenceReport, EpsRow, QuantitySummary, Verdict, VerdictLine};
pub use store::{discover, run_ac, run_oracle, RunDir, RunKind, RunMetadata, RunStatus};
pub use sweep::{run, sweep, thread_pool, write_report, THREADS_ENV};
