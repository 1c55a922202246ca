//! Pseudo-spectral laboratory for the artificial-compressibility approximation
//! of the incompressible Navier–Stokes equations on the periodic box.
//!
//! * [`field`]: grids, spectral fields, Leray projection and norms.
//! * [`acsolver`]: exponential integrator for the artificial-compressibility system.
//! * [`nsoracle`]: incompressible reference solver and limit pressure.
//! * [`waveprobe`]: pressure wave equation tools and a free-space radial wave solver.
//! * [`mollify`]: smoothing kernels and the approximation/Young-type inequalities.
//! * [`diagnostics`]: energy bookkeeping, Hodge-component norms, rate fits.
//! * [`harness`]: configuration, persisted runs, sweeps and reports.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop, clippy::type_complexity)]

pub mod error;
pub mod acsolver;
pub mod diagnostics;
pub mod field;
pub mod harness;
pub mod mollify;
pub mod nsoracle;
pub(crate) mod quadrature;
pub mod radial;
pub mod waveprobe;

pub use error::{AcnsError, Result};
