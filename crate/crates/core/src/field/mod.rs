//! Spectral field algebra on the periodic box `T^d = [0, 2π)^d`, `d ∈ {2, 3}`.

pub(crate) mod fft;
mod grid;
pub mod norms;
pub mod ops;
pub mod random;
pub mod snapshot;
mod types;

pub use grid::Grid;
pub use norms::{homogeneous_norm, lp_norm, sobolev_norm, space_time_norm, time_norm, FieldData};
pub use ops::{divergence, gradient, laplacian, leray_decompose};
pub use types::{ScalarField, Spectrum, VectorField, VectorSpectrum};
