//! Spectral toolkit for rotating plane Couette perturbations in the sheared
//! moving frame: per-mode linear propagators, time-dependent multipliers,
//! dispersion measurements and a dealiased pseudo-spectral nonlinear solver.

pub mod dispersion;
pub mod error;
pub mod experiments;
pub mod fft;
pub mod fit;
pub mod frequency;
pub mod linear;
pub mod multipliers;
pub mod nonlinear;
pub mod scan;

pub use error::{Error, Result};
