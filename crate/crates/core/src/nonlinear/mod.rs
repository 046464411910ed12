//! Pseudo-spectral solver for the full perturbation system in the sheared
//! moving frame, with a running energy ledger.

pub mod checkpoint;
pub mod config;
pub mod diagnostics;
pub mod init;
pub mod rhs;
pub mod run;
pub mod stepper;

pub use config::{InitProfile, RhsTerms, SimulationConfig, StepControl};
pub use diagnostics::{diagnostics, instant_norms, LedgerRow, LedgerTracker};
pub use init::make_initial_data;
pub use rhs::{nonlinear_rhs, RhsEngine};
pub use run::{run, run_from, write_ledger_csv, RunOutcome, Verdict};
pub use stepper::{adaptive_dt, step_with};

use crate::error::Result;
use crate::frequency::SpectralField;

/// One integrating-factor RK3 step of size `dt` from the state's frame time.
pub fn step(state: &SpectralField, dt: f64, cfg: &SimulationConfig) -> Result<SpectralField> {
    let engine = RhsEngine::new(cfg.grid, cfg.prm.beta, cfg.terms);
    Ok(step_with(&engine, cfg.prm.nu, state, dt)?.state)
}
