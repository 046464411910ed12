use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::frequency::Grid;
use crate::linear::PhysicsParams;

/// Which parts of the non-viscous right-hand side are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RhsTerms {
    /// Shear, Coriolis and linear pressure coupling.
    pub linear: bool,
    /// Advection and nonlinear pressure.
    pub nonlinear: bool,
}

impl RhsTerms {
    pub const FULL: Self = Self {
        linear: true,
        nonlinear: true,
    };
    pub const LINEAR_ONLY: Self = Self {
        linear: true,
        nonlinear: false,
    };
}

impl Default for RhsTerms {
    fn default() -> Self {
        Self::FULL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitProfile {
    /// Random divergence-free field with spectrum `∝ exp(−|k,η,l|²/4)`.
    RandomDivFree,
    /// One Fourier mode `(k, j, l)` (with `η = j / L_y`) and its conjugate,
    /// projected to be divergence-free.
    SingleMode { k: i64, j: i64, l: i64 },
    /// State read from a checkpoint file.
    File(PathBuf),
}

/// Time-step control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepControl {
    Fixed(f64),
    /// `dt = min(dt_max, cfl / Σ_i max|u_i| κ_i)`.
    Adaptive { cfl: f64, dt_max: f64 },
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl::Adaptive {
            cfl: 0.5,
            dt_max: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub grid: Grid,
    pub prm: PhysicsParams,
    /// `‖u_in‖_{H^σ}`
    pub epsilon: f64,
    /// Regularity index; ledger norms use `N = σ − 2`.
    pub sigma: f64,
    pub step: StepControl,
    pub t_end: f64,
    pub seed: u64,
    pub init: InitProfile,
    pub terms: RhsTerms,
    /// Spacing of recorded ledger rows.
    pub output_interval: f64,
    /// Multiple of `ε` above which the run is declared unstable.
    pub bootstrap_factor: f64,
    /// Multiple of `ε` above which the run is declared blown up.
    pub blowup_factor: f64,
    /// Stop as soon as the bootstrap bound is exceeded.
    pub stop_when_unstable: bool,
    pub max_steps: usize,
}

impl SimulationConfig {
    pub fn new(grid: Grid, prm: PhysicsParams, epsilon: f64, sigma: f64, t_end: f64) -> Result<Self> {
        let cfg = Self {
            grid,
            prm,
            epsilon,
            sigma,
            step: StepControl::default(),
            t_end,
            seed: 0,
            init: InitProfile::RandomDivFree,
            terms: RhsTerms::FULL,
            output_interval: 1.0,
            bootstrap_factor: 10.0,
            blowup_factor: 1e6,
            stop_when_unstable: false,
            max_steps: 10_000_000,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParams(format!("eps = {} must be >= 0", self.epsilon)));
        }
        if !(self.sigma > 4.5) {
            return Err(Error::InvalidParams(format!("sigma = {} must exceed 9/2", self.sigma)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParams(format!("T = {} must be >= 0", self.t_end)));
        }
        if !(self.output_interval > 0.0) {
            return Err(Error::InvalidParams("output interval must be positive".into()));
        }
        match self.step {
            StepControl::Fixed(dt) if !(dt > 0.0) => {
                return Err(Error::InvalidParams(format!("dt = {dt} must be positive")))
            }
            StepControl::Adaptive { cfl, dt_max } if !(cfl > 0.0 && dt_max > 0.0) => {
                return Err(Error::InvalidParams("cfl and dt_max must be positive".into()))
            }
            _ => {}
        }
        Ok(())
    }

    /// `N = σ − 2`
    pub fn n_index(&self) -> f64 {
        self.sigma - 2.0
    }
}
