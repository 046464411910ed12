//! Per-mode linear dynamics: the `k ≠ 0` good-unknown system, closed-form
//! zero-frequency propagators and the non-rotating lift-up reference.

pub mod nonzero;
pub mod ode;
pub mod params;
pub mod zero;

pub use nonzero::{
    decay_envelope, decay_envelope_check, envelope_holds, evolve_qk_mode, evolve_qk_modes,
    evolve_qk_reference, evolve_qk_scaled, qk_trajectory, reconstruct_velocity, NonzeroModeState,
    ScaledModeState,
};
pub use ode::Tolerance;
pub use params::PhysicsParams;
pub use zero::{
    classical_liftup, eigen_structure, zero_mode_double, zero_mode_invariant, zero_mode_matrix,
    zero_mode_simple, ZeroModeState,
};
