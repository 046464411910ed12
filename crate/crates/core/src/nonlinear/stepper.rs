//! Integrating-factor RK3 step: the viscous factor `exp(−ν ∫ p)` is applied
//! exactly per mode and Kutta's third-order scheme handles the rest.

use num_complex::Complex64;

use super::rhs::RhsEngine;
use crate::error::{Error, Result};
use crate::frequency::{leray_project_in_place, symbol_p_antiderivative, Grid, SpectralField};

/// Outcome of one step.
pub struct StepOutput {
    pub state: SpectralField,
    /// Physical velocity maxima at the start of the step.
    pub max_velocity: [f64; 3],
}

fn viscous_factors(grid: &Grid, nu: f64, a: f64, b: f64) -> Vec<f64> {
    (0..grid.len())
        .map(|idx| {
            let w = grid.wavevector_at(idx);
            (-nu * (symbol_p_antiderivative(b, w) - symbol_p_antiderivative(a, w))).exp()
        })
        .collect()
}

/// `out = d ⊙ (x + a y)` mode-wise.
fn damp_axpy(d: &[f64], x: &SpectralField, a: f64, y: &SpectralField, t: f64) -> SpectralField {
    let mut out = SpectralField::zeros(x.grid, t);
    for c in 0..3 {
        for (idx, z) in out.comps[c].iter_mut().enumerate() {
            *z = d[idx] * (x.comps[c][idx] + a * y.comps[c][idx]);
        }
    }
    out
}

/// `out += a d ⊙ y`
fn add_damped(out: &mut SpectralField, a: f64, d: &[f64], y: &SpectralField) {
    for c in 0..3 {
        for (idx, z) in out.comps[c].iter_mut().enumerate() {
            *z += a * d[idx] * y.comps[c][idx];
        }
    }
}

/// Advances `state` (frame time `t`) by `dt`.
pub fn step_with(engine: &RhsEngine, nu: f64, state: &SpectralField, dt: f64) -> Result<StepOutput> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParams(format!("dt = {dt} must be positive")));
    }
    let g = state.grid;
    let t0 = state.frame_time;
    let th = t0 + 0.5 * dt;
    let t1 = t0 + dt;
    let d_0h = viscous_factors(&g, nu, t0, th);
    let d_01 = viscous_factors(&g, nu, t0, t1);
    let d_h1 = viscous_factors(&g, nu, th, t1);

    let first = engine.eval(t0, state)?;
    let k1 = first.rhs;
    let u2 = damp_axpy(&d_0h, state, 0.5 * dt, &k1, th);
    let k2 = engine.eval(th, &u2)?.rhs;
    let mut u3 = damp_axpy(&d_01, state, -dt, &k1, t1);
    add_damped(&mut u3, 2.0 * dt, &d_h1, &k2);
    let k3 = engine.eval(t1, &u3)?.rhs;
    let mut next = damp_axpy(&d_01, state, dt / 6.0, &k1, t1);
    add_damped(&mut next, 2.0 * dt / 3.0, &d_h1, &k2);
    next.axpy(dt / 6.0, &k3);

    leray_project_in_place(t1, &mut next)?;
    next.enforce_hermitian();
    let mask = engine.mask();
    for c in next.comps.iter_mut() {
        for (idx, z) in c.iter_mut().enumerate() {
            if !mask[idx] {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        // the mean velocity is held at zero
        c[0] = Complex64::new(0.0, 0.0);
    }
    if !next.is_finite() {
        return Err(Error::Blowup {
            time: t1,
            reason: "non-finite coefficient".into(),
        });
    }
    Ok(StepOutput {
        state: next,
        max_velocity: first.max_velocity,
    })
}

/// Stable step estimate from the advective CFL condition in the moving frame.
///
/// The sheared wavenumber grows like `η_max + k_max t`; it is capped at the
/// scale beyond which the viscous factor removes a mode within one step.
pub fn adaptive_dt(grid: &Grid, nu: f64, t: f64, max_velocity: [f64; 3], cfl: f64, dt_max: f64) -> f64 {
    let (kx, ey, lz) = grid.max_frequencies();
    let mut ky = ey + kx * t;
    if nu > 0.0 {
        ky = ky.min((10.0 / (nu * dt_max)).sqrt());
    }
    let rate = max_velocity[0] * kx + max_velocity[1] * ky + max_velocity[2] * lz;
    if rate > 0.0 {
        (cfl / rate).min(dt_max)
    } else {
        dt_max
    }
}
