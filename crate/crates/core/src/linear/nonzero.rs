//! Linear dynamics of the `k ≠ 0` modes in terms of the good unknowns
//! `Q̂ = −p Û²` and `K = i √(β/(β−1)) p^{1/2} Ŵ`, `Ŵ = i l Û¹ − i k Û³`:
//!
//! ```text
//! Q̂' = −c_β l p^{-1/2} K − ν p Q̂
//! K' = (ṗ / 2p) K + c_β l p^{-1/2} Q̂ − ν p K,      c_β = β / √(β/(β−1))
//! ```
//!
//! The viscous part is removed exactly with the factor `exp(−ν ∫ p)`; the
//! remaining inviscid system is integrated with an adaptive Dormand–Prince
//! scheme. The damping factor is carried in log form so that long horizons
//! with large `k` do not underflow.

use num_complex::Complex64;
use rayon::prelude::*;

use super::ode::{dopri5, rk4_richardson, Tolerance};
use super::params::PhysicsParams;
use crate::error::{Error, Result};
use crate::frequency::{symbol_p, symbol_p_dot, symbol_p_integral, Wavevector};
use crate::multipliers::{m_value, MultiplierParams};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonzeroModeState {
    pub q_hat: Complex64,
    pub k_hat: Complex64,
}

impl NonzeroModeState {
    pub fn new(q_hat: Complex64, k_hat: Complex64) -> Self {
        Self { q_hat, k_hat }
    }

    pub fn zero() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    /// Builds the state from `Q̂` and `Ŵ` at time `t`.
    pub fn from_q_w(t: f64, w: Wavevector, prm: &PhysicsParams, q_hat: Complex64, w_hat: Complex64) -> Self {
        let k_hat = I * prm.k_scale() * symbol_p(t, w).sqrt() * w_hat;
        Self { q_hat, k_hat }
    }

    /// Builds the state from a velocity coefficient at time `t`.
    pub fn from_velocity(t: f64, w: Wavevector, prm: &PhysicsParams, u: [Complex64; 3]) -> Self {
        let p = symbol_p(t, w);
        let w_hat = I * (w.l as f64) * u[0] - I * (w.k as f64) * u[2];
        Self::from_q_w(t, w, prm, -p * u[1], w_hat)
    }

    /// `Ŵ = K / (i √(β/(β−1)) p^{1/2})`
    pub fn w_hat(&self, t: f64, w: Wavevector, prm: &PhysicsParams) -> Complex64 {
        self.k_hat / (I * prm.k_scale() * symbol_p(t, w).sqrt())
    }

    /// `|Q̂|² + |K|²`
    pub fn energy(&self) -> f64 {
        self.q_hat.norm_sqr() + self.k_hat.norm_sqr()
    }

    fn to_real(self) -> [f64; 4] {
        [self.q_hat.re, self.q_hat.im, self.k_hat.re, self.k_hat.im]
    }

    fn from_real(v: [f64; 4]) -> Self {
        Self::new(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]))
    }
}

/// A state written as `exp(−log_damping) · inviscid`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledModeState {
    pub inviscid: NonzeroModeState,
    pub log_damping: f64,
}

impl ScaledModeState {
    pub fn value(&self) -> NonzeroModeState {
        let s = (-self.log_damping).exp();
        NonzeroModeState::new(self.inviscid.q_hat * s, self.inviscid.k_hat * s)
    }

    /// `log(|Q̂|² + |K|²)`, finite even when the state itself underflows.
    pub fn log_energy(&self) -> f64 {
        self.inviscid.energy().ln() - 2.0 * self.log_damping
    }
}

fn check_mode(w: Wavevector) -> Result<()> {
    if w.k == 0 {
        return Err(Error::ContractViolation(format!(
            "mode (k=0, eta={}, l={}) is not an x-dependent mode",
            w.eta, w.l
        )));
    }
    Ok(())
}

/// Right-hand side of the inviscid `(Q̂, K)` system on four real unknowns.
fn inviscid_rhs(w: Wavevector, prm: &PhysicsParams) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] {
    let cl = prm.coupling() * w.l as f64;
    move |t, y| {
        let p = symbol_p(t, w);
        let a = cl / p.sqrt();
        let s = symbol_p_dot(t, w) / (2.0 * p);
        [
            -a * y[2],
            -a * y[3],
            s * y[2] + a * y[0],
            s * y[3] + a * y[1],
        ]
    }
}

/// Inviscid part of the flow from `t0` to `t1`.
fn inviscid_flow(
    w: Wavevector,
    s0: NonzeroModeState,
    prm: &PhysicsParams,
    t0: f64,
    t1: f64,
    tol: Tolerance,
) -> Result<NonzeroModeState> {
    if s0.energy() == 0.0 {
        return Ok(s0);
    }
    if w.l == 0 {
        // decoupled: Q̂ constant, K scales like p^{1/2}
        let r = (symbol_p(t1, w) / symbol_p(t0, w)).sqrt();
        return Ok(NonzeroModeState::new(s0.q_hat, s0.k_hat * r));
    }
    let y = dopri5(inviscid_rhs(w, prm), t0, s0.to_real(), t1, tol)?;
    Ok(NonzeroModeState::from_real(y))
}

/// Evolves from `t0` to `t1`, returning the state with its damping factor
/// kept separate.
pub fn evolve_qk_scaled(
    w: Wavevector,
    s0: NonzeroModeState,
    prm: &PhysicsParams,
    t0: f64,
    t1: f64,
    tol: Tolerance,
) -> Result<ScaledModeState> {
    check_mode(w)?;
    let inviscid = inviscid_flow(w, s0, prm, t0, t1, tol)?;
    Ok(ScaledModeState {
        inviscid,
        log_damping: prm.nu * symbol_p_integral(w, t0, t1),
    })
}

/// Evolves one `k ≠ 0` mode from time 0 to `t` with local tolerance `tol`.
pub fn evolve_qk_mode(
    w: Wavevector,
    s0: NonzeroModeState,
    prm: &PhysicsParams,
    t: f64,
    tol: Tolerance,
) -> Result<NonzeroModeState> {
    Ok(evolve_qk_scaled(w, s0, prm, 0.0, t, tol)?.value())
}

/// Evolves many modes over the same interval in parallel.
pub fn evolve_qk_modes(
    modes: &[(Wavevector, NonzeroModeState)],
    prm: &PhysicsParams,
    t: f64,
    tol: Tolerance,
) -> Result<Vec<NonzeroModeState>> {
    modes
        .par_iter()
        .map(|&(w, s0)| evolve_qk_mode(w, s0, prm, t, tol))
        .collect()
}

/// Samples one mode at increasing `times` (starting from 0).
pub fn qk_trajectory(
    w: Wavevector,
    s0: NonzeroModeState,
    prm: &PhysicsParams,
    times: &[f64],
    tol: Tolerance,
) -> Result<Vec<ScaledModeState>> {
    check_mode(w)?;
    let mut out = Vec::with_capacity(times.len());
    let mut cur = s0;
    let mut t_prev = 0.0;
    for &t in times {
        if t < t_prev {
            return Err(Error::ContractViolation("trajectory times must increase".into()));
        }
        cur = inviscid_flow(w, cur, prm, t_prev, t, tol)?;
        out.push(ScaledModeState {
            inviscid: cur,
            log_damping: prm.nu * symbol_p_integral(w, 0.0, t),
        });
        t_prev = t;
    }
    Ok(out)
}

/// Reference solution using classical RK4 with Richardson extrapolation on
/// the full viscous system (no integrating factor).
pub fn evolve_qk_reference(
    w: Wavevector,
    s0: NonzeroModeState,
    prm: &PhysicsParams,
    t: f64,
    tol: f64,
) -> Result<NonzeroModeState> {
    check_mode(w)?;
    let cl = prm.coupling() * w.l as f64;
    let nu = prm.nu;
    let f = move |t: f64, y: &[f64; 4]| {
        let p = symbol_p(t, w);
        let a = cl / p.sqrt();
        let s = symbol_p_dot(t, w) / (2.0 * p);
        [
            -a * y[2] - nu * p * y[0],
            -a * y[3] - nu * p * y[1],
            s * y[2] + a * y[0] - nu * p * y[2],
            s * y[3] + a * y[1] - nu * p * y[3],
        ]
    };
    Ok(NonzeroModeState::from_real(rk4_richardson(
        f,
        0.0,
        s0.to_real(),
        t,
        tol,
    )?))
}

/// Checks `m² (|Q̂|² + |K|²)(t) ≤ e^{−ν k² t³ / 12} (|Q̂|² + |K|²)(0)` with
/// relative slack `1e−8`.
pub fn decay_envelope_check(
    w: Wavevector,
    s0: NonzeroModeState,
    prm: &PhysicsParams,
    t: f64,
) -> Result<bool> {
    let s = evolve_qk_scaled(w, s0, prm, 0.0, t, Tolerance::new(1e-10))?;
    envelope_holds(w, s0, prm, t, &s)
}

/// Envelope comparison for an already computed state at time `t`.
pub fn envelope_holds(
    w: Wavevector,
    s0: NonzeroModeState,
    prm: &PhysicsParams,
    t: f64,
    s: &ScaledModeState,
) -> Result<bool> {
    let e0 = s0.energy();
    if e0 == 0.0 {
        return Ok(true);
    }
    if s.inviscid.energy() == 0.0 {
        return Ok(true);
    }
    let mp = MultiplierParams::new(prm.nu)?;
    let m = m_value(t, w, &mp);
    let lhs = 2.0 * m.ln() + s.log_energy();
    let k = w.k as f64;
    let rhs = -prm.nu * k * k * t.powi(3) / 12.0 + e0.ln() + (1e-8f64).ln_1p();
    Ok(lhs <= rhs)
}

/// `e^{−ν k² t³ / 12}`
pub fn decay_envelope(w: Wavevector, nu: f64, t: f64) -> f64 {
    let k = w.k as f64;
    (-nu * k * k * t.powi(3) / 12.0).exp()
}

/// Velocity from `(Q̂, Ŵ)` at time `t`, using `Û² = −Q̂/p` and
/// incompressibility.
pub fn reconstruct_velocity(
    w: Wavevector,
    t: f64,
    q_hat: Complex64,
    w_hat: Complex64,
) -> Result<[Complex64; 3]> {
    let kl2 = w.horizontal_sq();
    if kl2 == 0.0 {
        return Err(Error::ContractViolation(
            "reconstruction needs k or l nonzero".into(),
        ));
    }
    let (k, l) = (w.k as f64, w.l as f64);
    let xi = w.sheared_eta(t);
    let u2 = -q_hat / symbol_p(t, w);
    let u1 = -(k * xi * u2 + I * l * w_hat) / kl2;
    let u3 = -(l * xi * u2 - I * k * w_hat) / kl2;
    Ok([u1, u2, u3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn prm(nu: f64, beta: f64) -> PhysicsParams {
        PhysicsParams::new(nu, beta).unwrap()
    }

    #[test]
    fn zero_data_stays_zero() {
        let s = evolve_qk_mode(
            Wavevector::new(1, 0.0, 1),
            NonzeroModeState::zero(),
            &prm(0.01, 2.0),
            3.0,
            Tolerance::default(),
        )
        .unwrap();
        assert_eq!(s, NonzeroModeState::zero());
    }

    #[test]
    fn rejects_x_independent_modes() {
        assert!(matches!(
            evolve_qk_mode(
                Wavevector::new(0, 1.0, 1),
                NonzeroModeState::zero(),
                &prm(0.01, 2.0),
                1.0,
                Tolerance::default()
            ),
            Err(Error::ContractViolation(_))
        ));
    }

    #[test]
    fn decoupled_mode_closed_form() {
        let w = Wavevector::new(1, 0.0, 0);
        let q0 = c(0.7, -0.2);
        let s0 = NonzeroModeState::new(q0, c(0.0, 0.0));
        for t in [0.5, 2.0, 4.0] {
            let s = evolve_qk_mode(w, s0, &prm(0.1, 2.0), t, Tolerance::default()).unwrap();
            let want = q0 * (-0.1 * (t + t * t * t / 3.0)).exp();
            assert!((s.q_hat - want).norm() < 1e-14);
        }
    }

    #[test]
    fn matches_reference_integrator() {
        let w = Wavevector::new(1, 0.0, 1);
        let p = prm(0.01, 2.0);
        let s0 = NonzeroModeState::new(c(1.0, 0.5), c(-0.3, 0.2));
        let a = evolve_qk_mode(w, s0, &p, 1.0, Tolerance::new(1e-12)).unwrap();
        let b = evolve_qk_reference(w, s0, &p, 1.0, 1e-12).unwrap();
        assert!((a.q_hat - b.q_hat).norm() < 1e-10);
        assert!((a.k_hat - b.k_hat).norm() < 1e-10);
    }

    #[test]
    fn inviscid_energy_decreases_before_critical_time() {
        // without viscosity d/dt(|Q|² + |K|²) = (ṗ/p)|K|² and ṗ ≤ 0 for t ≤ η/k
        let w = Wavevector::new(1, 2.0, 1);
        let p = prm(0.0, 3.0);
        let s0 = NonzeroModeState::new(c(1.0, 0.0), c(0.0, 0.0));
        let mut prev = s0.energy();
        for t in [0.5, 1.0, 1.5, 2.0] {
            let e = evolve_qk_mode(w, s0, &p, t, Tolerance::new(1e-12)).unwrap().energy();
            assert!(e <= prev * (1.0 + 1e-10));
            prev = e;
        }
        assert!(prev < s0.energy());
    }

    #[test]
    fn envelope_examples() {
        let s0 = NonzeroModeState::new(c(1.0, 0.0), c(0.5, -0.5));
        for t in [1.0, 5.0, 10.0] {
            assert!(decay_envelope_check(Wavevector::new(1, 0.0, 1), s0, &prm(0.01, 2.0), t).unwrap());
        }
        assert!(decay_envelope_check(Wavevector::new(1, 5.0, 2), s0, &prm(0.05, -2.0), 3.0).unwrap());
        assert!(decay_envelope_check(
            Wavevector::new(1, 5.0, 2),
            NonzeroModeState::zero(),
            &prm(0.05, -2.0),
            3.0
        )
        .unwrap());
    }

    #[test]
    fn envelope_survives_underflow() {
        let w = Wavevector::new(10, 3.0, 4);
        let s0 = NonzeroModeState::new(c(1.0, 0.0), c(1.0, 0.0));
        let p = prm(0.1, 5.0);
        let s = evolve_qk_scaled(w, s0, &p, 0.0, 20.0, Tolerance::default()).unwrap();
        assert_eq!(s.value().energy(), 0.0);
        assert!(s.log_energy().is_finite());
        assert!(envelope_holds(w, s0, &p, 20.0, &s).unwrap());
    }

    #[test]
    fn trajectory_agrees_with_direct_evolution() {
        let w = Wavevector::new(2, 1.0, -1);
        let p = prm(0.02, -3.0);
        let s0 = NonzeroModeState::new(c(0.2, 0.1), c(-1.0, 0.4));
        let times = [0.5, 1.5, 3.0];
        let traj = qk_trajectory(w, s0, &p, &times, Tolerance::new(1e-12)).unwrap();
        for (t, s) in times.iter().zip(traj.iter()) {
            let d = evolve_qk_mode(w, s0, &p, *t, Tolerance::new(1e-12)).unwrap();
            assert!((s.value().q_hat - d.q_hat).norm() < 1e-9);
        }
    }

    #[test]
    fn reconstruction_zero_and_guard() {
        let z = c(0.0, 0.0);
        assert_eq!(
            reconstruct_velocity(Wavevector::new(1, 0.5, 0), 0.3, z, z).unwrap(),
            [z, z, z]
        );
        assert!(reconstruct_velocity(Wavevector::new(0, 0.5, 0), 0.3, z, z).is_err());
    }

    proptest! {
        #[test]
        fn reconstruction_is_divergence_free_and_consistent(
            k in -6i64..6, eta in -5.0f64..5.0, l in -6i64..6, t in 0.0f64..10.0,
            qr in -1.0f64..1.0, qi in -1.0f64..1.0, wr in -1.0f64..1.0, wi in -1.0f64..1.0
        ) {
            prop_assume!(k != 0 || l != 0);
            let w = Wavevector::new(k, eta, l);
            let (q, wh) = (c(qr, qi), c(wr, wi));
            let u = reconstruct_velocity(w, t, q, wh).unwrap();
            let div = I * (k as f64) * u[0] + I * w.sheared_eta(t) * u[1] + I * (l as f64) * u[2];
            prop_assert!(div.norm() < 1e-12 * (1.0 + q.norm() + wh.norm()));
            let w_back = I * (l as f64) * u[0] - I * (k as f64) * u[2];
            prop_assert!((w_back - wh).norm() < 1e-12);
            let q_back = -symbol_p(t, w) * u[1];
            prop_assert!((q_back - q).norm() < 1e-12);
        }

        #[test]
        fn state_round_trip(k in 1i64..5, eta in -3.0f64..3.0, l in -4i64..4, t in 0.0f64..5.0,
                            wr in -1.0f64..1.0, wi in -1.0f64..1.0) {
            let w = Wavevector::new(k, eta, l);
            let p = prm(0.0, 2.0);
            let s = NonzeroModeState::from_q_w(t, w, &p, c(0.0, 0.0), c(wr, wi));
            prop_assert!((s.w_hat(t, w, &p) - c(wr, wi)).norm() < 1e-12);
        }
    }
}
