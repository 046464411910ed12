//! Closed-form propagators for the `k = 0` modes.
//!
//! For `l ≠ 0` the pair `(û¹, û²)` solves
//! `û¹' = −ν|η,l|² û¹ + (β − 1) û²`, `û²' = −ν|η,l|² û² − β l²/|η,l|² û¹`,
//! an inertial wave with frequency `h = √(β(β−1)) |l| / |η, l|`. For `l = 0`
//! the dynamics reduce to heat equations with `û² ≡ 0`.

use num_complex::Complex64;

use super::params::PhysicsParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroModeState {
    pub u1_hat: Complex64,
    pub u2_hat: Complex64,
    pub u3_hat: Complex64,
}

impl ZeroModeState {
    pub fn new(u1_hat: Complex64, u2_hat: Complex64, u3_hat: Complex64) -> Self {
        Self {
            u1_hat,
            u2_hat,
            u3_hat,
        }
    }

    /// A divergence-free state with `û³ = −(η/l) û²`.
    pub fn divergence_free(eta: f64, l: i64, u1_hat: Complex64, u2_hat: Complex64) -> Self {
        Self::new(u1_hat, u2_hat, -(eta / l as f64) * u2_hat)
    }

    pub fn as_array(&self) -> [Complex64; 3] {
        [self.u1_hat, self.u2_hat, self.u3_hat]
    }

    pub fn norm(&self) -> f64 {
        (self.u1_hat.norm_sqr() + self.u2_hat.norm_sqr() + self.u3_hat.norm_sqr()).sqrt()
    }

    /// `|η û² + l û³|`
    pub fn divergence(&self, eta: f64, l: i64) -> f64 {
        (eta * self.u2_hat + l as f64 * self.u3_hat).norm()
    }
}

fn require_l(l: i64) -> Result<()> {
    if l == 0 {
        return Err(Error::ContractViolation(
            "simple zero-frequency propagator needs l != 0".into(),
        ));
    }
    Ok(())
}

/// Propagator of the simple zero frequency (`k = 0`, `l ≠ 0`).
pub fn zero_mode_simple(
    eta: f64,
    l: i64,
    prm: &PhysicsParams,
    t: f64,
    s0: ZeroModeState,
) -> Result<ZeroModeState> {
    require_l(l)?;
    let lf = l as f64;
    let p = eta * eta + lf * lf;
    let h = prm.h(eta, l);
    let bm1 = prm.beta - 1.0;
    let e = (-prm.nu * p * t).exp();
    let (sn, cs) = (h * t).sin_cos();
    let u1 = e * (cs * s0.u1_hat + (bm1 / h) * sn * s0.u2_hat);
    let u2 = e * (cs * s0.u2_hat - (h / bm1) * sn * s0.u1_hat);
    let u3 = e
        * (s0.u3_hat + (prm.beta * eta * lf / (p * h)) * sn * s0.u1_hat
            - (eta / lf) * (cs - 1.0) * s0.u2_hat);
    Ok(ZeroModeState::new(u1, u2, u3))
}

/// Heat propagator of the double zero frequency (`k = l = 0`).
pub fn zero_mode_double(
    eta: f64,
    prm: &PhysicsParams,
    t: f64,
    s0: ZeroModeState,
) -> Result<ZeroModeState> {
    if s0.u2_hat != Complex64::new(0.0, 0.0) {
        return Err(Error::ContractViolation(
            "double zero-frequency state must have u2 = 0".into(),
        ));
    }
    let e = (-prm.nu * eta * eta * t).exp();
    Ok(ZeroModeState::new(e * s0.u1_hat, s0.u2_hat, e * s0.u3_hat))
}

/// Non-rotating reference: `û¹ = e^{−ν|η,l|² t}(û¹₀ − t û²₀)`.
pub fn classical_liftup(eta: f64, l: i64, nu: f64, t: f64, s0: ZeroModeState) -> ZeroModeState {
    let lf = l as f64;
    let e = (-nu * (eta * eta + lf * lf) * t).exp();
    ZeroModeState::new(
        e * (s0.u1_hat - t * s0.u2_hat),
        e * s0.u2_hat,
        e * s0.u3_hat,
    )
}

/// `(β l²/|η,l|²) |û¹|² + (β − 1) |û²|²`, conserved when `ν = 0`.
pub fn zero_mode_invariant(eta: f64, l: i64, prm: &PhysicsParams, s: &ZeroModeState) -> f64 {
    let lf = l as f64;
    prm.beta * lf * lf / (eta * eta + lf * lf) * s.u1_hat.norm_sqr()
        + (prm.beta - 1.0) * s.u2_hat.norm_sqr()
}

/// The `(û¹, û²)` system matrix.
pub fn zero_mode_matrix(eta: f64, l: i64, prm: &PhysicsParams) -> [[f64; 2]; 2] {
    let lf = l as f64;
    let p = eta * eta + lf * lf;
    [
        [-prm.nu * p, prm.beta - 1.0],
        [-prm.beta * lf * lf / p, -prm.nu * p],
    ]
}

/// Eigenvalues `−ν|η,l|² ± i h`.
pub fn eigen_structure(eta: f64, l: i64, prm: &PhysicsParams) -> Result<(Complex64, Complex64)> {
    require_l(l)?;
    let lf = l as f64;
    let re = -prm.nu * (eta * eta + lf * lf);
    let h = prm.h(eta, l);
    Ok((Complex64::new(re, h), Complex64::new(re, -h)))
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

    fn close(a: &ZeroModeState, b: &ZeroModeState, tol: f64) -> bool {
        a.as_array()
            .iter()
            .zip(b.as_array().iter())
            .all(|(x, y)| (x - y).norm() <= tol)
    }

    /// Generic 2×2 eigenvalues via the characteristic polynomial.
    fn eig2(a: [[f64; 2]; 2]) -> (Complex64, Complex64) {
        let tr = a[0][0] + a[1][1];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let disc = Complex64::new(tr * tr - 4.0 * det, 0.0).sqrt();
        ((tr + disc) / 2.0, (tr - disc) / 2.0)
    }

    #[test]
    fn simple_identity_at_zero() {
        let s0 = ZeroModeState::new(c(1.0, 2.0), c(-0.5, 0.1), c(0.3, 0.0));
        let s = zero_mode_simple(0.7, 2, &prm(0.01, 2.0), 0.0, s0).unwrap();
        assert!(close(&s, &s0, 1e-15));
        assert!(zero_mode_simple(0.7, 0, &prm(0.01, 2.0), 1.0, s0).is_err());
    }

    #[test]
    fn simple_inviscid_example() {
        let s0 = ZeroModeState::new(c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0));
        let r2 = 2f64.sqrt();
        for t in [0.3, 1.0, 5.0] {
            let s = zero_mode_simple(0.0, 1, &prm(0.0, 2.0), t, s0).unwrap();
            let want = (r2 * t).cos() + (r2 * t).sin() / r2 * 0.5;
            assert!((s.u1_hat.re - want).abs() < 1e-14);
        }
    }

    #[test]
    fn simple_solves_the_ode() {
        // finite-difference the propagator against the matrix, including û³
        // through incompressibility
        for beta in [2.0, -2.0, 5.0] {
            let p = prm(0.03, beta);
            let (eta, l) = (1.3, -2);
            let s0 = ZeroModeState::divergence_free(eta, l, c(0.4, -0.2), c(1.0, 0.5));
            let a = zero_mode_matrix(eta, l, &p);
            let t = 0.8;
            let dt = 1e-5;
            let sp = zero_mode_simple(eta, l, &p, t + dt, s0).unwrap();
            let sm = zero_mode_simple(eta, l, &p, t - dt, s0).unwrap();
            let s = zero_mode_simple(eta, l, &p, t, s0).unwrap();
            let d1 = (sp.u1_hat - sm.u1_hat) / (2.0 * dt);
            let d2 = (sp.u2_hat - sm.u2_hat) / (2.0 * dt);
            assert!((d1 - (a[0][0] * s.u1_hat + a[0][1] * s.u2_hat)).norm() < 1e-8);
            assert!((d2 - (a[1][0] * s.u1_hat + a[1][1] * s.u2_hat)).norm() < 1e-8);
            assert!(s.divergence(eta, l) < 1e-13);
        }
    }

    #[test]
    fn double_zero() {
        let s0 = ZeroModeState::new(c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0));
        let s = zero_mode_double(1.0, &prm(1.0, 2.0), 1.0, s0).unwrap();
        assert!((s.u1_hat.re - (-1f64).exp()).abs() < 1e-15);
        assert!((s.u3_hat.re - 2.0 * (-1f64).exp()).abs() < 1e-15);
        assert_eq!(s.u2_hat, c(0.0, 0.0));
        assert_eq!(zero_mode_double(1.0, &prm(1.0, 2.0), 0.0, s0).unwrap(), s0);
        let bad = ZeroModeState::new(c(1.0, 0.0), c(1e-3, 0.0), c(0.0, 0.0));
        assert!(zero_mode_double(1.0, &prm(1.0, 2.0), 1.0, bad).is_err());
    }

    #[test]
    fn classical_examples() {
        let s0 = ZeroModeState::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let s = classical_liftup(0.0, 1, 0.1, 2.0, s0);
        assert!((s.u1_hat.re - (-0.2f64).exp()).abs() < 1e-15);
        let s0 = ZeroModeState::new(c(0.5, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let s = classical_liftup(0.3, 1, 0.0, 7.0, s0);
        assert!((s.u1_hat.re - (0.5 - 7.0)).abs() < 1e-15);
    }

    #[test]
    fn eigen_examples() {
        let (a, b) = eigen_structure(0.0, 1, &prm(0.0, 2.0)).unwrap();
        assert!((a - c(0.0, 2f64.sqrt())).norm() < 1e-15);
        assert_eq!(a, b.conj());
        assert!(eigen_structure(1.0, 0, &prm(0.0, 2.0)).is_err());
    }

    proptest! {
        #[test]
        fn eigen_matches_generic_solver(eta in -5.0f64..5.0, l in 1i64..6,
                                        nu in 0.0f64..0.1, beta in prop_oneof![2.0f64..8.0, -8.0f64..-2.0]) {
            let p = prm(nu, beta);
            let (a, b) = eigen_structure(eta, l, &p).unwrap();
            prop_assert_eq!(a.re, -nu * (eta * eta + (l * l) as f64));
            let (x, y) = eig2(zero_mode_matrix(eta, l, &p));
            let (x, y) = if x.im > y.im { (x, y) } else { (y, x) };
            prop_assert!((a - x).norm() < 1e-10 * (1.0 + a.norm()));
            prop_assert!((b - y).norm() < 1e-10 * (1.0 + b.norm()));
        }

        #[test]
        fn inviscid_invariant_is_conserved(eta in -5.0f64..5.0, l in prop_oneof![-5i64..-1, 1i64..5],
                                           t in 0.0f64..50.0, beta in prop_oneof![2.0f64..8.0, -8.0f64..-2.0],
                                           a in -1.0f64..1.0, b in -1.0f64..1.0) {
            let p = prm(0.0, beta);
            let s0 = ZeroModeState::divergence_free(eta, l, c(a, 0.2), c(b, -0.1));
            let s = zero_mode_simple(eta, l, &p, t, s0).unwrap();
            let e0 = zero_mode_invariant(eta, l, &p, &s0);
            let e1 = zero_mode_invariant(eta, l, &p, &s);
            prop_assert!((e0 - e1).abs() < 1e-12 * e0.abs().max(1.0));
        }

        #[test]
        fn heat_factor_commutes(eta in -5.0f64..5.0, l in 1i64..5, t in 0.0f64..20.0, nu in 0.0f64..0.1) {
            let s0 = ZeroModeState::new(c(0.3, 0.1), c(-0.7, 0.4), c(0.2, 0.2));
            let v = zero_mode_simple(eta, l, &prm(nu, 2.0), t, s0).unwrap();
            let i = zero_mode_simple(eta, l, &prm(0.0, 2.0), t, s0).unwrap();
            let e = (-nu * (eta * eta + (l * l) as f64) * t).exp();
            for (x, y) in v.as_array().iter().zip(i.as_array().iter()) {
                prop_assert!((x - e * y).norm() < 1e-13);
            }
        }
    }
}
