use crate::error::{Error, Result};

/// Viscosity and rotation strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsParams {
    pub nu: f64,
    pub beta: f64,
}

impl PhysicsParams {
    /// Accepts `ν ≥ 0` and any `β` with `β(β − 1) > 0`. Values with
    /// `|β| < 2` are accepted with a warning.
    pub fn new(nu: f64, beta: f64) -> Result<Self> {
        if !(nu.is_finite() && nu >= 0.0) {
            return Err(Error::InvalidParams(format!("nu = {nu} must be nonnegative")));
        }
        if !beta.is_finite() || (0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidParams(format!(
                "beta = {beta}: need beta > 1 or beta < 0"
            )));
        }
        if beta.abs() < 2.0 {
            log::warn!("beta = {beta} lies outside |beta| >= 2, where stability is not guaranteed");
        }
        Ok(Self { nu, beta })
    }

    /// `√(β/(β − 1))`, the scale in `K = i √(β/(β − 1)) p^{1/2} Ŵ`.
    pub fn k_scale(&self) -> f64 {
        (self.beta / (self.beta - 1.0)).sqrt()
    }

    /// `β / √(β/(β − 1)) = sign(β) √(β(β − 1))`, the `(Q, K)` coupling.
    pub fn coupling(&self) -> f64 {
        self.beta.signum() * (self.beta * (self.beta - 1.0)).sqrt()
    }

    /// `√(β(β − 1))`
    pub fn rotation_frequency(&self) -> f64 {
        (self.beta * (self.beta - 1.0)).sqrt()
    }

    /// Inertial-wave frequency `h = √(β(β − 1)) |l| / |η, l|`.
    pub fn h(&self, eta: f64, l: i64) -> f64 {
        let lf = l as f64;
        self.rotation_frequency() * lf.abs() / (eta * eta + lf * lf).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(PhysicsParams::new(0.01, 0.5).is_err());
        assert!(PhysicsParams::new(0.01, 0.0).is_err());
        assert!(PhysicsParams::new(0.01, 1.0).is_err());
        assert!(PhysicsParams::new(-1.0, 2.0).is_err());
        assert!(PhysicsParams::new(0.01, 1.5).is_ok());
        assert!(PhysicsParams::new(0.0, -2.0).is_ok());
    }

    #[test]
    fn coupling_sign_follows_beta() {
        let p = PhysicsParams::new(0.0, 2.0).unwrap();
        assert!((p.coupling() - 2f64.sqrt()).abs() < 1e-15);
        let p = PhysicsParams::new(0.0, -2.0).unwrap();
        assert!((p.coupling() + 6f64.sqrt()).abs() < 1e-15);
        assert!((p.coupling() - p.beta / p.k_scale()).abs() < 1e-14);
        assert!((p.h(0.0, 3) - 6f64.sqrt()).abs() < 1e-15);
    }
}
