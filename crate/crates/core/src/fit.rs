//! Least-squares decay fits in log space.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayModel {
    /// `v = A t^{exponent}`
    PowerLaw,
    /// `v = A exp(−b t³)`; `exponent` holds `b`.
    CubicExponential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub model: DecayModel,
    pub exponent: f64,
    pub amplitude: f64,
    /// RMS of the log-space residuals.
    pub residual: f64,
    pub window: (f64, f64),
}

/// Ordinary least squares `y ≈ a + b x`; returns `(a, b, rms residual)`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Fit("need at least two paired samples".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let rss: f64 = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    Ok((a, b, (rss / n).sqrt()))
}

/// Fits `values(times)` to `model`. Requires at least five rows and strictly
/// positive values.
pub fn fit_decay(times: &[f64], values: &[f64], model: DecayModel) -> Result<DecayFit> {
    if times.len() != values.len() {
        return Err(Error::Fit("times and values differ in length".into()));
    }
    if times.len() < 5 {
        return Err(Error::Fit(format!(
            "need at least 5 samples, got {}",
            times.len()
        )));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::Fit(format!("nonpositive or non-finite value {v}")));
    }
    let ly: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (x, sign) = match model {
        DecayModel::PowerLaw => {
            if times.iter().any(|t| *t <= 0.0) {
                return Err(Error::Fit("power-law fit needs positive times".into()));
            }
            (times.iter().map(|t| t.ln()).collect::<Vec<_>>(), 1.0)
        }
        DecayModel::CubicExponential => (times.iter().map(|t| t.powi(3)).collect(), -1.0),
    };
    let (a, b, residual) = fit_line(&x, &ly)?;
    let lo = times.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = times.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(DecayFit {
        model,
        exponent: sign * b,
        amplitude: a.exp(),
        residual,
        window: (lo, hi),
    })
}

/// `n` logarithmically spaced points in `[a, b]`.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    let mut v: Vec<f64> = (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect();
    v[0] = a;
    v[n - 1] = b;
    v
}

/// `n` evenly spaced points in `[a, b]`.
pub fn lin_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
