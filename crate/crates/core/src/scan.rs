//! Bisection for the critical initial amplitude `ε_c(ν)` and the fit
//! `log ε_c = γ log ν + c`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::linear::PhysicsParams;
use crate::nonlinear::{run, SimulationConfig, Verdict};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSettings {
    /// Initial stable guess `ε / ν`.
    pub lo_ratio: f64,
    /// Initial unstable guess `ε / ν`.
    pub hi_ratio: f64,
    /// Target relative bracket width `ε_hi / ε_lo − 1`.
    pub tol: f64,
    /// Factor applied when a guess lands on the wrong side.
    pub expansion: f64,
    pub max_expansions: usize,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            lo_ratio: 1e3,
            hi_ratio: 1e5,
            tol: 0.1,
            expansion: 10.0,
            max_expansions: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketKind {
    /// Stable and unstable amplitudes both found.
    Bracketed,
    /// No unstable amplitude found; `eps_critical` is a lower bound.
    LowerBound,
    /// No stable amplitude found; `eps_critical` is an upper bound.
    UpperBound,
}

impl BracketKind {
    pub fn label(&self) -> &'static str {
        match self {
            BracketKind::Bracketed => "bracketed",
            BracketKind::LowerBound => "lower_bound",
            BracketKind::UpperBound => "upper_bound",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub nu: f64,
    pub eps_critical: f64,
    /// Largest amplitude found stable.
    pub eps_stable: Option<f64>,
    /// Smallest amplitude found unstable.
    pub eps_unstable: Option<f64>,
    pub bracket: BracketKind,
    /// Verdict of the run at `eps_unstable`, or of the last run.
    pub verdict: String,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdScanResult {
    /// Sorted by increasing `ν`.
    pub rows: Vec<ScanRow>,
    pub fitted_gamma: f64,
    /// RMS log-space residual of the fit.
    pub residual: f64,
    /// `ε_c` nondecreasing in `ν`.
    pub monotone: bool,
}

/// Critical amplitude for one viscosity, given a stability oracle.
pub fn bisect_threshold<F>(nu: f64, s: &ScanSettings, mut is_stable: F) -> Result<ScanRow>
where
    F: FnMut(f64) -> Result<Verdict>,
{
    if !(nu > 0.0) {
        return Err(Error::InvalidParams(format!("nu = {nu} must be positive")));
    }
    if !(s.tol > 0.0 && s.expansion > 1.0 && s.lo_ratio > 0.0 && s.hi_ratio > s.lo_ratio) {
        return Err(Error::InvalidParams(format!("invalid scan settings {s:?}")));
    }
    let mut runs = 0usize;
    let mut probe = |eps: f64, runs: &mut usize| -> Result<Verdict> {
        *runs += 1;
        let v = is_stable(eps)?;
        log::debug!("nu={nu:e} eps={eps:e}: {v}");
        Ok(v)
    };
    let mut lo = s.lo_ratio * nu;
    let mut hi = s.hi_ratio * nu;
    let mut lo_ok = false;
    let mut last = Verdict::Stable;
    for _ in 0..=s.max_expansions {
        let v = probe(lo, &mut runs)?;
        if v.is_stable() {
            lo_ok = true;
            break;
        }
        hi = lo;
        last = v;
        lo /= s.expansion;
    }
    if !lo_ok {
        return Ok(ScanRow {
            nu,
            eps_critical: hi,
            eps_stable: None,
            eps_unstable: Some(hi),
            bracket: BracketKind::UpperBound,
            verdict: last.to_string(),
            runs,
        });
    }
    let mut hi_bad = hi < s.hi_ratio * nu;
    if !hi_bad {
        for _ in 0..=s.max_expansions {
            let v = probe(hi, &mut runs)?;
            if !v.is_stable() {
                hi_bad = true;
                last = v;
                break;
            }
            lo = hi;
            hi *= s.expansion;
        }
    }
    if !hi_bad {
        return Ok(ScanRow {
            nu,
            eps_critical: lo,
            eps_stable: Some(lo),
            eps_unstable: None,
            bracket: BracketKind::LowerBound,
            verdict: Verdict::Stable.to_string(),
            runs,
        });
    }
    while hi / lo - 1.0 > s.tol {
        let mid = (lo * hi).sqrt();
        let v = probe(mid, &mut runs)?;
        if v.is_stable() {
            lo = mid;
        } else {
            hi = mid;
            last = v;
        }
    }
    Ok(ScanRow {
        nu,
        eps_critical: (lo * hi).sqrt(),
        eps_stable: Some(lo),
        eps_unstable: Some(hi),
        bracket: BracketKind::Bracketed,
        verdict: last.to_string(),
        runs,
    })
}

/// Fits `γ` to scan rows and checks monotonicity. Rows are sorted by `ν`.
pub fn summarize(mut rows: Vec<ScanRow>) -> Result<ThresholdScanResult> {
    rows.sort_by(|a, b| a.nu.total_cmp(&b.nu));
    let x: Vec<f64> = rows.iter().map(|r| r.nu.ln()).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.eps_critical.ln()).collect();
    let (_, gamma, residual) = fit_line(&x, &y)?;
    let monotone = rows.windows(2).all(|w| w[1].eps_critical >= w[0].eps_critical);
    if !monotone {
        log::warn!("critical amplitude is not nondecreasing in nu");
    }
    Ok(ThresholdScanResult {
        rows,
        fitted_gamma: gamma,
        residual,
        monotone,
    })
}

/// Scans with an arbitrary stability oracle `is_stable(ν, ε)`, one job per `ν`.
pub fn threshold_scan_with<F>(nus: &[f64], s: &ScanSettings, is_stable: F) -> Result<ThresholdScanResult>
where
    F: Fn(f64, f64) -> Result<Verdict> + Sync,
{
    let mut sorted = nus.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParams("viscosities must be distinct".into()));
    }
    let rows = nus
        .par_iter()
        .map(|&nu| bisect_threshold(nu, s, |eps| is_stable(nu, eps)))
        .collect::<Result<Vec<_>>>()?;
    summarize(rows)
}

/// Scans the full solver: `base` supplies everything except `ν` and `ε`.
pub fn threshold_scan(base: &SimulationConfig, nus: &[f64], s: &ScanSettings) -> Result<ThresholdScanResult> {
    threshold_scan_with(nus, s, |nu, eps| {
        let mut cfg = base.clone();
        cfg.prm = PhysicsParams::new(nu, base.prm.beta)?;
        cfg.epsilon = eps;
        cfg.stop_when_unstable = true;
        Ok(run(&cfg)?.verdict)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn oracle(c: f64, gamma: f64) -> impl Fn(f64, f64) -> Result<Verdict> + Sync {
        move |nu, eps| {
            Ok(if eps < c * nu.powf(gamma) {
                Verdict::Stable
            } else {
                Verdict::Blowup {
                    time: 1.0,
                    reason: "synthetic".into(),
                }
            })
        }
    }

    fn tight() -> ScanSettings {
        ScanSettings {
            lo_ratio: 0.01,
            hi_ratio: 1.0,
            tol: 1e-10,
            ..ScanSettings::default()
        }
    }

    #[test]
    fn synthetic_linear_threshold_gives_unit_gamma() {
        let r = threshold_scan_with(&[1e-2, 2.5e-3, 5e-3], &tight(), oracle(0.3, 1.0)).unwrap();
        assert!((r.fitted_gamma - 1.0).abs() < 1e-6, "{}", r.fitted_gamma);
        assert!(r.monotone);
        let nus: Vec<f64> = r.rows.iter().map(|x| x.nu).collect();
        assert_eq!(nus, vec![2.5e-3, 5e-3, 1e-2]);
        for row in &r.rows {
            assert_eq!(row.bracket, BracketKind::Bracketed);
            assert!((row.eps_critical / (0.3 * row.nu) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn other_exponents_are_recovered() {
        let r = threshold_scan_with(&[1e-3, 1e-2, 1e-1], &tight(), oracle(0.05, 1.5)).unwrap();
        assert!((r.fitted_gamma - 1.5).abs() < 1e-6);
    }

    #[test]
    fn brackets_expand_and_flag_bounds() {
        let s = ScanSettings {
            lo_ratio: 1.0,
            hi_ratio: 2.0,
            tol: 1e-6,
            expansion: 10.0,
            max_expansions: 2,
        };
        let row = bisect_threshold(0.1, &s, |e| oracle(30.0, 1.0)(0.1, e)).unwrap();
        assert_eq!(row.bracket, BracketKind::Bracketed);
        assert!((row.eps_critical - 3.0).abs() < 1e-5);
        let row = bisect_threshold(0.1, &s, |e| oracle(1e6, 1.0)(0.1, e)).unwrap();
        assert_eq!(row.bracket, BracketKind::LowerBound);
        assert!(row.eps_critical > 0.0 && row.eps_unstable.is_none());
        let row = bisect_threshold(0.1, &s, |e| oracle(1e-6, 1.0)(0.1, e)).unwrap();
        assert_eq!(row.bracket, BracketKind::UpperBound);
        assert!(row.eps_critical > 0.0 && row.eps_stable.is_none());
    }

    #[test]
    fn rejects_duplicate_viscosities() {
        assert!(threshold_scan_with(&[1e-2, 1e-2], &tight(), oracle(1.0, 1.0)).is_err());
    }
}
