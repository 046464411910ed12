//! Time-dependent Fourier multipliers.
//!
//! `m` compensates the stretching term `ṗ/(2p)` on the critical window
//! `[η/k, η/k + C ν^{-1/3}]`; `M` is the ghost weight whose rate
//! `Ṁ/M = −ν^{1/3} / ([ν^{1/3}(t − η/k)]² + 1)` generates extra dissipation
//! near the critical time.
//!
//! Rates are right limits at the branch seams of `m`.

use crate::error::{Error, Result};
use crate::frequency::{symbol_p, Wavevector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierParams {
    pub nu: f64,
    /// Window length in units of `ν^{-1/3}`.
    pub cutoff: f64,
}

impl MultiplierParams {
    pub const DEFAULT_CUTOFF: f64 = 1000.0;

    pub fn new(nu: f64) -> Result<Self> {
        Self::with_cutoff(nu, Self::DEFAULT_CUTOFF)
    }

    pub fn with_cutoff(nu: f64, cutoff: f64) -> Result<Self> {
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::InvalidParams(format!("nu = {nu} must lie in (0, 1]")));
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::InvalidParams(format!("cutoff = {cutoff} must be positive")));
        }
        Ok(Self { nu, cutoff })
    }

    /// `C ν^{-1/3}`
    pub fn window_length(&self) -> f64 {
        self.cutoff * self.nu.powf(-1.0 / 3.0)
    }
}

/// Position of `t` relative to the window of `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Before,
    Inside,
    After,
}

/// Window `[start, end)` and the numerator of the ratio branch, for `k ≠ 0`
/// modes whose window reaches `t ≥ 0`.
struct Window {
    start: f64,
    end: f64,
    numerator_sq: f64,
}

fn window(w: Wavevector, prm: &MultiplierParams) -> Option<Window> {
    if w.k == 0 {
        return None;
    }
    let tc = w.eta / w.k as f64;
    let end = tc + prm.window_length();
    if end < 0.0 {
        return None;
    }
    let numerator_sq = if tc < 0.0 {
        // window already open at t = 0; normalize so m(0) = 1
        symbol_p(0.0, w)
    } else {
        w.horizontal_sq()
    };
    Some(Window {
        start: tc.max(0.0),
        end,
        numerator_sq,
    })
}

fn phase(t: f64, win: &Window) -> Phase {
    if t < win.start {
        Phase::Before
    } else if t < win.end {
        Phase::Inside
    } else {
        Phase::After
    }
}

/// The stretching compensator `m(t, k, η, l)`.
pub fn m_value(t: f64, w: Wavevector, prm: &MultiplierParams) -> f64 {
    let Some(win) = window(w, prm) else {
        return 1.0;
    };
    match phase(t, &win) {
        Phase::Before => 1.0,
        Phase::Inside => (win.numerator_sq / symbol_p(t, w)).sqrt(),
        Phase::After => (win.numerator_sq / symbol_p(win.end, w)).sqrt(),
    }
}

/// `ṁ/m`, equal to `k(η − kt)/p` inside the window and zero outside.
pub fn m_rate(t: f64, w: Wavevector, prm: &MultiplierParams) -> f64 {
    let Some(win) = window(w, prm) else {
        return 0.0;
    };
    match phase(t, &win) {
        Phase::Inside => w.k as f64 * w.sheared_eta(t) / symbol_p(t, w),
        _ => 0.0,
    }
}

/// The ghost weight `M(t, k, η, l)`, valued in `[e^{-π}, 1]`.
pub fn big_m_value(t: f64, w: Wavevector, prm: &MultiplierParams) -> f64 {
    if w.k == 0 {
        return 1.0;
    }
    let c = prm.nu.cbrt();
    let tc = w.eta / w.k as f64;
    ((-c * tc).atan() - (c * (t - tc)).atan()).exp()
}

/// `Ṁ/M = −ν^{1/3} / ([ν^{1/3}(t − η/k)]² + 1)`.
pub fn big_m_rate(t: f64, w: Wavevector, prm: &MultiplierParams) -> f64 {
    if w.k == 0 {
        return 0.0;
    }
    let c = prm.nu.cbrt();
    let s = c * (t - w.eta / w.k as f64);
    -c / (s * s + 1.0)
}

/// Smallest constant for which
/// `1 ≤ C (ν^{-1/6} √(−Ṁ M) + ν^{1/3} |k, η − kt, l|)` holds for every
/// `k ≠ 0` mode; attained as `ν → 0` at the critical time with `M → e^{-π/2}`.
pub const GHOST_LOWER_BOUND_CONSTANT: f64 = 4.810_477_380_965_351; // e^{π/2}

/// Right-hand side of the ghost lower bound, without the constant.
pub fn ghost_lower_bound_terms(t: f64, w: Wavevector, prm: &MultiplierParams) -> f64 {
    let mm = big_m_value(t, w, prm);
    let rate = big_m_rate(t, w, prm);
    prm.nu.powf(-1.0 / 6.0) * (-rate * mm * mm).max(0.0).sqrt()
        + prm.nu.cbrt() * symbol_p(t, w).sqrt()
}
