//! Typed experiment drivers. Each returns plain rows; the dispatcher in the
//! parent module turns them into CSV files.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::{fit_decay, fit_line, lin_space, log_space, DecayFit, DecayModel};
use crate::frequency::{symbol_p, Wavevector};
use crate::linear::{
    classical_liftup, envelope_holds, qk_trajectory, zero_mode_simple, NonzeroModeState,
    PhysicsParams, Tolerance, ZeroModeState,
};
use crate::multipliers::{big_m_rate, big_m_value, m_rate, m_value, MultiplierParams};

// ---------------------------------------------------------------- multipliers

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierSample {
    pub t: f64,
    pub w: Wavevector,
    pub nu: f64,
    pub m: f64,
    pub big_m: f64,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierCheck {
    pub samples: Vec<MultiplierSample>,
    pub violations: usize,
    /// Samples used for the rate check.
    pub rate_samples: usize,
    /// `max |∫₀ᵗ Ṁ/M − log M(t)|`
    pub big_m_rate_error: f64,
    /// `max |∫₀ᵗ ṁ/m − log m(t)|`
    pub m_rate_error: f64,
}

/// Random `(t, k, η, l, ν)` with `|k|, |l| < 20`, `|η| < 200`, `t < 10⁴`,
/// `ν ∈ [10⁻⁹, 1]` log-uniform.
pub fn random_multiplier_points(n: usize, seed: u64) -> Vec<(f64, Wavevector, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let k = rng.gen_range(-20i64..20);
            let eta = rng.gen_range(-200.0..200.0);
            let l = rng.gen_range(-20i64..20);
            let t = rng.gen_range(0.0..1e4);
            let nu = 10f64.powf(rng.gen_range(-9.0..0.0));
            (t, Wavevector::new(k, eta, l), nu)
        })
        .collect()
}

/// Composite 5-point Gauss-Legendre rule on `[a, b]` with panels of at most
/// `h`. Panel endpoints are never evaluated, so one-sided limits at the
/// interval ends are respected.
fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, h: f64) -> f64 {
    const X: [f64; 5] = [
        0.0,
        0.538_469_310_105_683_1,
        -0.538_469_310_105_683_1,
        0.906_179_845_938_664,
        -0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    if b <= a {
        return 0.0;
    }
    let n = ((b - a) / h).ceil().max(1.0) as usize;
    let dx = (b - a) / n as f64;
    (0..n)
        .map(|i| {
            let mid = a + (i as f64 + 0.5) * dx;
            X.iter().zip(W).map(|(x, w)| w * f(mid + 0.5 * dx * x)).sum::<f64>()
        })
        .sum::<f64>()
        * 0.5
        * dx
}

/// Integral over `[0, t]` split at the given breakpoints.
fn piecewise_integral<F: Fn(f64) -> f64 + Copy>(f: F, t: f64, breaks: &[f64], h: f64) -> f64 {
    let mut pts: Vec<f64> = breaks.iter().cloned().filter(|b| *b > 0.0 && *b < t).collect();
    pts.push(0.0);
    pts.push(t);
    pts.sort_by(f64::total_cmp);
    pts.windows(2).map(|w| gauss_legendre(f, w[0], w[1], h)).sum()
}

/// Checks `e^{−π} ≤ M ≤ 1` and `ν^{1/3}/2000 ≤ m ≤ 1` on `n` random points,
/// and integrates both rates numerically on the first `rate_samples`.
pub fn multiplier_check(n: usize, rate_samples: usize, seed: u64) -> Result<MultiplierCheck> {
    let pts = random_multiplier_points(n, seed);
    let samples = pts
        .iter()
        .map(|&(t, w, nu)| {
            let mp = MultiplierParams::new(nu)?;
            let m = m_value(t, w, &mp);
            let big_m = big_m_value(t, w, &mp);
            let violation = !(big_m <= 1.0
                && big_m >= (-std::f64::consts::PI).exp()
                && m <= 1.0
                && m >= nu.cbrt() / 2000.0);
            Ok(MultiplierSample {
                t,
                w,
                nu,
                m,
                big_m,
                violation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let violations = samples.iter().filter(|s| s.violation).count();
    let rate_samples = rate_samples.min(n);
    let errors = pts[..rate_samples]
        .par_iter()
        .map(|&(t, w, nu)| {
            let mp = MultiplierParams::new(nu)?;
            let mut breaks = Vec::new();
            if w.k != 0 {
                let tc = w.eta / w.k as f64;
                breaks.extend([tc, tc + mp.window_length()]);
            }
            let h = 0.1 * nu.powf(-1.0 / 3.0).min(1.0);
            let ib = piecewise_integral(|s| big_m_rate(s, w, &mp), t, &breaks, h);
            let im = piecewise_integral(|s| m_rate(s, w, &mp), t, &breaks, h);
            Ok((
                (ib - big_m_value(t, w, &mp).ln()).abs(),
                (im - m_value(t, w, &mp).ln()).abs(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let big_m_rate_error = errors.iter().fold(0.0f64, |a, e| a.max(e.0));
    let m_rate_error = errors.iter().fold(0.0f64, |a, e| a.max(e.1));
    Ok(MultiplierCheck {
        samples,
        violations,
        rate_samples,
        big_m_rate_error,
        m_rate_error,
    })
}

// ---------------------------------------------------------- linear, k ≠ 0

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearModeRow {
    pub t: f64,
    /// `m² (|Q̂|² + |K|²)`
    pub energy: f64,
    /// `e^{−ν k² t³/12} (|Q̂|² + |K|²)(0)`
    pub envelope: f64,
    pub log_energy: f64,
    pub log_envelope: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModesResult {
    pub rows: Vec<LinearModeRow>,
    /// `b` in `log(m² E) ≈ a − b t³`, fitted over `t > 0`.
    pub cubic_rate: f64,
    pub violations: usize,
}

/// Tracks one `k ≠ 0` mode from `s0` on `times` and compares with the
/// enhanced-dissipation envelope.
pub fn linear_modes(
    w: Wavevector,
    s0: NonzeroModeState,
    prm: &PhysicsParams,
    times: &[f64],
) -> Result<LinearModesResult> {
    let mp = MultiplierParams::new(prm.nu)?;
    let traj = qk_trajectory(w, s0, prm, times, Tolerance::new(1e-10))?;
    let e0 = s0.energy();
    let k = w.k as f64;
    let mut rows = Vec::with_capacity(times.len());
    for (&t, s) in times.iter().zip(&traj) {
        let log_energy = 2.0 * m_value(t, w, &mp).ln() + s.log_energy();
        let log_envelope = e0.ln() - prm.nu * k * k * t.powi(3) / 12.0;
        rows.push(LinearModeRow {
            t,
            energy: log_energy.exp(),
            envelope: log_envelope.exp(),
            log_energy,
            log_envelope,
            holds: envelope_holds(w, s0, prm, t, s)?,
        });
    }
    let (x, y): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.t > 0.0)
        .map(|r| (r.t.powi(3), r.log_energy))
        .unzip();
    let (_, slope, _) = fit_line(&x, &y)?;
    let violations = rows.iter().filter(|r| !r.holds).count();
    Ok(LinearModesResult {
        rows,
        cubic_rate: -slope,
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingParams {
    pub nu: f64,
    pub beta: f64,
    pub k: i64,
    pub ls: [i64; 2],
    pub eta_range: (f64, f64),
    pub eta_points: usize,
    pub window: (f64, f64),
    pub samples: usize,
}

impl Default for DampingParams {
    fn default() -> Self {
        Self {
            nu: 1e-4,
            beta: 2.0,
            k: 1,
            ls: [1, 2],
            eta_range: (-4.0, 4.0),
            eta_points: 161,
            window: (10.0, 100.0),
            samples: 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DampingResult {
    /// `(t, ‖Û²≠(t)‖, same without the viscous factor)`
    pub rows: Vec<(f64, f64, f64)>,
    pub fit: DecayFit,
    /// Fit of the inviscid part alone.
    pub inviscid_fit: DecayFit,
}

/// Decay of `‖Û²≠(t)‖` from `Û²(0) = e^{−η²}`, `Ŵ(0) = 0`, with the norm a
/// Riemann sum over the `η` grid and a plain sum over `l`.
pub fn inviscid_damping(p: &DampingParams) -> Result<DampingResult> {
    let prm = PhysicsParams::new(p.nu, p.beta)?;
    let times = log_space(p.window.0, p.window.1, p.samples);
    let etas = lin_space(p.eta_range.0, p.eta_range.1, p.eta_points);
    let d_eta = (p.eta_range.1 - p.eta_range.0) / (p.eta_points.max(2) - 1) as f64;
    let modes: Vec<Wavevector> = p
        .ls
        .iter()
        .flat_map(|&l| etas.iter().map(move |&eta| Wavevector::new(p.k, eta, l)))
        .collect();
    let per_mode = modes
        .par_iter()
        .map(|&w| {
            let u2 = (-w.eta * w.eta).exp();
            let s0 = NonzeroModeState::new(Complex64::new(-symbol_p(0.0, w) * u2, 0.0), Complex64::new(0.0, 0.0));
            let traj = qk_trajectory(w, s0, &prm, &times, Tolerance::new(1e-10))?;
            Ok(times
                .iter()
                .zip(traj)
                .map(|(&t, s)| {
                    let p = symbol_p(t, w);
                    (
                        (s.value().q_hat / p).norm_sqr() * d_eta,
                        (s.inviscid.q_hat / p).norm_sqr() * d_eta,
                    )
                })
                .collect::<Vec<(f64, f64)>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<(f64, f64, f64)> = times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let full = per_mode.iter().map(|v| v[i].0).sum::<f64>().sqrt();
            let inviscid = per_mode.iter().map(|v| v[i].1).sum::<f64>().sqrt();
            (t, full, inviscid)
        })
        .collect();
    let ts: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let full: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let inviscid: Vec<f64> = rows.iter().map(|r| r.2).collect();
    Ok(DampingResult {
        fit: fit_decay(&ts, &full, DecayModel::PowerLaw)?,
        inviscid_fit: fit_decay(&ts, &inviscid, DecayModel::PowerLaw)?,
        rows,
    })
}

// ------------------------------------------------------- linear, k = 0

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftupRow {
    pub nu: f64,
    pub t: f64,
    /// `‖ũ₀(t)‖` under the rotating dynamics.
    pub rotating: f64,
    /// `‖u₀(t)‖` under the non-rotating reference.
    pub reference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftupResult {
    pub rows: Vec<LiftupRow>,
    pub initial_norm: f64,
    /// Per `ν`: `(ν, sup rotating / initial, ν · sup reference / initial)`.
    pub summary: Vec<(f64, f64, f64)>,
}

/// Default data: a single wall-normal perturbation at `(η, l)`.
pub fn liftup_data(eta: f64, l: i64) -> Result<Vec<(f64, i64, ZeroModeState)>> {
    if l == 0 {
        return Err(Error::InvalidParams("lift-up data needs l != 0".into()));
    }
    Ok(vec![(
        eta,
        l,
        ZeroModeState::divergence_free(eta, l, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
    )])
}

fn field_norm(states: impl Iterator<Item = ZeroModeState>) -> f64 {
    states.map(|s| s.norm().powi(2)).sum::<f64>().sqrt()
}

/// Compares the rotating `k = 0` evolution with the non-rotating lift-up on
/// the same data, sampling `samples` times in `[0, 4/(ν p_min)]` per `ν`.
pub fn liftup_comparison(
    beta: f64,
    nus: &[f64],
    data: &[(f64, i64, ZeroModeState)],
    samples: usize,
) -> Result<LiftupResult> {
    if data.is_empty() {
        return Err(Error::InvalidParams("empty lift-up data".into()));
    }
    let initial_norm = field_norm(data.iter().map(|d| d.2));
    let p_min = data
        .iter()
        .map(|(eta, l, _)| eta * eta + (*l as f64).powi(2))
        .fold(f64::INFINITY, f64::min);
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &nu in nus {
        let prm = PhysicsParams::new(nu, beta)?;
        if !(nu > 0.0) {
            return Err(Error::InvalidParams("lift-up comparison needs nu > 0".into()));
        }
        let times = lin_space(0.0, 4.0 / (nu * p_min), samples);
        let block = times
            .par_iter()
            .map(|&t| {
                let rot = data
                    .iter()
                    .map(|&(eta, l, s)| zero_mode_simple(eta, l, &prm, t, s))
                    .collect::<Result<Vec<_>>>()?;
                let reference = data.iter().map(|&(eta, l, s)| classical_liftup(eta, l, nu, t, s));
                Ok(LiftupRow {
                    nu,
                    t,
                    rotating: field_norm(rot.into_iter()),
                    reference: field_norm(reference),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let sup_rot = block.iter().fold(0.0f64, |a, r| a.max(r.rotating));
        let sup_ref = block.iter().fold(0.0f64, |a, r| a.max(r.reference));
        summary.push((nu, sup_rot / initial_norm, nu * sup_ref / initial_norm));
        rows.extend(block);
    }
    Ok(LiftupResult {
        rows,
        initial_norm,
        summary,
    })
}
