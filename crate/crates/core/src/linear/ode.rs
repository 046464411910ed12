//! Explicit integrators for small real ODE systems `y' = f(t, y)`.

use crate::error::{Error, Result};

/// Tolerances for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Tolerance {
    pub fn new(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            max_steps: 10_000_000,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-10)
    }
}

// Dormand–Prince 5(4) tableau
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn combo<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Adaptive Dormand–Prince 5(4) with first-same-as-last reuse.
pub fn dopri5<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    tol: Tolerance,
) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    if t1 < t0 {
        return Err(Error::Integrator(format!("backward interval [{t0}, {t1}]")));
    }
    if t1 == t0 {
        return Ok(y0);
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let scale0 = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(tol.atol);
    let d0 = k1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut h = if d0 > 0.0 {
        (0.01 * scale0 / d0).min(t1 - t0)
    } else {
        (t1 - t0).min(1e-2)
    };
    let mut steps = 0usize;
    while t < t1 {
        steps += 1;
        if steps > tol.max_steps {
            return Err(Error::Integrator(format!("step limit reached at t = {t}")));
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        let k2 = f(t + C2 * h, &combo(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &combo(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &combo(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &combo(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &combo(
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ),
        );
        let y5 = combo(
            &y,
            h,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let k7 = f(t + h, &y5);
        let mut err: f64 = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = tol.atol + tol.rtol * y[i].abs().max(y5[i].abs());
            err = err.max((e / sc).abs());
        }
        if !err.is_finite() {
            return Err(Error::Integrator(format!("non-finite error estimate at t = {t}")));
        }
        if err <= 1.0 {
            t = if last { t1 } else { t + h };
            y = y5;
            k1 = k7;
        }
        let fac = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= fac;
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Integrator(format!("step size underflow at t = {t}")));
        }
    }
    Ok(y)
}

fn rk4_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &combo(y, h, &[(0.5, &k1)]));
    let k3 = f(t + 0.5 * h, &combo(y, h, &[(0.5, &k2)]));
    let k4 = f(t + h, &combo(y, h, &[(1.0, &k3)]));
    combo(
        y,
        h,
        &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)],
    )
}

/// Classical RK4 with step doubling and Richardson extrapolation, halving the
/// step until successive extrapolated results agree to `tol`.
///
/// Deliberately simple; intended as an independent reference for [`dopri5`].
pub fn rk4_richardson<const N: usize, F>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t1: f64,
    tol: f64,
) -> Result<[f64; N]>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let run = |n: usize| {
        let h = (t1 - t0) / n as f64;
        let mut y = y0;
        for i in 0..n {
            y = rk4_step(&f, t0 + i as f64 * h, &y, h);
        }
        y
    };
    let mut n = 64usize;
    let mut coarse = run(n);
    let mut prev: Option<[f64; N]> = None;
    while n <= 1 << 22 {
        let fine = run(2 * n);
        let mut extra = fine;
        for i in 0..N {
            extra[i] = fine[i] + (fine[i] - coarse[i]) / 15.0;
        }
        if let Some(p) = prev {
            let scale = extra.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let diff = (0..N).fold(0.0f64, |m, i| m.max((extra[i] - p[i]).abs()));
            if diff <= tol * scale {
                return Ok(extra);
            }
        }
        prev = Some(extra);
        coarse = fine;
        n *= 2;
    }
    Err(Error::Integrator("Richardson reference did not converge".into()))
}
