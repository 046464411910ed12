//! Energy ledger: weighted norms of the good unknowns and of the velocity
//! pieces, with running time integrals of the dissipation and ghost terms.
//!
//! With `N = σ − 2` and `⟨κ⟩ = (1 + k² + η² + l²)^{1/2}`:
//! `Q = −p Û²`, `W = i l Û¹ − i k Û³`, `K = i √(β/(β−1)) p^{1/2} W`.

use num_complex::Complex64;

use super::config::SimulationConfig;
use crate::frequency::{symbol_p, SpectralField};
use crate::multipliers::{big_m_rate, big_m_value, m_value, MultiplierParams};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Constant in the pointwise bound
/// `|Û^{1,3}_≠| ≤ C |k, l|^{-2} (|m M K| + |m M Q|)`.
pub const POINTWISE_BOUND_CONSTANT: f64 = 4.0;

/// Instantaneous norms at one time.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InstantNorms {
    pub mmq_noteq: f64,
    pub mmk_noteq: f64,
    pub q0: f64,
    pub k0: f64,
    pub tilde_u0: [f64; 3],
    pub bar_u0_1: f64,
    pub bar_u0_3: f64,
    pub u_noteq: [f64; 3],
    pub energy: f64,
    pub pointwise_violations: usize,
    /// Integrands (squared) of the time-integrated terms.
    pub ghost_q_rate: f64,
    pub ghost_k_rate: f64,
    pub diss_q_rate: f64,
    pub diss_k_rate: f64,
    pub diss_q0_rate: f64,
    pub diss_k0_rate: f64,
}

/// One ledger row. Integrated quantities are reported as square roots.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LedgerRow {
    pub t: f64,
    pub mmq_noteq_hn: f64,
    pub mmk_noteq_hn: f64,
    pub ghost_q: f64,
    pub ghost_k: f64,
    pub q0_hn: f64,
    pub k0_hn: f64,
    pub tilde_u0_1_hn: f64,
    pub tilde_u0_2_hn: f64,
    pub tilde_u0_3_hn: f64,
    pub bar_u0_1_hn1: f64,
    pub bar_u0_3_hn1: f64,
    pub u_noteq_1_hn: f64,
    pub u_noteq_2_hn: f64,
    pub u_noteq_3_hn: f64,
    pub diss_q: f64,
    pub diss_k: f64,
    pub diss_q0: f64,
    pub diss_k0: f64,
    pub bootstrap_q: f64,
    pub bootstrap_k: f64,
    pub bootstrap_q0: f64,
    pub bootstrap_k0: f64,
    pub energy: f64,
    pub pointwise_violations: usize,
}

impl LedgerRow {
    /// CSV header; each column names the quantity it tracks.
    pub const HEADER: [&'static str; 25] = [
        "t",
        "mMQ_noteq_HN=||m M Q2_neq||_{H^N}",
        "mMK_noteq_HN=||m M K2_neq||_{H^N}",
        "ghost_Q=(int ||sqrt(-dM/dt M) m Q2_neq||_{H^N}^2 dt)^{1/2}",
        "ghost_K=(int ||sqrt(-dM/dt M) m K2_neq||_{H^N}^2 dt)^{1/2}",
        "Q0_HN=||Q2_0||_{H^N}",
        "K0_HN=||K2_0||_{H^N}",
        "tildeU0_1_HN=||tilde u0^1||_{H^N}",
        "tildeU0_2_HN=||tilde u0^2||_{H^N}",
        "tildeU0_3_HN=||tilde u0^3||_{H^N}",
        "barU0_1_HN1=||bar u0^1||_{H^{N+1}}",
        "barU0_3_HN1=||bar u0^3||_{H^{N+1}}",
        "Uneq_1_HN=||U^1_neq||_{H^N}",
        "Uneq_2_HN=||U^2_neq||_{H^N}",
        "Uneq_3_HN=||U^3_neq||_{H^N}",
        "diss_Q=(nu int ||grad_L m M Q2_neq||_{H^N}^2 dt)^{1/2}",
        "diss_K=(nu int ||grad_L m M K2_neq||_{H^N}^2 dt)^{1/2}",
        "diss_Q0=(nu int ||grad Q2_0||_{H^N}^2 dt)^{1/2}",
        "diss_K0=(nu int ||grad K2_0||_{H^N}^2 dt)^{1/2}",
        "bootstrap_Q=sup mMQ_noteq_HN + diss_Q + ghost_Q",
        "bootstrap_K=sup mMK_noteq_HN + diss_K + ghost_K",
        "bootstrap_Q0=sup Q0_HN + diss_Q0",
        "bootstrap_K0=sup K0_HN + diss_K0",
        "energy=||U||_{L^2}",
        "pointwise_violations=#modes with |U^{1,3}_neq| > 4 |k l|^-2 (|mMK|+|mMQ|)",
    ];

    pub fn values(&self) -> [f64; 25] {
        [
            self.t,
            self.mmq_noteq_hn,
            self.mmk_noteq_hn,
            self.ghost_q,
            self.ghost_k,
            self.q0_hn,
            self.k0_hn,
            self.tilde_u0_1_hn,
            self.tilde_u0_2_hn,
            self.tilde_u0_3_hn,
            self.bar_u0_1_hn1,
            self.bar_u0_3_hn1,
            self.u_noteq_1_hn,
            self.u_noteq_2_hn,
            self.u_noteq_3_hn,
            self.diss_q,
            self.diss_k,
            self.diss_q0,
            self.diss_k0,
            self.bootstrap_q,
            self.bootstrap_k,
            self.bootstrap_q0,
            self.bootstrap_k0,
            self.energy,
            self.pointwise_violations as f64,
        ]
    }

    /// Quantities compared against the bootstrap bound, with their names.
    pub fn bounded_quantities(&self) -> [(&'static str, f64); 13] {
        [
            ("bootstrap_Q", self.bootstrap_q),
            ("bootstrap_K", self.bootstrap_k),
            ("bootstrap_Q0", self.bootstrap_q0),
            ("bootstrap_K0", self.bootstrap_k0),
            ("tildeU0_1_HN", self.tilde_u0_1_hn),
            ("tildeU0_2_HN", self.tilde_u0_2_hn),
            ("tildeU0_3_HN", self.tilde_u0_3_hn),
            ("barU0_1_HN1", self.bar_u0_1_hn1),
            ("barU0_3_HN1", self.bar_u0_3_hn1),
            ("Uneq_1_HN", self.u_noteq_1_hn),
            ("Uneq_2_HN", self.u_noteq_2_hn),
            ("Uneq_3_HN", self.u_noteq_3_hn),
            ("energy", self.energy),
        ]
    }

    /// Largest bounded quantity and its name.
    pub fn worst(&self) -> (&'static str, f64) {
        self.bounded_quantities()
            .into_iter()
            .fold(("none", 0.0), |a, b| if b.1 > a.1 || b.1.is_nan() { b } else { a })
    }
}

/// Evaluates every instantaneous norm of `state` at its frame time.
pub fn instant_norms(state: &SpectralField, cfg: &SimulationConfig) -> InstantNorms {
    let g = state.grid;
    let t = state.frame_time;
    let n_idx = cfg.n_index();
    let nu = cfg.prm.nu;
    let kscale = cfg.prm.k_scale();
    let mp = MultiplierParams::new(nu.clamp(f64::MIN_POSITIVE, 1.0))
        .expect("clamped viscosity is valid");
    let mut out = InstantNorms::default();
    let mut acc = [0.0f64; 13];
    for idx in 0..g.len() {
        let u = [state.comps[0][idx], state.comps[1][idx], state.comps[2][idx]];
        let e = u[0].norm_sqr() + u[1].norm_sqr() + u[2].norm_sqr();
        if e == 0.0 {
            continue;
        }
        out.energy += e;
        let w = g.wavevector_at(idx);
        let (k, l) = (w.k as f64, w.l as f64);
        let p = symbol_p(t, w);
        let bracket = 1.0 + w.norm_sq();
        let wn = bracket.powf(n_idx);
        let q = -p * u[1];
        let wv = I * l * u[0] - I * k * u[2];
        let kk = I * kscale * p.sqrt() * wv;
        if w.k != 0 {
            let mm = m_value(t, w, &mp) * big_m_value(t, w, &mp);
            let (q2, k2) = ((mm * q).norm_sqr(), (mm * kk).norm_sqr());
            acc[0] += wn * q2;
            acc[1] += wn * k2;
            let ghost = -big_m_rate(t, w, &mp);
            out.ghost_q_rate += ghost * wn * q2;
            out.ghost_k_rate += ghost * wn * k2;
            out.diss_q_rate += nu * p * wn * q2;
            out.diss_k_rate += nu * p * wn * k2;
            for c in 0..3 {
                acc[2 + c] += wn * u[c].norm_sqr();
            }
            let kl2 = w.horizontal_sq();
            let bound = POINTWISE_BOUND_CONSTANT / kl2 * mm * (kk.norm() + q.norm());
            for c in [0, 2] {
                if u[c].norm() > bound * (1.0 + 1e-12) {
                    out.pointwise_violations += 1;
                }
            }
        } else {
            acc[5] += wn * q.norm_sqr();
            acc[6] += wn * kk.norm_sqr();
            out.diss_q0_rate += nu * p * wn * q.norm_sqr();
            out.diss_k0_rate += nu * p * wn * kk.norm_sqr();
            if w.l != 0 {
                for c in 0..3 {
                    acc[7 + c] += wn * u[c].norm_sqr();
                }
            } else {
                let wn1 = wn * bracket;
                acc[10] += wn1 * u[0].norm_sqr();
                acc[11] += wn1 * u[2].norm_sqr();
            }
        }
    }
    let s = |v: f64| v.sqrt();
    out.mmq_noteq = s(acc[0]);
    out.mmk_noteq = s(acc[1]);
    out.u_noteq = [s(acc[2]), s(acc[3]), s(acc[4])];
    out.q0 = s(acc[5]);
    out.k0 = s(acc[6]);
    out.tilde_u0 = [s(acc[7]), s(acc[8]), s(acc[9])];
    out.bar_u0_1 = s(acc[10]);
    out.bar_u0_3 = s(acc[11]);
    out.energy = s(out.energy);
    out
}

/// Running sups and trapezoidal time integrals.
#[derive(Debug, Clone, Default)]
pub struct LedgerTracker {
    last: Option<(f64, InstantNorms)>,
    ghost_q: f64,
    ghost_k: f64,
    diss_q: f64,
    diss_k: f64,
    diss_q0: f64,
    diss_k0: f64,
    sup_q: f64,
    sup_k: f64,
    sup_q0: f64,
    sup_k0: f64,
}

impl LedgerTracker {
    pub fn new() -> Self {
        Self::default()
    }

    /// Folds in the state at its frame time and returns the current row.
    pub fn observe(&mut self, state: &SpectralField, cfg: &SimulationConfig) -> LedgerRow {
        let t = state.frame_time;
        let now = instant_norms(state, cfg);
        if let Some((t_prev, prev)) = self.last {
            let h = 0.5 * (t - t_prev);
            self.ghost_q += h * (prev.ghost_q_rate + now.ghost_q_rate);
            self.ghost_k += h * (prev.ghost_k_rate + now.ghost_k_rate);
            self.diss_q += h * (prev.diss_q_rate + now.diss_q_rate);
            self.diss_k += h * (prev.diss_k_rate + now.diss_k_rate);
            self.diss_q0 += h * (prev.diss_q0_rate + now.diss_q0_rate);
            self.diss_k0 += h * (prev.diss_k0_rate + now.diss_k0_rate);
        }
        self.sup_q = self.sup_q.max(now.mmq_noteq);
        self.sup_k = self.sup_k.max(now.mmk_noteq);
        self.sup_q0 = self.sup_q0.max(now.q0);
        self.sup_k0 = self.sup_k0.max(now.k0);
        self.last = Some((t, now));
        let r = |v: f64| v.max(0.0).sqrt();
        LedgerRow {
            t,
            mmq_noteq_hn: now.mmq_noteq,
            mmk_noteq_hn: now.mmk_noteq,
            ghost_q: r(self.ghost_q),
            ghost_k: r(self.ghost_k),
            q0_hn: now.q0,
            k0_hn: now.k0,
            tilde_u0_1_hn: now.tilde_u0[0],
            tilde_u0_2_hn: now.tilde_u0[1],
            tilde_u0_3_hn: now.tilde_u0[2],
            bar_u0_1_hn1: now.bar_u0_1,
            bar_u0_3_hn1: now.bar_u0_3,
            u_noteq_1_hn: now.u_noteq[0],
            u_noteq_2_hn: now.u_noteq[1],
            u_noteq_3_hn: now.u_noteq[2],
            diss_q: r(self.diss_q),
            diss_k: r(self.diss_k),
            diss_q0: r(self.diss_q0),
            diss_k0: r(self.diss_k0),
            bootstrap_q: self.sup_q + r(self.diss_q) + r(self.ghost_q),
            bootstrap_k: self.sup_k + r(self.diss_k) + r(self.ghost_k),
            bootstrap_q0: self.sup_q0 + r(self.diss_q0),
            bootstrap_k0: self.sup_k0 + r(self.diss_k0),
            energy: now.energy,
            pointwise_violations: now.pointwise_violations,
        }
    }
}

/// Ledger row for a single snapshot, with empty time history.
pub fn diagnostics(state: &SpectralField, cfg: &SimulationConfig) -> LedgerRow {
    LedgerTracker::new().observe(state, cfg)
}
