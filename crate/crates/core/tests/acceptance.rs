//! Acceptance suite. Each criterion prints one PASS/FAIL line with its
//! measured value and wall time; the process fails if any criterion fails.
//!
//! Pass a substring as a free argument to run only matching criteria.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nscr_core::dispersion::{dispersion_box, dispersion_experiment, evolve_simple_zero_field, gaussian_profile, ZeroFreqField};
use nscr_core::experiments::{inviscid_damping, liftup_comparison, liftup_data, multiplier_check, DampingParams};
use nscr_core::fit::{lin_space, log_space};
use nscr_core::frequency::{leray_mode, Grid, SpectralField, Wavevector};
use nscr_core::linear::{
    decay_envelope_check, evolve_qk_mode, reconstruct_velocity, zero_mode_simple, NonzeroModeState,
    PhysicsParams, Tolerance, ZeroModeState,
};
use nscr_core::nonlinear::{nonlinear_rhs, run, step_with, RhsEngine, RhsTerms, SimulationConfig};
use nscr_core::scan::{threshold_scan, ScanSettings};

struct Criterion {
    name: &'static str,
    /// Wall-time budget in seconds.
    budget: f64,
    check: fn() -> (bool, String),
}

const CRITERIA: &[Criterion] = &[
    Criterion { name: "multiplier bounds", budget: 5.0, check: multiplier_bounds },
    Criterion { name: "rate vs closed form", budget: 60.0, check: rate_vs_closed_form },
    Criterion { name: "enhanced dissipation envelope", budget: 120.0, check: envelope },
    Criterion { name: "inviscid damping", budget: 60.0, check: damping },
    Criterion { name: "lift-up cancellation", budget: 60.0, check: liftup },
    Criterion { name: "dispersion", budget: 120.0, check: dispersion },
    Criterion { name: "cross-oracle", budget: 300.0, check: cross_oracle },
    Criterion { name: "brute-force convolution oracle", budget: 60.0, check: convolution_oracle },
    Criterion { name: "nonlinear stability run", budget: 1800.0, check: stability_run },
    Criterion { name: "threshold scaling", budget: 4.0 * 3600.0, check: threshold_scaling },
];

fn main() {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for c in CRITERIA {
        if !filters.is_empty() && !filters.iter().any(|f| c.name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let (ok, detail) = (c.check)();
        let secs = start.elapsed().as_secs_f64();
        let within = secs <= c.budget;
        let pass = ok && within;
        if !pass {
            failed += 1;
        }
        println!(
            "{} {}: {} [{:.1} s of {:.0} s budget{}]",
            if pass { "PASS" } else { "FAIL" },
            c.name,
            detail,
            secs,
            c.budget,
            if within { "" } else { ", over budget" }
        );
    }
    println!("acceptance: {} of {} criteria passed", ran - failed, ran);
    if failed > 0 {
        std::process::exit(1);
    }
}

fn multiplier_bounds() -> (bool, String) {
    let r = multiplier_check(10_000, 0, 2024).unwrap();
    (r.violations == 0, format!("{} violations in {} samples", r.violations, r.samples.len()))
}

fn rate_vs_closed_form() -> (bool, String) {
    let r = multiplier_check(100, 100, 7).unwrap();
    let ok = r.big_m_rate_error <= 1e-8 && r.m_rate_error <= 1e-8;
    (
        ok,
        format!(
            "max |int M rate - log M| = {:.2e}, max |int m rate - log m| = {:.2e} on {} samples (tol 1e-8)",
            r.big_m_rate_error, r.m_rate_error, r.rate_samples
        ),
    )
}

fn envelope() -> (bool, String) {
    use rayon::prelude::*;
    let ks: Vec<i64> = vec![-5, -4, -3, -2, -1, 1, 2, 3, 4, 5];
    let etas = lin_space(-20.0, 20.0, 10);
    let ls: Vec<i64> = (-4..=5).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut modes = Vec::new();
    for &k in &ks {
        for &eta in &etas {
            for &l in &ls {
                let s0 = NonzeroModeState::new(
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                );
                modes.push((Wavevector::new(k, eta, l), s0));
            }
        }
    }
    let mut checks = 0usize;
    let mut violations = 0usize;
    for beta in [2.0, -2.0, 5.0] {
        for nu in [1e-1, 1e-2, 1e-3] {
            let prm = PhysicsParams::new(nu, beta).unwrap();
            for t in [1.0, 5.0, 20.0] {
                let bad: usize = modes
                    .par_iter()
                    .map(|&(w, s0)| !decay_envelope_check(w, s0, &prm, t).unwrap() as usize)
                    .sum();
                violations += bad;
                checks += modes.len();
            }
        }
    }
    (violations == 0, format!("{violations} violations in {checks} mode checks"))
}

fn damping() -> (bool, String) {
    let r = inviscid_damping(&DampingParams::default()).unwrap();
    (
        r.fit.exponent <= -0.9,
        format!(
            "fitted exponent {:.3} over [10, 100] (need <= -0.9); inviscid part alone {:.3}",
            r.fit.exponent, r.inviscid_fit.exponent
        ),
    )
}

fn liftup() -> (bool, String) {
    let nus = [1e-2, 1e-3, 1e-4];
    let r = liftup_comparison(2.0, &nus, &liftup_data(0.0, 1).unwrap(), 4001).unwrap();
    let worst_rot = r.summary.iter().fold(0.0f64, |a, s| a.max(s.1));
    let weakest_ref = r.summary.iter().fold(f64::INFINITY, |a, s| a.min(s.2));
    (
        worst_rot <= 2.0 && weakest_ref >= 0.3,
        format!(
            "max sup|u0|/|u0(0)| = {worst_rot:.3} (need <= 2), min nu*sup|ref|/|u0(0)| = {weakest_ref:.3} (need >= 0.3)"
        ),
    )
}

fn dispersion() -> (bool, String) {
    let prm = PhysicsParams::new(1e-6, 2.0).unwrap();
    let (ny, ly) = dispersion_box(&prm, 1e4, 1.0);
    let profile = gaussian_profile(ny, 4, ly, 1, 1.0).unwrap();
    let r = dispersion_experiment(&profile, &prm, &log_space(1e2, 1e4, 16)).unwrap();
    let e = r.fit.exponent;
    ((-0.43..=-0.23).contains(&e), format!("fitted exponent {e:.3} (need within [-0.43, -0.23])"))
}

fn cross_oracle() -> (bool, String) {
    // closed-form slab propagator against the per-mode formula
    let prm = PhysicsParams::new(1e-3, 3.0).unwrap();
    let (ny, nz, ly) = (50, 4, 2.5);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut u1 = ZeroFreqField::zeros(ny, nz, ly).unwrap();
    let mut u2 = u1.clone();
    let mut count = 0;
    for j in -(ny as i64 / 2)..(ny as i64 / 2) {
        for l in [-1i64, 1] {
            u1.set(j, l, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
            u2.set(j, l, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).unwrap();
            count += 1;
        }
    }
    let t = 7.5;
    let (o1, o2, o3) = evolve_simple_zero_field((&u1, &u2), t, &prm).unwrap();
    let mut slab_err = 0.0f64;
    for (eta, l, idx) in u1.modes() {
        if l == 0 {
            continue;
        }
        let s0 = ZeroModeState::divergence_free(eta, l, u1.coeffs[idx], u2.coeffs[idx]);
        let s = zero_mode_simple(eta, l, &prm, t, s0).unwrap();
        slab_err = slab_err
            .max((s.u1_hat - o1.coeffs[idx]).norm())
            .max((s.u2_hat - o2.coeffs[idx]).norm())
            .max((s.u3_hat - o3.coeffs[idx]).norm());
    }

    // linear-only pseudo-spectral solver against the per-mode engine
    let grid = Grid::new(8, 16, 8, 2.0).unwrap();
    let prm = PhysicsParams::new(1e-2, 2.0).unwrap();
    let (k, j, l) = (1i64, 1i64, 1i64);
    let w = grid.wavevector(1, 1, 1);
    let u0 = leray_mode(
        0.0,
        w,
        [Complex64::new(0.3, -0.2), Complex64::new(0.5, 0.1), Complex64::new(-0.4, 0.25)],
    )
    .unwrap();
    let mut state = SpectralField::zeros(grid, 0.0);
    state.set_mode(k, j, l, u0).unwrap();
    let s0 = NonzeroModeState::from_velocity(0.0, w, &prm, u0);
    let engine = RhsEngine::new(grid, prm.beta, RhsTerms::LINEAR_ONLY);
    let dt = 2.5e-3;
    let mut solver_err = 0.0f64;
    for step in 1..=2000 {
        state = step_with(&engine, prm.nu, &state, dt).unwrap().state;
        if step % 200 == 0 {
            let t = step as f64 * dt;
            let s = evolve_qk_mode(w, s0, &prm, t, Tolerance::new(1e-12)).unwrap();
            let v = reconstruct_velocity(w, t, s.q_hat, s.w_hat(t, w, &prm)).unwrap();
            let got = state.mode(k, j, l).unwrap();
            for c in 0..3 {
                solver_err = solver_err.max((got[c] - v[c]).norm());
            }
        }
    }
    (
        slab_err <= 1e-10 && solver_err <= 1e-6,
        format!(
            "slab vs per-mode {slab_err:.2e} on {count} modes (tol 1e-10); linear-only solver vs engine {solver_err:.2e} over [0, 5] (tol 1e-6)"
        ),
    )
}

/// `−P[i κ̂_j Σ_{p+q=κ} U_i(p) U_j(q)]` by direct summation over index pairs.
fn direct_nonlinear(u: &SpectralField, t: f64) -> SpectralField {
    let g = u.grid;
    let mask = g.band_mask();
    let mut out = SpectralField::zeros(g, t);
    let band: Vec<usize> = (0..g.len()).filter(|i| mask[*i]).collect();
    let idx3 = |i: usize| {
        let (ix, iy, iz) = g.split(i);
        (g.k_of(ix), g.j_of(iy), g.l_of(iz))
    };
    for &a in &band {
        let (k, j, l) = idx3(a);
        let mut prod = [[Complex64::new(0.0, 0.0); 3]; 3];
        for &b in &band {
            let (k1, j1, l1) = idx3(b);
            let Some(c) = g.index_of(k - k1, j - j1, l - l1) else { continue };
            if !mask[c] {
                continue;
            }
            for i in 0..3 {
                for m in 0..3 {
                    prod[i][m] += u.comps[i][b] * u.comps[m][c];
                }
            }
        }
        let w = g.wavevector_at(a);
        let kv = [w.k as f64, w.sheared_eta(t), w.l as f64];
        let p: f64 = kv.iter().map(|x| x * x).sum();
        if p == 0.0 {
            continue;
        }
        let mut n = [Complex64::new(0.0, 0.0); 3];
        for i in 0..3 {
            for m in 0..3 {
                n[i] -= Complex64::new(0.0, kv[m]) * prod[i][m];
            }
        }
        let dot = (0..3).map(|i| kv[i] * n[i]).sum::<Complex64>() / p;
        for i in 0..3 {
            out.comps[i][a] = n[i] - kv[i] * dot;
        }
    }
    out
}

fn random_band_field(grid: Grid, t: f64, seed: u64) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid, t);
    let mask = grid.band_mask();
    for c in f.comps.iter_mut() {
        for (i, z) in c.iter_mut().enumerate() {
            if mask[i] {
                *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
    }
    f.enforce_hermitian();
    nscr_core::frequency::leray_project_moving(t, &f).unwrap()
}

fn convolution_oracle() -> (bool, String) {
    let grid = Grid::new(8, 8, 8, 1.5).unwrap();
    let t = 0.7;
    let mut worst = 0.0f64;
    // a single mode with its conjugate, then a full random band
    let mut single = SpectralField::zeros(grid, t);
    let w = grid.wavevector_at(grid.index_of(1, 2, -1).unwrap());
    let v = leray_mode(t, w, [Complex64::new(0.2, 0.7), Complex64::new(-0.4, 0.1), Complex64::new(0.3, -0.5)]).unwrap();
    single.set_mode(1, 2, -1, v).unwrap();
    for u in [single, random_band_field(grid, t, 3)] {
        let fast = nonlinear_rhs(t, &u, 2.0, RhsTerms { linear: false, nonlinear: true }).unwrap();
        let slow = direct_nonlinear(&u, t);
        for c in 0..3 {
            for (a, b) in fast.comps[c].iter().zip(&slow.comps[c]) {
                worst = worst.max((a - b).norm());
            }
        }
    }
    (worst <= 1e-10, format!("max |pseudo-spectral - direct sum| = {worst:.2e} (tol 1e-10)"))
}

fn stability_run() -> (bool, String) {
    let nu = 1e-2;
    let mut cfg = SimulationConfig::new(
        Grid::new(32, 64, 32, 1.0).unwrap(),
        PhysicsParams::new(nu, 2.0).unwrap(),
        0.1 * nu,
        5.0,
        100.0,
    )
    .unwrap();
    cfg.seed = 1;
    let out = run(&cfg).unwrap();
    let bound = cfg.bootstrap_factor * cfg.epsilon;
    let all_within = out
        .ledger
        .iter()
        .all(|r| r.bounded_quantities().iter().all(|(_, v)| *v <= bound));
    (
        out.verdict.is_stable() && all_within,
        format!(
            "verdict {}, worst ledger norm {:.3} eps (bound 10 eps), {} steps",
            out.verdict, out.worst_ratio, out.steps
        ),
    )
}

/// Final time of each scan run.
const SCAN_T: f64 = 100.0;

fn threshold_scaling() -> (bool, String) {
    let mut base = SimulationConfig::new(
        Grid::new(32, 64, 32, 1.0).unwrap(),
        PhysicsParams::new(1e-2, 2.0).unwrap(),
        1e-3,
        5.0,
        SCAN_T,
    )
    .unwrap();
    base.seed = 1;
    let s = ScanSettings {
        tol: 0.25,
        ..ScanSettings::default()
    };
    let r = threshold_scan(&base, &[1e-2, 5e-3, 2.5e-3], &s).unwrap();
    let rows: Vec<String> = r
        .rows
        .iter()
        .map(|x| {
            format!(
                "nu={:.1e}: eps_c={:.3e} ({}, {})",
                x.nu,
                x.eps_critical,
                x.bracket.label(),
                x.verdict
            )
        })
        .collect();
    (
        (0.7..=1.3).contains(&r.fitted_gamma),
        format!(
            "fitted gamma {:.3} (need within [0.7, 1.3]; indicative only); {}",
            r.fitted_gamma,
            rows.join(", ")
        ),
    )
}
