use std::io::Write;

use super::config::{SimulationConfig, StepControl};
use super::diagnostics::{LedgerRow, LedgerTracker};
use super::init::make_initial_data;
use super::rhs::RhsEngine;
use super::stepper::{adaptive_dt, step_with};
use crate::error::{Error, Result};
use crate::frequency::SpectralField;

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// Every bounded ledger quantity stayed within the bootstrap bound.
    Stable,
    /// The bootstrap bound was first exceeded at `time` by `quantity`.
    Unstable {
        time: f64,
        quantity: &'static str,
        value: f64,
    },
    /// Non-finite values or growth past the blowup factor.
    Blowup { time: f64, reason: String },
    /// The step budget ran out before `T`.
    MaxTime { time: f64 },
}

impl Verdict {
    pub fn is_stable(&self) -> bool {
        matches!(self, Verdict::Stable)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::Unstable { .. } => "unstable",
            Verdict::Blowup { .. } => "blowup",
            Verdict::MaxTime { .. } => "maxtime",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Stable => write!(f, "stable"),
            Verdict::Unstable {
                time,
                quantity,
                value,
            } => write!(f, "unstable at t={time:.4} ({quantity}={value:.4e})"),
            Verdict::Blowup { time, reason } => write!(f, "blowup at t={time:.4} ({reason})"),
            Verdict::MaxTime { time } => write!(f, "step budget exhausted at t={time:.4}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub ledger: Vec<LedgerRow>,
    pub verdict: Verdict,
    pub final_state: SpectralField,
    pub steps: usize,
    /// Largest value of each bounded quantity over the run, as a multiple of `ε`.
    pub worst_ratio: f64,
    /// The run extended past the time at which the sheared wall-normal
    /// frequency of the fastest mode leaves the resolved range.
    pub past_resolution_horizon: bool,
}

/// Integrates from the configured initial data to `T` or until failure.
pub fn run(cfg: &SimulationConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let state = make_initial_data(cfg)?;
    run_from(cfg, state)
}

/// Integrates from a given initial state.
pub fn run_from(cfg: &SimulationConfig, initial: SpectralField) -> Result<RunOutcome> {
    let eps = cfg.epsilon;
    let horizon = cfg.grid.resolution_horizon();
    let past_resolution_horizon = cfg.t_end > horizon;
    if past_resolution_horizon {
        log::info!("T = {} exceeds the resolution horizon {horizon:.2}", cfg.t_end);
    }
    let engine = RhsEngine::new(cfg.grid, cfg.prm.beta, cfg.terms);
    let mut tracker = LedgerTracker::new();
    let mut state = initial;
    let first = tracker.observe(&state, cfg);
    let mut ledger = vec![first];
    let bound = cfg.bootstrap_factor * eps;
    let mut worst = first.worst().1;
    let mut verdict = Verdict::Stable;
    let mut steps = 0usize;

    if eps == 0.0 && state.max_abs() == 0.0 {
        let mut t = cfg.output_interval;
        while t <= cfg.t_end + 1e-12 {
            ledger.push(LedgerRow { t, ..LedgerRow::default() });
            t += cfg.output_interval;
        }
        state.frame_time = cfg.t_end;
        return Ok(RunOutcome {
            ledger,
            verdict,
            final_state: state,
            steps,
            worst_ratio: 0.0,
            past_resolution_horizon,
        });
    }

    let mut vmax = engine.velocity_maxima(&state);
    let mut next_output = cfg.output_interval;
    let tiny = 1e-12 * cfg.t_end.max(1.0);
    while state.frame_time < cfg.t_end - tiny {
        if steps >= cfg.max_steps {
            verdict = Verdict::MaxTime {
                time: state.frame_time,
            };
            break;
        }
        let t = state.frame_time;
        let mut dt = match cfg.step {
            StepControl::Fixed(dt) => dt,
            StepControl::Adaptive { cfl, dt_max } => {
                adaptive_dt(&cfg.grid, cfg.prm.nu, t, vmax, cfl, dt_max)
            }
        };
        dt = dt.min(cfg.t_end - t).min((next_output - t).max(tiny));
        let out = match step_with(&engine, cfg.prm.nu, &state, dt) {
            Ok(o) => o,
            Err(Error::Blowup { time, reason }) => {
                verdict = Verdict::Blowup { time, reason };
                break;
            }
            Err(e) => return Err(e),
        };
        steps += 1;
        state = out.state;
        vmax = out.max_velocity;
        let row = tracker.observe(&state, cfg);
        let (name, value) = row.worst();
        worst = worst.max(value);
        let at_output = state.frame_time >= next_output - tiny;
        if at_output {
            ledger.push(row);
            next_output += cfg.output_interval;
        }
        if !value.is_finite() || value > cfg.blowup_factor * eps {
            if !at_output {
                ledger.push(row);
            }
            verdict = Verdict::Blowup {
                time: state.frame_time,
                reason: format!("{name} = {value:e}"),
            };
            break;
        }
        if value > bound && verdict == Verdict::Stable {
            verdict = Verdict::Unstable {
                time: state.frame_time,
                quantity: name,
                value,
            };
            if cfg.stop_when_unstable {
                if !at_output {
                    ledger.push(row);
                }
                break;
            }
        }
    }
    Ok(RunOutcome {
        ledger,
        verdict,
        final_state: state,
        steps,
        worst_ratio: if eps > 0.0 { worst / eps } else { 0.0 },
        past_resolution_horizon,
    })
}

/// Writes ledger rows as CSV with the documented header.
pub fn write_ledger_csv<W: Write>(w: W, rows: &[LedgerRow]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(LedgerRow::HEADER)?;
    for r in rows {
        let v = r.values();
        let mut rec: Vec<String> = v[..v.len() - 1].iter().map(|x| format!("{x:.12e}")).collect();
        rec.push(r.pointwise_violations.to_string());
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frequency::Grid;
    use crate::linear::PhysicsParams;

    fn cfg(eps: f64) -> SimulationConfig {
        let mut c = SimulationConfig::new(
            Grid::new(8, 16, 8, 8.0).unwrap(),
            PhysicsParams::new(0.05, 2.0).unwrap(),
            eps,
            5.0,
            2.0,
        )
        .unwrap();
        c.output_interval = 0.5;
        c
    }

    #[test]
    fn zero_amplitude_is_stable_with_zero_ledger() {
        let out = run(&cfg(0.0)).unwrap();
        assert_eq!(out.verdict, Verdict::Stable);
        assert_eq!(out.ledger.len(), 5);
        assert!(out.ledger.iter().all(|r| r.values()[1..].iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn small_run_is_stable_and_rows_at_output_times() {
        let out = run(&cfg(1e-3)).unwrap();
        assert!(out.verdict.is_stable(), "{:?}", out.verdict);
        let ts: Vec<f64> = out.ledger.iter().map(|r| r.t).collect();
        for (i, t) in ts.iter().enumerate() {
            assert!((t - 0.5 * i as f64).abs() < 1e-9);
        }
        assert!(out.ledger.windows(2).all(|w| w[1].diss_q >= w[0].diss_q));
    }

    #[test]
    fn large_amplitude_stops_early() {
        let mut c = cfg(50.0);
        c.stop_when_unstable = true;
        c.bootstrap_factor = 1.5;
        let out = run(&c).unwrap();
        assert!(!out.verdict.is_stable());
    }

    #[test]
    fn ledger_csv_has_header_and_rows() {
        let out = run(&cfg(1e-3)).unwrap();
        let mut buf = Vec::new();
        write_ledger_csv(&mut buf, &out.ledger).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), out.ledger.len() + 1);
        assert!(text.starts_with("t,mMQ_noteq_HN="));
    }
}
