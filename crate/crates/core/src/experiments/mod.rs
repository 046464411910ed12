//! Named experiments: parameter handling, dispatch and CSV output.

pub mod studies;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;

use crate::dispersion::{dispersion_box, dispersion_experiment, gaussian_profile};
use crate::error::{Error, Result};
use crate::fit::{lin_space, log_space};
use crate::frequency::{Grid, Wavevector};
use crate::linear::{NonzeroModeState, PhysicsParams};
use crate::nonlinear::checkpoint::{self, Checkpoint};
use crate::nonlinear::{run, write_ledger_csv, InitProfile, SimulationConfig, StepControl, Verdict};
use crate::scan::{threshold_scan, ScanSettings};

pub use studies::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExperimentName {
    MultiplierCheck,
    LinearModes,
    InviscidDamping,
    ZeroFreq,
    Dispersion,
    Simulate,
    ThresholdScan,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 7] = [
        ExperimentName::MultiplierCheck,
        ExperimentName::LinearModes,
        ExperimentName::InviscidDamping,
        ExperimentName::ZeroFreq,
        ExperimentName::Dispersion,
        ExperimentName::Simulate,
        ExperimentName::ThresholdScan,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentName::MultiplierCheck => "multiplier-check",
            ExperimentName::LinearModes => "linear-modes",
            ExperimentName::InviscidDamping => "inviscid-damping",
            ExperimentName::ZeroFreq => "zero-freq",
            ExperimentName::Dispersion => "dispersion",
            ExperimentName::Simulate => "simulate",
            ExperimentName::ThresholdScan => "threshold-scan",
        }
    }

    /// Recognized parameter keys.
    pub fn keys(&self) -> &'static [&'static str] {
        match self {
            ExperimentName::MultiplierCheck => &["samples", "rate_samples", "seed"],
            ExperimentName::LinearModes => &["nu", "beta", "k", "l", "eta", "T", "samples"],
            ExperimentName::InviscidDamping => &["nu", "beta", "k", "t_min", "T", "samples"],
            ExperimentName::ZeroFreq => &["nu", "beta", "eta", "l", "samples"],
            ExperimentName::Dispersion => &["nu", "beta", "l", "width", "t_min", "T", "samples"],
            ExperimentName::Simulate => &[
                "grid", "Ly", "nu", "beta", "eps", "sigma", "T", "seed", "dt", "cfl", "dt_max",
                "output_interval", "init", "checkpoint",
            ],
            ExperimentName::ThresholdScan => &[
                "grid", "Ly", "nu", "beta", "sigma", "T", "seed", "tol", "lo_ratio", "hi_ratio",
                "cfl", "dt_max",
            ],
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Usage(format!("unknown experiment '{s}'")))
    }
}

/// An experiment name with string-valued parameters and an output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    pub params: BTreeMap<String, String>,
    pub out_dir: PathBuf,
}

impl ExperimentSpec {
    pub fn new(name: ExperimentName, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            name,
            params: BTreeMap::new(),
            out_dir: out_dir.into(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// Rejects keys the experiment does not use.
    pub fn validate(&self) -> Result<()> {
        let keys = self.name.keys();
        for k in self.params.keys() {
            if !keys.contains(&k.as_str()) {
                return Err(Error::Usage(format!(
                    "unknown parameter '{k}' for {}; expected one of {}",
                    self.name,
                    keys.join(", ")
                )));
            }
        }
        Ok(())
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.params.get(key) {
            None => Ok(None),
            Some(v) => v
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| Error::Usage(format!("invalid value '{v}' for parameter '{key}'"))),
        }
    }

    fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    fn list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.params.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::Usage(format!("invalid value '{v}' for parameter '{key}'")))
                })
                .collect(),
        }
    }

    fn grid(&self) -> Result<Grid> {
        let dims = match self.params.get("grid") {
            None => vec![32, 64, 32],
            Some(v) => v
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .ok()
                .filter(|d| d.len() == 3)
                .ok_or_else(|| Error::Usage(format!("invalid value '{v}' for parameter 'grid'; expected NX,NY,NZ")))?,
        };
        Grid::new(dims[0], dims[1], dims[2], self.get("Ly", 1.0)?)
    }

    fn step_control(&self) -> Result<StepControl> {
        Ok(match self.parse::<f64>("dt")? {
            Some(dt) => StepControl::Fixed(dt),
            None => StepControl::Adaptive {
                cfl: self.get("cfl", 0.5)?,
                dt_max: self.get("dt_max", 0.1)?,
            },
        })
    }
}

/// Files written and headline numbers of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub files: Vec<PathBuf>,
    pub summary: Vec<(String, String)>,
    /// False when a built-in check failed or the run blew up.
    pub passed: bool,
}

fn fmt_f(x: f64) -> String {
    format!("{x:.12e}")
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

struct Report {
    dir: PathBuf,
    stem: &'static str,
    files: Vec<PathBuf>,
    summary: Vec<(String, String)>,
}

impl Report {
    fn new(dir: &Path, stem: &'static str) -> Self {
        Self {
            dir: dir.to_path_buf(),
            stem,
            files: Vec::new(),
            summary: Vec::new(),
        }
    }

    fn csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let path = self.dir.join(name);
        write_csv(&path, header, rows)?;
        self.files.push(path);
        Ok(())
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }

    fn finish(mut self, passed: bool) -> Result<ExperimentReport> {
        let rows: Vec<Vec<String>> = self.summary.iter().map(|(k, v)| vec![k.clone(), v.clone()]).collect();
        let name = format!("{}_summary.csv", self.stem);
        self.csv(&name, &["quantity", "value"], rows)?;
        Ok(ExperimentReport {
            files: self.files,
            summary: self.summary,
            passed,
        })
    }
}

/// Runs `spec`, writing CSV files into its output directory.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    fs::create_dir_all(&spec.out_dir)?;
    let dir = spec.out_dir.as_path();
    match spec.name {
        ExperimentName::MultiplierCheck => run_multiplier_check(spec, dir),
        ExperimentName::LinearModes => run_linear_modes(spec, dir),
        ExperimentName::InviscidDamping => run_inviscid_damping(spec, dir),
        ExperimentName::ZeroFreq => run_zero_freq(spec, dir),
        ExperimentName::Dispersion => run_dispersion(spec, dir),
        ExperimentName::Simulate => run_simulate(spec, dir),
        ExperimentName::ThresholdScan => run_threshold_scan(spec, dir),
    }
}

fn run_multiplier_check(spec: &ExperimentSpec, dir: &Path) -> Result<ExperimentReport> {
    let n = spec.get("samples", 10_000usize)?;
    let r = multiplier_check(n, spec.get("rate_samples", 100usize)?, spec.get("seed", 0u64)?)?;
    let mut rep = Report::new(dir, "multiplier_check");
    rep.csv(
        "multiplier_check.csv",
        &[
            "t",
            "k",
            "eta",
            "l",
            "nu",
            "m=stretching compensator m(t,k,eta,l)",
            "M=ghost weight M(t,k,eta,l)",
            "violation=bounds e^-pi<=M<=1 or nu^(1/3)/2000<=m<=1 broken",
        ],
        r.samples.iter().map(|s| {
            vec![
                fmt_f(s.t),
                s.w.k.to_string(),
                fmt_f(s.w.eta),
                s.w.l.to_string(),
                fmt_f(s.nu),
                fmt_f(s.m),
                fmt_f(s.big_m),
                (s.violation as u8).to_string(),
            ]
        }),
    )?;
    rep.note("samples", n);
    rep.note("violations", r.violations);
    rep.note("rate_samples", r.rate_samples);
    rep.note("max_error_int_M_rate_vs_log_M", fmt_f(r.big_m_rate_error));
    rep.note("max_error_int_m_rate_vs_log_m", fmt_f(r.m_rate_error));
    let passed = r.violations == 0 && r.big_m_rate_error <= 1e-8 && r.m_rate_error <= 1e-8;
    rep.finish(passed)
}

fn run_linear_modes(spec: &ExperimentSpec, dir: &Path) -> Result<ExperimentReport> {
    let prm = PhysicsParams::new(spec.get("nu", 1e-2)?, spec.get("beta", 2.0)?)?;
    let w = Wavevector::new(spec.get("k", 1i64)?, spec.get("eta", 0.0)?, spec.get("l", 1i64)?);
    let times = lin_space(0.0, spec.get("T", 50.0)?, spec.get("samples", 101usize)?);
    let s0 = NonzeroModeState::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    let r = linear_modes(w, s0, &prm, &times)?;
    let mut rep = Report::new(dir, "linear_modes");
    rep.csv(
        "linear_modes.csv",
        &[
            "t",
            "mQK_energy=m^2(|Q2|^2+|K2|^2)",
            "envelope=e^(-nu k^2 t^3/12)(|Q2|^2+|K2|^2)(0)",
            "log_mQK_energy",
            "log_envelope",
        ],
        r.rows.iter().map(|x| {
            vec![
                fmt_f(x.t),
                fmt_f(x.energy),
                fmt_f(x.envelope),
                fmt_f(x.log_energy),
                fmt_f(x.log_envelope),
            ]
        }),
    )?;
    rep.note("envelope_violations", r.violations);
    rep.note("fitted_cubic_rate_b", fmt_f(r.cubic_rate));
    rep.note("reference_rate_nu_over_24", fmt_f(prm.nu / 24.0));
    rep.finish(r.violations == 0)
}

fn run_inviscid_damping(spec: &ExperimentSpec, dir: &Path) -> Result<ExperimentReport> {
    let d = DampingParams::default();
    let p = DampingParams {
        nu: spec.get("nu", d.nu)?,
        beta: spec.get("beta", d.beta)?,
        k: spec.get("k", d.k)?,
        window: (spec.get("t_min", d.window.0)?, spec.get("T", d.window.1)?),
        samples: spec.get("samples", d.samples)?,
        ..d
    };
    let r = inviscid_damping(&p)?;
    let mut rep = Report::new(dir, "inviscid_damping");
    rep.csv(
        "inviscid_damping.csv",
        &[
            "t",
            "U2_noteq_L2=||U^2_neq(t)||_{L^2}",
            "U2_noteq_L2_inviscid=||U^2_neq(t)||_{L^2} without viscous factor",
        ],
        r.rows.iter().map(|(t, v, w)| vec![fmt_f(*t), fmt_f(*v), fmt_f(*w)]),
    )?;
    rep.note("fitted_power_law_exponent", fmt_f(r.fit.exponent));
    rep.note("fitted_power_law_exponent_inviscid", fmt_f(r.inviscid_fit.exponent));
    rep.note("fit_residual", fmt_f(r.fit.residual));
    rep.finish(true)
}

fn run_zero_freq(spec: &ExperimentSpec, dir: &Path) -> Result<ExperimentReport> {
    let nus = spec.list("nu", &[1e-2, 1e-3, 1e-4])?;
    let data = liftup_data(spec.get("eta", 0.0)?, spec.get("l", 1i64)?)?;
    let r = liftup_comparison(spec.get("beta", 2.0)?, &nus, &data, spec.get("samples", 2001usize)?)?;
    let mut rep = Report::new(dir, "zero_freq");
    rep.csv(
        "zero_freq.csv",
        &[
            "nu",
            "t",
            "tildeU0_L2=||tilde u0(t)|| (rotating)",
            "liftup_L2=||u0(t)|| (non-rotating reference)",
        ],
        r.rows.iter().map(|x| vec![fmt_f(x.nu), fmt_f(x.t), fmt_f(x.rotating), fmt_f(x.reference)]),
    )?;
    for (nu, rot, reference) in &r.summary {
        rep.note(&format!("sup_ratio_rotating[nu={nu:e}]"), fmt_f(*rot));
        rep.note(&format!("nu_times_sup_ratio_reference[nu={nu:e}]"), fmt_f(*reference));
    }
    rep.finish(true)
}

fn run_dispersion(spec: &ExperimentSpec, dir: &Path) -> Result<ExperimentReport> {
    let prm = PhysicsParams::new(spec.get("nu", 1e-6)?, spec.get("beta", 2.0)?)?;
    let (t_min, t_max) = (spec.get("t_min", 1e2)?, spec.get("T", 1e4)?);
    let width = spec.get("width", 1.0)?;
    let (ny, ly) = dispersion_box(&prm, t_max, width);
    let profile = gaussian_profile(ny, 4, ly, spec.get("l", 1i64)?, width)?;
    let times = log_space(t_min, t_max, spec.get("samples", 16usize)?);
    let r = dispersion_experiment(&profile, &prm, &times)?;
    let mut rep = Report::new(dir, "dispersion");
    rep.csv(
        "dispersion.csv",
        &[
            "t",
            "amplitude=||e^(L+ t) f||_{L^inf}",
            "heat_corrected_amplitude=e^(nu t)||e^(L+ t) f||_{L^inf}",
        ],
        r.samples
            .iter()
            .map(|s| vec![fmt_f(s.t), fmt_f(s.amplitude), fmt_f(s.heat_corrected)]),
    )?;
    rep.note("ny", ny);
    rep.note("Ly", fmt_f(ly));
    rep.note("fitted_power_law_exponent", fmt_f(r.fit.exponent));
    rep.note("fit_residual", fmt_f(r.fit.residual));
    rep.finish(true)
}

fn parse_init(v: &str) -> Result<InitProfile> {
    if v == "random" {
        return Ok(InitProfile::RandomDivFree);
    }
    if let Some(rest) = v.strip_prefix("mode:") {
        let parts: Vec<i64> = rest
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Usage(format!("invalid value '{v}' for parameter 'init'")))?;
        if let [k, j, l] = parts[..] {
            return Ok(InitProfile::SingleMode { k, j, l });
        }
        return Err(Error::Usage(format!("invalid value '{v}' for parameter 'init'")));
    }
    if let Some(path) = v.strip_prefix("file:") {
        return Ok(InitProfile::File(PathBuf::from(path)));
    }
    Err(Error::Usage(format!(
        "invalid value '{v}' for parameter 'init'; expected random, mode:K,J,L or file:PATH"
    )))
}

fn simulation_config(spec: &ExperimentSpec) -> Result<SimulationConfig> {
    let nu = spec.get("nu", 1e-2)?;
    let prm = PhysicsParams::new(nu, spec.get("beta", 2.0)?)?;
    let mut cfg = SimulationConfig::new(
        spec.grid()?,
        prm,
        spec.get("eps", 0.1 * nu)?,
        spec.get("sigma", 5.0)?,
        spec.get("T", 100.0)?,
    )?;
    cfg.seed = spec.get("seed", 0u64)?;
    cfg.step = spec.step_control()?;
    if let Some(v) = spec.params.get("init") {
        cfg.init = parse_init(v)?;
    }
    if let Some(dt) = spec.parse::<f64>("output_interval")? {
        cfg.output_interval = dt;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_simulate(spec: &ExperimentSpec, dir: &Path) -> Result<ExperimentReport> {
    let cfg = simulation_config(spec)?;
    let out = run(&cfg)?;
    let mut rep = Report::new(dir, "simulate");
    let path = dir.join("ledger.csv");
    write_ledger_csv(fs::File::create(&path)?, &out.ledger)?;
    rep.files.push(path);
    if let Some(ck) = spec.params.get("checkpoint") {
        let path = PathBuf::from(ck);
        checkpoint::save(
            &path,
            &Checkpoint {
                state: out.final_state.clone(),
                prm: cfg.prm,
                seed: cfg.seed,
            },
        )?;
        rep.files.push(path);
    }
    rep.note("verdict", out.verdict.label());
    rep.note("verdict_detail", &out.verdict);
    rep.note("steps", out.steps);
    rep.note("worst_ledger_norm_over_eps", fmt_f(out.worst_ratio));
    rep.note("bootstrap_bound_over_eps", fmt_f(cfg.bootstrap_factor));
    rep.note("past_resolution_horizon", out.past_resolution_horizon);
    rep.note(
        "pointwise_violations_max",
        out.ledger.iter().map(|r| r.pointwise_violations).max().unwrap_or(0),
    );
    let passed = !matches!(out.verdict, Verdict::Blowup { .. });
    rep.finish(passed)
}

fn run_threshold_scan(spec: &ExperimentSpec, dir: &Path) -> Result<ExperimentReport> {
    let nus = spec.list("nu", &[1e-2, 5e-3, 2.5e-3])?;
    let mut base_spec = spec.clone();
    base_spec.params.remove("nu");
    base_spec.params.insert("nu".into(), nus[0].to_string());
    let mut base = simulation_config(&ExperimentSpec {
        name: ExperimentName::Simulate,
        params: base_spec
            .params
            .into_iter()
            .filter(|(k, _)| !matches!(k.as_str(), "tol" | "lo_ratio" | "hi_ratio"))
            .collect(),
        out_dir: spec.out_dir.clone(),
    })?;
    base.t_end = spec.get("T", 100.0)?;
    let d = ScanSettings::default();
    let s = ScanSettings {
        tol: spec.get("tol", d.tol)?,
        lo_ratio: spec.get("lo_ratio", d.lo_ratio)?,
        hi_ratio: spec.get("hi_ratio", d.hi_ratio)?,
        ..d
    };
    let r = threshold_scan(&base, &nus, &s)?;
    let mut rep = Report::new(dir, "threshold_scan");
    rep.csv(
        "threshold_scan.csv",
        &[
            "nu",
            "eps_critical=critical H^sigma amplitude",
            "eps_stable=largest stable amplitude",
            "eps_unstable=smallest unstable amplitude",
            "bracket",
            "verdict",
            "runs",
        ],
        r.rows.iter().map(|x| {
            vec![
                fmt_f(x.nu),
                fmt_f(x.eps_critical),
                x.eps_stable.map(fmt_f).unwrap_or_default(),
                x.eps_unstable.map(fmt_f).unwrap_or_default(),
                x.bracket.label().to_string(),
                x.verdict.clone(),
                x.runs.to_string(),
            ]
        }),
    )?;
    rep.note("fitted_gamma", fmt_f(r.fitted_gamma));
    rep.note("fit_residual", fmt_f(r.residual));
    rep.note("eps_critical_monotone_in_nu", r.monotone);
    rep.finish(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for n in ExperimentName::ALL {
            assert_eq!(n.as_str().parse::<ExperimentName>().unwrap(), n);
        }
        assert!(matches!("bogus".parse::<ExperimentName>(), Err(Error::Usage(_))));
    }

    #[test]
    fn bad_keys_and_values_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let s = ExperimentSpec::new(ExperimentName::LinearModes, dir.path()).with("bogus", 1);
        match run_experiment(&s) {
            Err(Error::Usage(m)) => assert!(m.contains("bogus")),
            other => panic!("{other:?}"),
        }
        let s = ExperimentSpec::new(ExperimentName::LinearModes, dir.path()).with("nu", "abc");
        match run_experiment(&s) {
            Err(Error::Usage(m)) => assert!(m.contains("'nu'")),
            other => panic!("{other:?}"),
        }
        let s = ExperimentSpec::new(ExperimentName::Simulate, dir.path()).with("grid", "8,8");
        assert!(matches!(run_experiment(&s), Err(Error::Usage(_))));
    }

    #[test]
    fn init_parsing() {
        assert_eq!(parse_init("random").unwrap(), InitProfile::RandomDivFree);
        assert_eq!(
            parse_init("mode:1,-2,3").unwrap(),
            InitProfile::SingleMode { k: 1, j: -2, l: 3 }
        );
        assert_eq!(parse_init("file:a.bin").unwrap(), InitProfile::File("a.bin".into()));
        assert!(parse_init("mode:1,2").is_err());
    }

    #[test]
    fn small_simulation_writes_ledger_and_checkpoint() {
        let dir = tempfile::tempdir().unwrap();
        let ck = dir.path().join("final.bin");
        let s = ExperimentSpec::new(ExperimentName::Simulate, dir.path())
            .with("grid", "8,16,8")
            .with("T", 1.0)
            .with("nu", 0.05)
            .with("output_interval", 0.5)
            .with("checkpoint", ck.display());
        let r = run_experiment(&s).unwrap();
        assert!(r.passed);
        let ledger = fs::read_to_string(dir.path().join("ledger.csv")).unwrap();
        assert_eq!(ledger.lines().count(), 4);
        let loaded = checkpoint::load(&ck).unwrap();
        assert!((loaded.state.frame_time - 1.0).abs() < 1e-12);
        // restart from the checkpoint
        let s2 = ExperimentSpec::new(ExperimentName::Simulate, dir.path().join("restart"))
            .with("grid", "8,16,8")
            .with("T", 1.0)
            .with("nu", 0.05)
            .with("init", format!("file:{}", ck.display()));
        assert!(run_experiment(&s2).is_ok());
    }
}
