//! `nscr`: runs the named experiments and writes CSV files.
//!
//! Exit codes: 0 success, 2 usage error, 3 numerical failure, 1 I/O error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nscr_core::experiments::{run_experiment, ExperimentName, ExperimentSpec};
use nscr_core::Error;

#[derive(Parser, Debug)]
#[command(name = "nscr", version, about = "Rotating Couette stability experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Random-sample bounds of the multipliers m and M and their rates.
    MultiplierCheck(Params),
    /// One x-dependent mode against the enhanced-dissipation envelope.
    LinearModes(Params),
    /// Power-law decay of the wall-normal velocity of x-dependent modes.
    InviscidDamping(Params),
    /// Rotating zero-frequency evolution against the non-rotating lift-up.
    ZeroFreq(Params),
    /// L-infinity decay of the dispersive zero-frequency semigroup.
    Dispersion(Params),
    /// Full nonlinear run with an energy ledger.
    Simulate(Params),
    /// Critical amplitude per viscosity and the fitted exponent.
    ThresholdScan(Params),
}

#[derive(Args, Debug, Default)]
struct Params {
    /// Viscosity (comma-separated list for zero-freq and threshold-scan).
    #[arg(long)]
    nu: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    /// Grid size as NX,NY,NZ.
    #[arg(long)]
    grid: Option<String>,
    /// Wall-normal box parameter; wall-normal frequencies are j/Ly.
    #[arg(long = "Ly")]
    ly: Option<String>,
    /// Initial H^sigma amplitude.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    /// Final time.
    #[arg(long = "T")]
    t_end: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Relative bisection tolerance.
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    l: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    /// Any other experiment parameter, as KEY=VALUE.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    extra: Vec<String>,
    /// TOML file with one table per subcommand; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Command {
    fn split(self) -> (ExperimentName, Params) {
        match self {
            Command::MultiplierCheck(p) => (ExperimentName::MultiplierCheck, p),
            Command::LinearModes(p) => (ExperimentName::LinearModes, p),
            Command::InviscidDamping(p) => (ExperimentName::InviscidDamping, p),
            Command::ZeroFreq(p) => (ExperimentName::ZeroFreq, p),
            Command::Dispersion(p) => (ExperimentName::Dispersion, p),
            Command::Simulate(p) => (ExperimentName::Simulate, p),
            Command::ThresholdScan(p) => (ExperimentName::ThresholdScan, p),
        }
    }
}

fn toml_value_string(key: &str, v: &toml::Value) -> Result<String, Error> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        toml::Value::Array(items) => items
            .iter()
            .map(|x| toml_value_string(key, x))
            .collect::<Result<Vec<_>, _>>()?
            .join(","),
        _ => return Err(Error::Usage(format!("unsupported value for '{key}' in config file"))),
    })
}

/// Reads the table named after the experiment, if present.
fn config_params(path: &Path, name: ExperimentName) -> Result<BTreeMap<String, String>, Error> {
    let text = std::fs::read_to_string(path)?;
    let doc: toml::Table = text
        .parse()
        .map_err(|e| Error::Usage(format!("cannot parse {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    if let Some(section) = doc.get(name.as_str()) {
        let table = section
            .as_table()
            .ok_or_else(|| Error::Usage(format!("[{name}] in {} is not a table", path.display())))?;
        for (k, v) in table {
            out.insert(k.clone(), toml_value_string(k, v)?);
        }
    }
    Ok(out)
}

fn build_spec(name: ExperimentName, p: Params) -> Result<ExperimentSpec, Error> {
    let mut params = match &p.config {
        Some(path) => config_params(path, name)?,
        None => BTreeMap::new(),
    };
    let flags = [
        ("nu", p.nu),
        ("beta", p.beta),
        ("grid", p.grid),
        ("Ly", p.ly),
        ("eps", p.eps),
        ("sigma", p.sigma),
        ("T", p.t_end),
        ("seed", p.seed),
        ("tol", p.tol),
        ("k", p.k),
        ("l", p.l),
        ("eta", p.eta),
    ];
    for (k, v) in flags {
        if let Some(v) = v {
            params.insert(k.to_string(), v);
        }
    }
    for kv in p.extra {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("--param expects KEY=VALUE, got '{kv}'")))?;
        params.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(ExperimentSpec {
        name,
        params,
        out_dir: p.out,
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) | Error::InvalidParams(_) | Error::InvalidGrid(_) => 2,
        Error::Io(_) | Error::Csv(_) | Error::Checkpoint(_) => 1,
        _ => 3,
    }
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("NSCR_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::Usage(format!("NSCR_THREADS = '{v}' must be a positive integer")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Usage(format!("cannot size the worker pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool, Error> {
    configure_threads()?;
    let (name, params) = cli.command.split();
    let spec = build_spec(name, params)?;
    let report = run_experiment(&spec)?;
    for (k, v) in &report.summary {
        println!("{k} = {v}");
    }
    for f in &report.files {
        println!("wrote {}", f.display());
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: a numerical check failed");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
