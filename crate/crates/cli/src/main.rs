//! `sfctl`: run, compare and sweep closed-loop experiments.
//!
//! Exit codes: 0 success, 1 I/O or other failure, 2 invalid config or
//! arguments, 3 a run diverged (artifacts are still written).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use sfctl_core::config::ExperimentConfig;
use sfctl_core::sim::{compare_runs, run_experiment, sweep, RunOutcome};

#[derive(Parser, Debug)]
#[command(name = "sfctl", version, about = "Adaptive finite-/fixed-time backstepping experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Integration step, overriding `sim.dt`.
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Horizon in seconds, overriding `sim.horizon`.
    #[arg(long, global = true)]
    horizon: Option<f64>,
    /// Accepted for scripting compatibility; runs are deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Extra `section.key=value` overrides, applied in order.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one experiment.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run several configs sharing plant and reference, and rank them.
    Compare {
        #[arg(required = true, num_args = 2..)]
        configs: Vec<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run one config for each value of a parameter.
    Sweep {
        config: PathBuf,
        /// Key to vary, e.g. `controller.k1`.
        #[arg(long)]
        param: String,
        /// Comma-separated values; use `;` to separate list-valued entries.
        #[arg(long)]
        values: String,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

enum Failure {
    Config(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Io(_) => 1,
        }
    }
}

impl From<sfctl_core::Error> for Failure {
    fn from(e: sfctl_core::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn load(path: &Path, g: &Global) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::load(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    if let Some(dt) = g.dt {
        cfg = cfg.with_override("sim.dt", &dt.to_string())?;
    }
    if let Some(h) = g.horizon {
        cfg = cfg.with_override("sim.horizon", &h.to_string())?;
    }
    for kv in &g.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        cfg = cfg.with_override(k.trim(), v.trim())?;
    }
    Ok(cfg)
}

/// Writes `<name>.csv` and `<name>.metrics`, or `<name>.partial.csv` for a
/// diverged run. Returns whether the run diverged.
fn write_outcome(dir: &Path, name: &str, outcome: &RunOutcome) -> Result<bool, Failure> {
    match outcome {
        Ok(r) => {
            let csv = dir.join(format!("{name}.csv"));
            fs::write(&csv, r.log.to_csv_string()).map_err(io(&csv))?;
            let met = dir.join(format!("{name}.metrics"));
            fs::write(&met, r.metrics.to_kv()).map_err(io(&met))?;
            info!("{name}: {}", r.metrics.to_kv().replace('\n', " "));
            Ok(false)
        }
        Err(f) => {
            let csv = dir.join(format!("{name}.partial.csv"));
            fs::write(&csv, f.partial.to_csv_string()).map_err(io(&csv))?;
            warn!("{name}: {}", f.error);
            eprintln!("{name}: run failed: {}", f.error);
            if f.error.is_divergence() {
                Ok(true)
            } else {
                Err(Failure::Config(format!("{name}: {}", f.error)))
            }
        }
    }
}

/// Returns whether any run diverged.
fn execute(cli: &Cli) -> Result<bool, Failure> {
    if let Some(seed) = cli.global.seed {
        info!("seed {seed} ignored: simulations are deterministic");
    }
    match &cli.command {
        Command::Run { config, out } => {
            let cfg = load(config, &cli.global)?;
            fs::create_dir_all(out).map_err(io(out))?;
            let outcome = run_experiment(&cfg);
            write_outcome(out, &cfg.name, &outcome)
        }
        Command::Compare { configs, out } => {
            let cfgs = configs.iter().map(|p| load(p, &cli.global)).collect::<Result<Vec<_>, _>>()?;
            let cmp = compare_runs(&cfgs)?;
            fs::create_dir_all(out).map_err(io(out))?;
            let mut diverged = false;
            for (name, o) in cmp.names.iter().zip(&cmp.outcomes) {
                diverged |= write_outcome(out, name, o)?;
            }
            let table = cmp.table();
            let path = out.join("comparison.txt");
            fs::write(&path, &table).map_err(io(&path))?;
            print!("{table}");
            Ok(diverged)
        }
        Command::Sweep { config, param, values, out } => {
            let base = load(config, &cli.global)?;
            let sep = if values.contains(';') { ';' } else { ',' };
            let values: Vec<String> =
                values.split(sep).map(str::trim).filter(|v| !v.is_empty()).map(String::from).collect();
            let result = sweep(&base, param, &values)?;
            fs::create_dir_all(out).map_err(io(out))?;
            let mut diverged = false;
            for (v, o) in result.values.iter().zip(&result.outcomes) {
                let name = format!("{}-{}", base.name, v.replace(|c: char| !c.is_ascii_alphanumeric() && c != '.' && c != '-', "_"));
                diverged |= write_outcome(out, &name, o)?;
            }
            let path = out.join("sweep.csv");
            fs::write(&path, result.summary_csv()).map_err(io(&path))?;
            Ok(diverged)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SFCTL_LOG_LEVEL", "warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(3),
        Err(f) => {
            let (Failure::Config(m) | Failure::Io(m)) = &f;
            eprintln!("error: {m}");
            ExitCode::from(f.code())
        }
    }
}
