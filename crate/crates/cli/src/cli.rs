//! Argument parsing, unit handling and command dispatch.

use clap::{Parser, Subcommand, ValueEnum};
use kerrsense::model::{Drive, ResonatorParams, UnitSystem};
use std::path::PathBuf;

use crate::commands;
use crate::config::{self, RunConfig};

/// Steady states, bifurcations, noise spectra and mass-sensitivity bounds
/// for a driven Kerr resonator with nonlinear damping.
#[derive(Debug, Parser)]
#[command(name = "kerrsense", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandName,

    /// Path to the TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory (created if missing).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Master seed; required by every randomized command.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for grids and ensembles (default: logical cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Interpretation of the configured parameter values.
    #[arg(long, global = true, value_enum, default_value_t = UnitsArg::Dimensionless)]
    pub units: UnitsArg,

    /// Override a config value, e.g. --set drive.p=0.02 (repeatable).
    #[arg(long = "set", global = true, value_name = "SECTION.KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum CommandName {
    /// Branch energies and phases over a pump-frequency sweep.
    Steady,
    /// Bistability cusp and fold boundary.
    Bifurcation,
    /// Basin-of-attraction grid and separatrix.
    Basins,
    /// Homodyne output spectrum, optionally with a Monte Carlo estimate.
    Spectrum,
    /// Mass-resolution sweep.
    Sensitivity,
    /// Langevin trajectories and quadrature statistics.
    Simulate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitsArg {
    /// SI: rad/s, kg, kelvin, seconds.
    Si,
    /// Internal units: omega0 = hbar = kB = 1.
    Dimensionless,
}

/// Anything a command can fail with, mapped onto the documented exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or arguments (exit 2).
    Config(String),
    /// Library failure (exit 3, 4 or 5 by kind).
    Lib(kerrsense::Error),
    /// Filesystem failure (exit 3).
    Io(std::io::Error),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Lib(e) => match e {
                kerrsense::Error::NotBistable(_) => 4,
                kerrsense::Error::UnstableBranch(_)
                | kerrsense::Error::SlowingDownDivergence(_) => 5,
                kerrsense::Error::InvalidParameter(_) | kerrsense::Error::InvalidInput(_) => 2,
                _ => 3,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<kerrsense::Error> for CliError {
    fn from(e: kerrsense::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Everything a command needs: the validated dimensionless model, the scale
/// back to input units and the output location.
pub struct RunEnv {
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub si: bool,
    /// Input frequency per internal frequency unit (1 in dimensionless mode).
    pub w: f64,
    /// Dimensionless parameters used for all computation.
    pub params: ResonatorParams<f64>,
    /// Dimensionless drive, when the config has one.
    pub drive: Option<Drive<f64>>,
    /// Dimensionless unit system matching `params`.
    pub units: UnitSystem<f64>,
    /// Shared '#' metadata lines (version, units, parameter echo).
    pub meta: Vec<String>,
}

impl RunEnv {
    /// Internal frequency -> input units.
    pub fn freq_out(&self, x: f64) -> f64 {
        x * self.w
    }
    /// Input frequency -> internal units.
    pub fn freq_in(&self, x: f64) -> f64 {
        x / self.w
    }
    /// Internal time -> input units.
    pub fn time_out(&self, t: f64) -> f64 {
        t / self.w
    }
    /// Input time -> internal units.
    pub fn time_in(&self, t: f64) -> f64 {
        t * self.w
    }
    /// Internal drive strength -> input units.
    pub fn p_out(&self, p: f64) -> f64 {
        p * self.w * self.w
    }

    /// The configured drive or a config error naming the missing section.
    pub fn need_drive(&self) -> Result<Drive<f64>, CliError> {
        self.drive.ok_or_else(|| CliError::Config("this command needs a [drive] section".into()))
    }

    /// The master seed or a config error; randomized commands refuse to run
    /// without an explicit seed.
    pub fn need_seed(&self) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| {
            CliError::Config("this command draws random numbers; pass an explicit --seed".into())
        })
    }
}

fn build_env(cli: &Cli, cfg: &RunConfig) -> Result<RunEnv, CliError> {
    let r = &cfg.resonator;
    let in_params =
        ResonatorParams::new(r.omega0, r.gamma, r.gamma3, r.kerr, r.mass, r.temperature)
            .map_err(|e| CliError::Config(e.to_string()))?;
    let in_drive = match &cfg.drive {
        Some(d) => Some(
            Drive::new(d.omega_p, d.p, d.phi_p).map_err(|e| CliError::Config(e.to_string()))?,
        ),
        None => None,
    };

    let si = cli.units == UnitsArg::Si;
    let (params, drive, w) = if si {
        let probe = in_drive.unwrap_or(Drive { omega_p: in_params.omega0, p: 0.0, phi_p: 0.0 });
        let (nd_params, nd_drive, scales) = UnitSystem::si().to_dimensionless(&in_params, &probe);
        (nd_params, in_drive.map(|_| nd_drive), scales.omega0)
    } else {
        (in_params, in_drive, 1.0)
    };

    let mut meta = vec![
        format!("kerrsense {}", env!("CARGO_PKG_VERSION")),
        format!("units: {}", if si { "si" } else { "dimensionless" }),
        format!(
            "resonator: omega0={:e} gamma={:e} gamma3={:e} kerr={:e} mass={:e} temperature={:e}",
            r.omega0, r.gamma, r.gamma3, r.kerr, r.mass, r.temperature
        ),
    ];
    if let Some(d) = &cfg.drive {
        meta.push(format!("drive: omega_p={:e} p={:e} phi_p={:e}", d.omega_p, d.p, d.phi_p));
    }
    if let Some(s) = cli.seed {
        meta.push(format!("seed: {s}"));
    }

    let out = cli
        .out
        .clone()
        .ok_or_else(|| CliError::Config("--out <DIR> is required".into()))?;
    std::fs::create_dir_all(&out)?;

    Ok(RunEnv { out, seed: cli.seed, si, w, params, drive, units: UnitSystem::dimensionless(), meta })
}

/// Parses arguments, runs the selected command and returns the process exit
/// code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };

    if let Some(n) = cli.threads {
        // a second initialization in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("kerrsense: {e}");
            e.code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config <FILE> is required".into()))?;
    let cfg = config::load(path, &cli.set).map_err(CliError::Config)?;
    let mut env = build_env(cli, &cfg)?;
    let name = match cli.command {
        CommandName::Steady => "steady",
        CommandName::Bifurcation => "bifurcation",
        CommandName::Basins => "basins",
        CommandName::Spectrum => "spectrum",
        CommandName::Sensitivity => "sensitivity",
        CommandName::Simulate => "simulate",
    };
    env.meta.insert(1, format!("command: {name}"));
    match cli.command {
        CommandName::Steady => commands::steady::run(&cfg, &env),
        CommandName::Bifurcation => commands::bifurcation::run(&cfg, &env),
        CommandName::Basins => commands::basins::run(&cfg, &env),
        CommandName::Spectrum => commands::spectrum::run(&cfg, &env),
        CommandName::Sensitivity => commands::sensitivity::run(&cfg, &env),
        CommandName::Simulate => commands::simulate::run(&cfg, &env),
    }
}
