//! Command-line front end for the cell simulator.
//!
//! Three subcommands, `steady`, `evolve` and `sweep`, read an optional JSON
//! config, apply flag overrides (flags win), and write plot-ready CSV.
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error,
//! 3 solver or sweep error, 4 integrator error.

pub mod commands;
pub mod config;
pub mod csv;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::config::{ConfigFile, LeadsFile, RunConfig, Units};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Solver(String),
    #[error("{0}")]
    Integrator(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Integrator(_) => 4,
        }
    }
}

impl From<atomvolt::Error> for CliError {
    fn from(e: atomvolt::Error) -> Self {
        use atomvolt::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidParameter { .. }
            | E::DimensionMismatch { .. }
            | E::InvalidState(_)
            | E::UnknownPreset { .. }
            | E::MissingPresetInput { .. } => CliError::Config(msg),
            E::NonUniqueSteadyState { .. }
            | E::SolverFailed { .. }
            | E::NotPositive { .. }
            | E::AllPointsFailed { .. }
            | E::EmptyRows => CliError::Solver(msg),
            E::StepTooLarge { .. } => CliError::Integrator(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "atomvolt", version, about = "Driven double-trap atomic photovoltaic cell simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Stationary probabilities and currents for one parameter set.
    Steady(SteadyArgs),
    /// Time series of occupation and lead currents from an initial state.
    Evolve(EvolveArgs),
    /// One-dimensional parameter scan, custom or from a figure preset.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Units of rates and energies in the config file and flags.
    #[arg(long, value_enum)]
    pub units: Option<Units>,
    /// Print the resolved config as JSON and exit.
    #[arg(long)]
    pub dump_config: bool,
    /// Trap-reservoir exchange rate.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Inter-trap tunnelling rate.
    #[arg(long = "lambda", allow_hyphen_values = true)]
    pub lambda_coupling: Option<f64>,
    /// Rabi frequency on trap 1; `--rabi2`, `--detuning1`, .. follow the same pattern.
    #[arg(long, allow_hyphen_values = true)]
    pub rabi1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub rabi2: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub detuning1: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub detuning2: Option<f64>,
    /// Radians.
    #[arg(long, allow_hyphen_values = true)]
    pub phase1: Option<f64>,
    /// Radians.
    #[arg(long, allow_hyphen_values = true)]
    pub phase2: Option<f64>,
    /// Reservoir temperature; without a thermal config the levels sit at
    /// -20 kT and +20 kT around mu = 0.
    #[arg(long, allow_hyphen_values = true)]
    pub kt: Option<f64>,
}

impl CommonArgs {
    fn physics_flags(&self) -> Vec<&'static str> {
        [
            ("--gamma", self.gamma),
            ("--lambda", self.lambda_coupling),
            ("--detuning1", self.detuning1),
            ("--detuning2", self.detuning2),
            ("--phase1", self.phase1),
            ("--phase2", self.phase2),
            ("--kt", self.kt),
        ]
        .into_iter()
        .filter_map(|(name, v)| v.map(|_| name))
        .collect()
    }
}

#[derive(Debug, Clone, Args)]
pub struct SteadyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// End time, seconds.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Step, seconds.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Basis label (00, 0g, 0e, g0, .., ee) or `mixed`.
    #[arg(long)]
    pub initial: Option<String>,
    /// Record every n-th step.
    #[arg(long)]
    pub stride: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Figure preset (fig2a .. fig4bcd).
    #[arg(long)]
    pub preset: Option<String>,
    /// rabi_diff, detuning_diff, phase_diff, rabi2, detuning2 or phase2.
    #[arg(long)]
    pub axis: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub start: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub stop: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Split difference axes as -x/2, +x/2 around the mean.
    #[arg(long)]
    pub symmetric: bool,
    /// Common detuning of both traps, always in Hz.
    #[arg(long, allow_hyphen_values = true)]
    pub detuning_hz: Option<f64>,
}

fn load_file(common: &CommonArgs) -> Result<ConfigFile, CliError> {
    let mut file = match &common.config {
        Some(path) => ConfigFile::read(path)?,
        None => ConfigFile::default(),
    };
    let units = common.units.or(file.units).unwrap_or_default();
    let p = &mut file.params;
    p.gamma = common.gamma.or(p.gamma);
    p.lambda_coupling = common.lambda_coupling.or(p.lambda_coupling);

    // A flag may set one half of a pair the file leaves unset; the other half
    // then keeps its baseline value, expressed in the effective units.
    let base = atomvolt::CellParams::baseline();
    let to_units = |v: f64| match units {
        Units::Hz => v / (2.0 * std::f64::consts::PI),
        Units::RadS => v,
    };
    let merge = |slot: &mut Option<[f64; 2]>, default: [f64; 2], a: Option<f64>, b: Option<f64>| {
        if a.is_some() || b.is_some() {
            let mut pair = slot.unwrap_or(default);
            pair[0] = a.unwrap_or(pair[0]);
            pair[1] = b.unwrap_or(pair[1]);
            *slot = Some(pair);
        }
    };
    merge(&mut p.rabi, base.rabi.map(to_units), common.rabi1, common.rabi2);
    merge(&mut p.detuning, base.detuning.map(to_units), common.detuning1, common.detuning2);
    merge(&mut p.phase, base.phase, common.phase1, common.phase2);

    if let Some(kt) = common.kt {
        p.leads = Some(match p.leads {
            Some(LeadsFile::Thermal { u_g, u_e, mu, .. }) => LeadsFile::Thermal { u_g, u_e, mu, kt },
            _ => LeadsFile::Thermal {
                u_g: -20.0 * kt,
                u_e: 20.0 * kt,
                mu: 0.0,
                kt,
            },
        });
    }
    if common.out.is_some() {
        file.output_path = common.out.clone();
    }
    Ok(file)
}

fn resolve(file: &ConfigFile, common: &CommonArgs) -> Result<RunConfig, CliError> {
    RunConfig::from_file(file, common.units)
}

/// Parses `args` and runs the selected command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Steady(args) => {
            let file = load_file(&args.common)?;
            let cfg = resolve(&file, &args.common)?;
            if args.common.dump_config {
                print!("{}", cfg.to_json());
                return Ok(());
            }
            commands::cmd_steady(&cfg)
        }
        Command::Evolve(args) => {
            let mut file = load_file(&args.common)?;
            let e = &mut file.evolve;
            e.t_end = args.t_end.or(e.t_end);
            e.dt = args.dt.or(e.dt);
            e.initial = args.initial.clone().or(e.initial.take());
            e.stride = args.stride.or(e.stride);
            let cfg = resolve(&file, &args.common)?;
            if args.common.dump_config {
                print!("{}", cfg.to_json());
                return Ok(());
            }
            commands::cmd_evolve(&cfg)
        }
        Command::Sweep(args) => {
            let mut file = load_file(&args.common)?;
            let units = args.common.units.or(file.units).unwrap_or_default();
            let s = &mut file.sweep;
            if let Some(p) = &args.preset {
                s.preset = Some(p.clone());
            }
            if let Some(a) = &args.axis {
                let axis: atomvolt::SweepAxis = a.parse().map_err(|e: atomvolt::Error| CliError::Config(e.to_string()))?;
                s.axis = Some(axis);
            }
            s.start = args.start.or(s.start);
            s.stop = args.stop.or(s.stop);
            s.points = args.points.or(s.points);
            if args.symmetric {
                s.symmetric_mode = Some(true);
            }
            if let Some(d) = args.detuning_hz {
                // Stored in file units so the single conversion at load applies.
                s.detuning = Some(match units {
                    Units::Hz => d,
                    Units::RadS => atomvolt::hz(d),
                });
            }
            if s.preset.is_some() {
                let flags = args.common.physics_flags();
                if !flags.is_empty() {
                    return Err(CliError::Config(format!(
                        "{} cannot be combined with a preset; presets fix the base parameters",
                        flags.join(", ")
                    )));
                }
            }
            if s.preset.is_some() && (args.common.rabi1.is_some() || args.common.rabi2.is_some()) {
                match (args.common.rabi1, args.common.rabi2) {
                    (Some(a), Some(b)) => s.rabi = Some([a, b]),
                    _ => {
                        return Err(CliError::Config(
                            "presets take a Rabi override only as the pair --rabi1 and --rabi2".into(),
                        ))
                    }
                }
            }
            let cfg = resolve(&file, &args.common)?;
            if args.common.dump_config {
                print!("{}", cfg.to_json());
                return Ok(());
            }
            commands::cmd_sweep(&cfg)
        }
    }
}
