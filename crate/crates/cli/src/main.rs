use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use semitunnel::PotentialKind;
use semitunnel_cli::config::{self, ConfigFile, Grid, OrbitSpec, RunConfig, TGrid, Tolerances};
use semitunnel_cli::{commands, CliError};

#[derive(Parser)]
#[command(name = "semitunnel", version, about = "Tunnelling splittings from spectra, traces and complex orbits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Exact levels and doublet gaps.
    Spectrum,
    /// Δ₀(T) from the trace formula over a complex-time grid.
    TraceGrid,
    /// Splittings by the selected methods over a 1/ħ grid.
    Scan,
    /// A real-q complex orbit and its time staircase.
    Orbit(OrbitArgs),
}

#[derive(Args)]
struct Common {
    /// JSON potential, e.g. {"kind":"quartic_double_well","parameters":{"a":1.0}}.
    #[arg(long, global = true)]
    potential: Option<PathBuf>,
    /// 1/ħ as a value or start:stop:count.
    #[arg(long = "hbar-inverse", global = true, default_value = "12")]
    hbar_inverse: String,
    /// Comma separated scan methods.
    #[arg(long, global = true, default_value = "exact")]
    methods: String,
    /// Doublet indices: n, a-b or a list.
    #[arg(long, global = true, default_value = "0")]
    levels: String,
    /// Complex time as re,im.
    #[arg(long = "T", global = true, allow_hyphen_values = true)]
    t: Option<String>,
    /// re=a:b:n,im=c:d:m
    #[arg(long = "T-grid", global = true, allow_hyphen_values = true)]
    t_grid: Option<String>,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Promote warnings to errors (exit code 4).
    #[arg(long, global = true)]
    strict: bool,
    /// Config file or previous manifest; its fields override the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Highest energy the exact spectrum must resolve.
    #[arg(long = "e-max", global = true, allow_hyphen_values = true)]
    e_max: Option<f64>,
}

#[derive(Args)]
struct OrbitArgs {
    #[arg(long, allow_hyphen_values = true)]
    energy: Option<f64>,
    /// w_r,w_c (w_r,w_m for the triple well).
    #[arg(long)]
    windings: Option<String>,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    eta: i32,
    #[arg(long = "r-before", default_value_t = 0)]
    r_before: u32,
    /// Initial integrator step.
    #[arg(long = "orbit-step")]
    orbit_step: Option<f64>,
}

fn windings(s: &str) -> Result<[u32; 2], CliError> {
    let bad = || CliError::Config(format!("windings '{s}' is not a,b"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok([a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?])
}

fn build(cli: &Cli) -> Result<RunConfig, CliError> {
    let c = &cli.common;
    let potential = match &c.potential {
        Some(p) => config::load_potential(p)?,
        None => PotentialKind::QuarticDoubleWell { a: 1.0 },
    };
    let mut tolerances = Tolerances { e_max: c.e_max, orbit_step: None };
    let orbit = match &cli.command {
        Command::Orbit(o) => {
            tolerances.orbit_step = o.orbit_step;
            match (o.energy, &o.windings) {
                (Some(energy), Some(w)) => {
                    Some(OrbitSpec { energy, windings: windings(w)?, eta: o.eta, r_before: o.r_before })
                }
                _ => None,
            }
        }
        _ => None,
    };
    let run = RunConfig {
        potential,
        hbar_inverse: Grid::parse(&c.hbar_inverse)?,
        methods: c.methods.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        levels: config::parse_levels(&c.levels)?,
        t: c.t.as_deref().map(config::parse_t).transpose()?,
        t_grid: c.t_grid.as_deref().map(TGrid::parse).transpose()?,
        out: c.out.clone(),
        strict: c.strict,
        tolerances,
        orbit,
    };
    Ok(match &c.config {
        Some(path) => ConfigFile::load(path)?.overlay(run),
        None => run,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = build(&cli)?;
    match cli.command {
        Command::Spectrum => commands::spectrum(&cfg),
        Command::TraceGrid => commands::trace_grid(&cfg),
        Command::Scan => commands::scan(&cfg),
        Command::Orbit(_) => commands::orbit(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("semitunnel: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
