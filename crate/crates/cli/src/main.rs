//! `vortex-spectral`: command-line front end for the vortex linearization
//! pipeline. Tables go to CSV, scalar reports to JSON; both carry the SHA-256
//! of the resolved configuration.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure
//! (including a failed check in `reproduce-paper`).

mod commands;
mod config;
mod output;
mod reproduce;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::process::ExitCode;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "vortex-spectral", version, about = "Spectral analysis of the linearized Ginzburg-Landau vortex")]
struct Cli {
    /// Flat key = value file; command-line flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<String>,

    /// Worker threads (falls back to VORTEX_SPECTRAL_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the vortex profile and tabulate U, U', 1 - U².
    Vortex(VortexArgs),
    /// Tabulate the zero-energy pair (Φ⁽⁰⁾, Θ⁽⁰⁾) and its constants.
    ZeroModes(ZeroModesArgs),
    /// Tabulate the generalized eigenfunction Φ(r, k).
    Eigenfn(EigenfnArgs),
    /// Connection coefficient a(k) and spectral density on a log grid.
    Measure(MeasureArgs),
    /// Distorted Fourier transform of a bump.
    Transform(TransformArgs),
    /// Heat, Klein-Gordon or wave evolution of bump data.
    Evolve(EvolveArgs),
    /// Decay diagnostics of an evolution.
    DecayReport(DecayArgs),
    /// Lieb-Thirring lower bound on the eigenvalues below threshold.
    LtBound(LtArgs),
    /// Shooting search for the eigenvalues below threshold.
    Eigenvalues(EigenvaluesArgs),
    /// Recompute the published numbers and print a pass/fail table.
    ReproducePaper(ReproduceArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ProfileArgs {
    /// Vortex degree n.
    #[arg(long, default_value_t = 1)]
    pub degree: u32,
    /// Relative tolerance of the profile solve.
    #[arg(long, default_value_t = 1e-10)]
    pub rel: f64,
    /// Absolute tolerance of the profile solve.
    #[arg(long, default_value_t = 1e-12)]
    pub abs: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VortexArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, default_value_t = 60.0)]
    pub r_max: f64,
    /// Rows in the output table (uniform in r).
    #[arg(long, default_value_t = 601)]
    pub points: usize,
    #[arg(long, default_value = "profile.csv")]
    #[serde(skip)]
    pub out: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ZeroModesArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    /// H1 or H2.
    #[arg(long, default_value = "H2")]
    pub operator: String,
    #[arg(long, default_value_t = 0.01)]
    pub r_min: f64,
    #[arg(long, default_value_t = 100.0)]
    pub r_max: f64,
    /// Rows in the output table (log-uniform in r).
    #[arg(long, default_value_t = 400)]
    pub points: usize,
    #[arg(long, default_value = "zero_modes.csv")]
    #[serde(skip)]
    pub out: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EigenfnArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, default_value = "H2")]
    pub operator: String,
    /// Frequency k > 0.
    #[arg(long)]
    pub k: f64,
    #[arg(long, default_value_t = 0.01)]
    pub r_min: f64,
    #[arg(long, default_value_t = 20.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 400)]
    pub points: usize,
    #[arg(long, default_value = "eigenfn.csv")]
    #[serde(skip)]
    pub out: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, default_value = "H2")]
    pub operator: String,
    #[arg(long, default_value_t = 0.05)]
    pub k_min: f64,
    #[arg(long, default_value_t = 20.0)]
    pub k_max: f64,
    #[arg(long, default_value_t = 160)]
    pub points: usize,
    #[arg(long, default_value = "measure.csv")]
    #[serde(skip)]
    pub out: String,
}

/// A bump `amp·(1 - ((r - r0)/w)²)^power` on `[r0 - w, r0 + w]`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct BumpArgs {
    #[arg(long, default_value_t = 3.0)]
    pub r0: f64,
    #[arg(long, default_value_t = 1.5)]
    pub width: f64,
    #[arg(long, default_value_t = 3)]
    pub power: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TransformArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, default_value = "H2")]
    pub operator: String,
    #[command(flatten)]
    pub bump: BumpArgs,
    #[arg(long, default_value_t = 40.0)]
    pub k_max: f64,
    /// Radial extent of the plan (use at least 40 for H1).
    #[arg(long, default_value_t = 20.0)]
    pub r_max: f64,
    #[arg(long, default_value = "transform.csv")]
    #[serde(skip)]
    pub out: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FlowArgs {
    /// heat, kg or wave.
    #[arg(long)]
    pub flow: String,
    /// H1 or H2; defaults to H1 for kg and H2 otherwise.
    #[arg(long)]
    pub operator: Option<String>,
    #[command(flatten)]
    pub bump: BumpArgs,
    /// Centre of an initial-velocity bump (kg and wave only).
    #[arg(long, requires = "g_width")]
    pub g_r0: Option<f64>,
    #[arg(long, requires = "g_r0")]
    pub g_width: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub k_max: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[command(flatten)]
    pub flow: FlowArgs,
    /// Comma-separated output times.
    #[arg(long, value_delimiter = ',', default_value = "0,1,5,10")]
    pub times: Vec<f64>,
    #[arg(long, default_value = "evolve.csv")]
    #[serde(skip)]
    pub out: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DecayArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[command(flatten)]
    pub flow: FlowArgs,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,5,10,20,30,50,70,100")]
    pub times: Vec<f64>,
    #[arg(long, default_value = "decay.json")]
    #[serde(skip)]
    pub out: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LtArgs {
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    /// Split radius between the integrated part and the tail bound.
    #[arg(long, default_value_t = 7.0)]
    pub r1: f64,
    /// Profile extent; the tail claim is checked on [7, 400].
    #[arg(long, default_value_t = 400.0)]
    pub r_max: f64,
    #[arg(long, default_value = "lt.json")]
    #[serde(skip)]
    pub out: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EigenvaluesArgs {
    #[arg(long, default_value_t = 4)]
    pub count: usize,
    /// Outer shooting radius.
    #[arg(long, default_value_t = 150.0)]
    pub r_big: f64,
    #[arg(long, default_value_t = 400.0)]
    pub r_max: f64,
    #[arg(long, default_value = "ev.json")]
    #[serde(skip)]
    pub out: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReproduceArgs {
    /// Restrict to one group: vortex, zero-modes, eigenfn, measure, transform, lt, n2.
    #[arg(long)]
    pub only: Option<String>,
    /// Print the table as JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Seed for the randomized round-trip check.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Also write the JSON table here.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<String>,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
}

impl From<vortex_spectral::Error> for CliError {
    fn from(e: vortex_spectral::Error) -> Self {
        match e {
            vortex_spectral::Error::InvalidInput(m) => CliError::Config(m),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("cannot write output: {e}"))
    }
}

fn configure_threads(flag: Option<usize>) -> Result<(), CliError> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("VORTEX_SPECTRAL_THREADS") {
            Ok(v) => Some(v.trim().parse().map_err(|_| CliError::Config(format!("VORTEX_SPECTRAL_THREADS='{v}' is not a count")))?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::Config("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot size the thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads(cli.threads)?;
    match cli.command {
        Command::Vortex(a) => commands::vortex(&a),
        Command::ZeroModes(a) => commands::zero_modes(&a),
        Command::Eigenfn(a) => commands::eigenfn(&a),
        Command::Measure(a) => commands::measure(&a),
        Command::Transform(a) => commands::transform(&a),
        Command::Evolve(a) => commands::evolve(&a),
        Command::DecayReport(a) => commands::decay(&a),
        Command::LtBound(a) => commands::lt(&a),
        Command::Eigenvalues(a) => commands::eigenvalues(&a),
        Command::ReproducePaper(a) => reproduce::run(&a),
    }
}

fn main() -> ExitCode {
    let args = match config::merge(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(m)) => {
            eprintln!("configuration error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(CliError::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
