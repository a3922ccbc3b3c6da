//! `shiftcodes` command-line tool.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const SCHEMA_VERSION: u32 = 1;
pub const UNITS: &str = "hbar = 1; shifts in q/p units; lattice generator rows in units of sqrt(2*pi)";

#[derive(Debug, Parser)]
#[command(name = "shiftcodes", version, about = "Shift-resistant quantum codes: thresholds, Monte Carlo, plot data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Noise level at which a code's error rate reaches a target.
    Threshold(ThresholdArgs),
    /// Seeded Monte Carlo of a lattice code under Gaussian shift noise.
    Mc(McArgs),
    /// CSV series for plotting.
    Plotdata(PlotArgs),
    /// Report on a qudit code with its dense-vector oracle.
    QuditDemo(QuditArgs),
    /// Gram matrix, standard form, dual and shortest vectors of a lattice.
    LatticeInfo(LatticeInfoArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ThresholdLattice {
    Square,
    Hex,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, value_enum)]
    pub lattice: ThresholdLattice,
    /// Error rate to solve for; defaults to 0.1100 (square) or 0.1905 (hex).
    #[arg(long)]
    pub target_pe: Option<f64>,
    /// Absolute tolerance of the cell integral.
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CodeFamily {
    Square,
    Hex,
    Shor9,
    File,
}

#[derive(Debug, Args)]
pub struct CodeArgs {
    #[arg(long, value_enum, default_value = "square")]
    pub code: CodeFamily,
    /// Logical dimension of square and hexagonal codes.
    #[arg(long, default_value_t = 2)]
    pub n: u64,
    /// Position spacing of a square code; defaults to sqrt(2*pi/n).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// JSON file `{"N": modes, "M": rows}` for `--code file`.
    #[arg(long)]
    pub lattice_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Shift noise on syndrome ancillas; 0 means ideal extraction.
    #[arg(long, default_value_t = 0.0)]
    pub ancilla_sigma: f64,
    /// Finite squeezing of the codewords, added to the channel noise.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "SHIFTCODES_WORKERS", default_value_t = 0)]
    pub workers: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(subcommand)]
    pub kind: PlotKind,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StateChoice {
    Zero,
    One,
    Plus,
}

#[derive(Debug, Subcommand)]
pub enum PlotKind {
    /// Position density of an approximate codeword with its envelope.
    CodewordDensity {
        #[arg(long, default_value_t = 0.25)]
        delta: f64,
        /// Defaults to `delta`.
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long, default_value_t = 2)]
        n: u64,
        /// Defaults to sqrt(pi).
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_enum, default_value = "zero")]
        state: StateChoice,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Signed delta functions of the ideal Wigner function.
    WignerSites {
        #[arg(long, default_value_t = 2)]
        n: u64,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0)]
        j: u64,
        /// `s` and `t` run over `-window..=window`.
        #[arg(long, default_value_t = 3)]
        window: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error rates, CSS rate and capacity bounds against sigma.
    Sweep {
        #[arg(long, default_value_t = 0.2)]
        from: f64,
        #[arg(long, default_value_t = 0.7)]
        to: f64,
        #[arg(long, default_value_t = 51)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct QuditArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub r1: u64,
    #[arg(long)]
    pub r2: u64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LatticeInfoArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A mistake in the invocation rather than a failure of the computation.
#[derive(Debug)]
pub struct UserError(pub String);

impl std::fmt::Display for UserError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UserError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    use shiftcodes::Error as E;
    if err.downcast_ref::<UserError>().is_some() || err.downcast_ref::<std::io::Error>().is_some() {
        return 1;
    }
    match err.downcast_ref::<E>() {
        Some(E::NoConvergence(_) | E::Singular(_)) => 2,
        Some(_) => 1,
        None => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
