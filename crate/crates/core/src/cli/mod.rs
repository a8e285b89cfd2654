//! Command-line surface: `laplace-toda <spectral|laplace|toda|verify>`.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or parse error, 3 degenerate input.

mod commands;
mod files;
mod verify;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::coeffring::CoeffError;
use crate::disc::DiscError;
use crate::disc_spectral::SpectralError;
use crate::floquet::FloquetError;
use crate::semidisc::SemiDiscError;
use crate::toda::TodaError;

pub use commands::{cmd_laplace, cmd_spectral, cmd_toda, Summary};
pub use files::{
    read_json, to_json, DiscreteFile, Field, FieldFile, Fourier, Metadata, OperatorFile, RhoGrid, RunConfig,
    SemiDiscreteFile,
};
pub use verify::{cmd_verify, run_suite, Check, Suite};

/// Environment variable capping the size of the worker pool.
pub const THREADS_ENV: &str = "LAPLACE_TODA_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("cannot parse {}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("cannot access {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Usage(_) | CliError::Invalid(_) | CliError::Parse { .. } | CliError::Io { .. } => 2,
            CliError::Degenerate(_) => 3,
        }
    }
}

fn coeff_error(module: &str, e: &CoeffError) -> CliError {
    let msg = format!("{module}: {e}");
    match e {
        CoeffError::NearVanishing { .. } | CoeffError::FitDivergence { .. } | CoeffError::BranchTracking { .. } => {
            CliError::Degenerate(msg)
        }
        CoeffError::InvalidPeriod(_) | CoeffError::EvenCoefficientCount(_) | CoeffError::RationalParse(_) => {
            CliError::Invalid(msg)
        }
    }
}

fn disc_error(module: &str, e: &DiscError) -> CliError {
    let msg = format!("{module}: {e}");
    match e {
        DiscError::DegeneratePeriods(_) | DiscError::DomainSize { .. } | DiscError::Invalid(_) => CliError::Invalid(msg),
        _ => CliError::Degenerate(msg),
    }
}

impl From<CoeffError> for CliError {
    fn from(e: CoeffError) -> Self {
        coeff_error("coeffring", &e)
    }
}

impl From<SemiDiscError> for CliError {
    fn from(e: SemiDiscError) -> Self {
        let msg = format!("semidisc: {e}");
        let mut inner = &e;
        while let SemiDiscError::Chain { source, .. } = inner {
            inner = source;
        }
        match inner {
            SemiDiscError::Coeff(c) => match coeff_error("semidisc", c) {
                CliError::Degenerate(_) => CliError::Degenerate(msg),
                _ => CliError::Invalid(msg),
            },
            SemiDiscError::BranchFailure { .. } => CliError::Degenerate(msg),
            _ => CliError::Invalid(msg),
        }
    }
}

impl From<DiscError> for CliError {
    fn from(e: DiscError) -> Self {
        disc_error("disc", &e)
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match &e {
            SpectralError::Disc(d) => disc_error("disc_spectral", d),
            SpectralError::Mismatch(_) => CliError::CheckFailed(format!("disc_spectral: {e}")),
            _ => CliError::Degenerate(format!("disc_spectral: {e}")),
        }
    }
}

impl From<FloquetError> for CliError {
    fn from(e: FloquetError) -> Self {
        let msg = format!("floquet: {e}");
        match e {
            FloquetError::NotNormalized(_) | FloquetError::Invalid(_) => CliError::Invalid(msg),
            _ => CliError::Degenerate(msg),
        }
    }
}

impl From<TodaError> for CliError {
    fn from(e: TodaError) -> Self {
        match &e {
            TodaError::Coeff(c) => coeff_error("toda", c),
            TodaError::Disc(d) => disc_error("toda", d),
            TodaError::IncompatibleField { .. } => CliError::CheckFailed(format!("toda: {e}")),
            TodaError::MissingLayer { .. } | TodaError::Shape => CliError::Invalid(format!("toda: {e}")),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "laplace-toda", version, about = "Laplace transformations, 2D Toda lattices and spectral curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral curve of an operator: exact polynomial and marked points (discrete) or
    /// sampled multiplier curve and special fibers (semi-discrete).
    Spectral(SpectralArgs),
    /// Applies a chain of Laplace transformations and traces the gauge invariants.
    Laplace(LaplaceArgs),
    /// Evolves a discrete `w`-field or checks a semi-discrete one and its `g` reconstruction.
    Toda(TodaArgs),
    /// Runs a randomized verification suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Directory for output files (created if missing).
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
    /// Residual threshold; overrides the configuration file.
    #[arg(long)]
    pub tol: Option<f64>,
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl CommonArgs {
    pub fn run_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => read_json(path)?,
            None => RunConfig::default(),
        };
        if let Some(tol) = self.tol {
            cfg.tol = tol;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SpectralArgs {
    /// Operator file (JSON).
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformType {
    First,
    Second,
}

#[derive(Debug, Clone, Args)]
pub struct LaplaceArgs {
    /// Operator file (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Semi-discrete transformation type.
    #[arg(long = "type", value_enum, default_value = "first")]
    pub kind: TransformType,
    /// Discrete transformation `Λ^{s₁s₂}_{ij}`, written as e.g. `pp12`, `mp21`.
    #[arg(long, default_value = "pp12")]
    pub variant: String,
    /// Number of transformations to apply.
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Undo the chain with the inverse transformation and report gauge equivalence
    /// with the input.
    #[arg(long)]
    pub then_inverse: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct TodaArgs {
    /// Field file (JSON).
    #[arg(long)]
    pub input: PathBuf,
    /// Number of new layers to compute (discrete fields).
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Suite to run (`all` runs every suite).
    #[arg(value_name = "SUITE", required_unless_present = "suite_flag")]
    pub suite: Option<String>,
    /// Same as the positional suite.
    #[arg(long = "suite", value_name = "SUITE", conflicts_with = "suite")]
    pub suite_flag: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random cases per check.
    #[arg(long, default_value_t = 5)]
    pub count: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// Caps the global worker pool from [`THREADS_ENV`].
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    // the pool can only be configured once per process; later calls keep the first size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<Summary, CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Spectral(args) => cmd_spectral(args),
        Command::Laplace(args) => cmd_laplace(args),
        Command::Toda(args) => cmd_toda(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

/// Parses arguments, runs the command, prints its summary and returns the exit code.
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
    match execute(&cli) {
        Ok(summary) => {
            summary.print();
            if summary.failures.is_empty() {
                0
            } else {
                for f in &summary.failures {
                    eprintln!("check failed: {f}");
                }
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
