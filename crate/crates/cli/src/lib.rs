//! Batch front end for the `geoqm` library.
//!
//! Every subcommand writes CSV (or JSON for `check`) to `--out` or stdout.
//! `--summary PATH` additionally writes a JSON record with the tool version,
//! the merged configuration and per-command statistics.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_ACCEPTANCE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Acceptance(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) | CliError::Io(_) => EXIT_VALIDATION,
            CliError::Acceptance(_) => EXIT_ACCEPTANCE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Validation(m) => write!(f, "validation failed: {m}"),
            CliError::Acceptance(m) => write!(f, "acceptance failed: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<geoqm::Error> for CliError {
    fn from(e: geoqm::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "geoqm", version, about = "Geometric quantum mechanics toolkit")]
pub struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub hbar: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON summary file.
    #[arg(long, global = true)]
    pub summary: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the acceptance criteria and emit a JSON summary.
    Check(CheckArgs),
    /// Dump structure constants as CSV (mu,nu,rho,value).
    Structure(StructureArgs),
    /// Chart tensors on u*(4), or the field discrepancy report.
    Tensors(TensorsArgs),
    /// Two-qubit witness sweeps and the independence locus.
    Witness {
        #[command(subcommand)]
        action: WitnessCommand,
    },
    /// Wigner function of a 1D state on a (q, p) grid.
    Wigner(WignerArgs),
    /// Moyal bracket convergence and stationarity checks.
    Moyal(MoyalArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Run every criterion.
    #[arg(long, conflicts_with = "criterion")]
    pub all: bool,
    /// Run selected criteria (1-8).
    #[arg(long, value_delimiter = ',')]
    pub criterion: Vec<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algebra {
    U2,
    U3,
    U4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Symbol {
    C,
    D,
}

#[derive(Debug, Args)]
pub struct StructureArgs {
    #[arg(long, value_enum)]
    pub algebra: Option<Algebra>,
    #[arg(long, value_enum)]
    pub symbol: Option<Symbol>,
    /// Entries with |value| below this are omitted.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Chart {
    U4,
}

#[derive(Debug, Args)]
pub struct TensorsArgs {
    #[arg(long, value_enum, default_value = "u4")]
    pub chart: Chart,
    /// Compare derived vector fields with the listed closed forms.
    #[arg(long)]
    pub verify_fields: bool,
    /// Number of seeded sample points.
    #[arg(long)]
    pub points: Option<usize>,
    /// Exit 1 when any listed field disagrees with the derived one.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Subcommand)]
pub enum WitnessCommand {
    /// Entropy, concurrence and their independence along an `a` sweep.
    Sweep(SweepArgs),
    /// Recover the independence curve on the slice `b = a`.
    Locus(LocusArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub a_min: Option<f64>,
    #[arg(long)]
    pub a_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Fixed `b` (defaults to `b = a`).
    #[arg(long)]
    pub b: Option<f64>,
    /// `c` as a fraction of its positivity bound `2√(ab)`.
    #[arg(long)]
    pub c_frac: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LocusArgs {
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct WignerArgs {
    /// `gaussian`, `fock:N` or `file:PATH` (CSV with columns q,re,im).
    #[arg(long)]
    pub state: Option<String>,
    /// Grid points per axis (power of two).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub q0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub p0: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MoyalArgs {
    /// Semiclassical convergence of the Moyal bracket over a list of ħ.
    #[arg(long)]
    pub hbar_sweep: bool,
    #[arg(long, value_delimiter = ',')]
    pub hbars: Option<Vec<f64>>,
    /// Stationarity residual of the oscillator level N at `--hbar`.
    #[arg(long, conflicts_with = "hbar_sweep")]
    pub stationary: Option<usize>,
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("geoqm: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    config::merge(&mut cfg.hbar, cli.hbar);
    config::merge(&mut cfg.seed, cli.seed);
    config::merge(&mut cfg.out, cli.out.clone());
    config::merge(&mut cfg.summary, cli.summary.clone());
    let pool = thread_pool()?;
    pool.install(|| commands::dispatch(cli.command, cfg))
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("GEOQM_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("GEOQM_THREADS must be a positive integer, got {v:?}")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Usage(e.to_string()))
}

/// Fixed-width scientific formatting (17 significant digits).
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `text` to `path`, or stdout when `None`.
pub fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
