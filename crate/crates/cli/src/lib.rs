//! `hhcert` command-line front end.
//!
//! Exit codes: 0 success or Pass, 1 Fail verdict, 2 usage or input error,
//! 3 evaluation error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;
pub mod selftest;

pub use output::{parse_number, parse_rational};

/// Default seed for every Monte Carlo run.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "hhcert", version, about = "Simplex averages, circulant products and Hermite-Hadamard certification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub(crate) struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum ModeArg {
    Face,
    Solid,
}

impl From<ModeArg> for hhcert_core::simplex::Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Face => hhcert_core::simplex::Mode::Face,
            ModeArg::Solid => hhcert_core::simplex::Mode::Solid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub(crate) enum PropertyArg {
    Convex,
    Quasi,
    Strong,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact volume of a scaled simplex.
    Volume {
        /// Comma-separated side lengths (integers, decimals or p/q).
        #[arg(long, value_delimiter = ',', conflicts_with = "n", required_unless_present = "n")]
        sides: Option<Vec<String>>,
        /// Unit simplex of this dimension.
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// I_n(s), J_n(s), K_n(s), the absolute-deviation integral and rho_n as exact rationals.
    ClosedForms {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1")]
        s: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Table of rho_n for n = 1..=n-max with the "< 1" verdict.
    Contraction {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=64))]
        n_max: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Circulant matrix operations on exact generators.
    Matrix {
        #[command(subcommand)]
        op: MatrixOp,
    },
    /// Monte Carlo decay experiment for the averaged operators.
    Korovkin(KorovkinArgs),
    /// Grid certification of a one-variable function.
    Certify(CertifyArgs),
    /// n-dimensional premise check at user points.
    CertifyNd(NdArgs),
    /// Run the acceptance suite.
    Selftest {
        /// Run only these criteria (comma-separated numbers).
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u32>>,
    },
}

#[derive(Debug, Subcommand)]
pub(crate) enum MatrixOp {
    /// Generator of circ(a) circ(b).
    Multiply {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// circ(a) x.
    Apply {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Doubly stochastic, sub-stochastic or neither.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, default_value_t = hhcert_core::circulant::DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// First row of a product of face generators by the explicit nested-sum formula.
    ProductRow {
        /// One generator per flag, in product order.
        #[arg(long = "gen", required = true, allow_hyphen_values = true)]
        generators: Vec<String>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub(crate) struct KorovkinArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Face)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 10)]
    pub m_max: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Target function of x1..xn; defaults to the distance to the barycenter.
    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<String>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub(crate) struct CertifyArgs {
    #[arg(value_enum)]
    pub property: PropertyArg,
    /// Expression in x, or a builtin: square, reciprocal, exponential, logarithm, sqrt-abs.
    #[arg(long, allow_hyphen_values = true)]
    pub g: String,
    /// Interval as a:b.
    #[arg(long, allow_hyphen_values = true)]
    pub domain: String,
    /// Strong-convexity modulus (required for `strong`).
    #[arg(long)]
    pub modulus: Option<String>,
    #[arg(long, default_value_t = 33)]
    pub grid: usize,
    #[arg(long, default_value_t = 32)]
    pub quad_order: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub(crate) struct NdArgs {
    /// Symmetric expression in x1..xn.
    #[arg(long, allow_hyphen_values = true)]
    pub f: String,
    #[arg(long)]
    pub n: usize,
    /// CSV file with one point per line; `#` starts a comment.
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Face)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 32)]
    pub quad_order: usize,
    /// Monte Carlo samples per point when n > 3.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug)]
pub(crate) enum CliError {
    Usage(String),
    Evaluation(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Evaluation(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Evaluation(m) => m,
        }
    }
}

impl From<hhcert_core::Error> for CliError {
    fn from(e: hhcert_core::Error) -> Self {
        match e {
            hhcert_core::Error::Evaluation { .. } => CliError::Evaluation(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

/// Runs the tool on `argv` (program name first) and returns the exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = match cli.command {
        Command::Volume { sides, n, out: o } => commands::volume(sides, n, &o, out),
        Command::ClosedForms { n, s, out: o } => commands::closed_forms(n, &s, &o, out),
        Command::Contraction { n_max, out: o } => commands::contraction(n_max as usize, &o, out),
        Command::Matrix { op } => commands::matrix(op, out),
        Command::Korovkin(args) => commands::korovkin(&args, out, err),
        Command::Certify(args) => commands::certify(&args, out),
        Command::CertifyNd(args) => commands::certify_nd(&args, out),
        Command::Selftest { only } => Ok(selftest::run_suite(only.as_deref(), out)),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}
