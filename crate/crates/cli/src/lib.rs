//! Command-line front end. Exit codes: 0 success, 1 domain failure, 2 usage or I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod io;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Malformed input: bad flags, unparsable or ill-shaped matrix files.
    Input(String),
    Io(String),
    /// The input is well formed but the mathematics refuses it.
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) | CliError::Io(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

impl From<jordan_geo::Error> for CliError {
    fn from(e: jordan_geo::Error) -> Self {
        use jordan_geo::Error as E;
        match e {
            E::NotSquare { .. } | E::ShapeMismatch { .. } | E::NonFinite => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Domain(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "jordan-geo",
    version,
    about = "Geometry of normal algebraic elements in matrix JB*-triples"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Algorithmic tolerance (clustering, tangency, rank cut-offs).
    #[arg(long, global = true, env = "JORDAN_GEO_TOL")]
    pub tol: Option<f64>,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Normal square matrices, unitary orbits `UaU*`.
    Cstar,
    /// Rectangular matrices, orbits `VaU`.
    Jb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Axioms,
    Peirce,
    Spectral,
    Derivations,
    Manifold,
    Metric,
    Jb,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectral resolution and component signature of an element.
    Spectral {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "cstar")]
        mode: Mode,
    },
    /// Geodesic trajectory as CSV.
    #[command(allow_negative_numbers = true)]
    Geodesic {
        a: PathBuf,
        u: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, default_value_t = 1.0)]
        t1: f64,
        #[arg(long, default_value_t = 64)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomised verification suites.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Unitaries carrying `a` onto `b` inside one component.
    Connect {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value = "cstar")]
        mode: Mode,
        /// File for `U`.
        #[arg(long)]
        out_u: Option<PathBuf>,
        /// File for `V` (jb mode).
        #[arg(long)]
        out_v: Option<PathBuf>,
    },
    /// Random normal element `U(Σ λ_k D_k)U*` of a prescribed component.
    Random {
        /// Comma-separated `λ:r` pairs; `λ` is real or `re+imi`.
        #[arg(long)]
        component: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Points of the fiber through `a` in direction `v` with equivalence verdicts.
    #[command(allow_negative_numbers = true)]
    Fiber {
        a: PathBuf,
        v: PathBuf,
        #[arg(
            long,
            value_delimiter = ',',
            required = true,
            allow_hyphen_values = true
        )]
        t_list: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Peirce spaces of a tripotent and the Peirce parts of an optional element.
    Peirce {
        e: PathBuf,
        #[arg(long)]
        z: Option<PathBuf>,
    },
    /// Tangent space at a normal element and the tangency of an optional vector.
    Tangent {
        a: PathBuf,
        #[arg(long)]
        u: Option<PathBuf>,
    },
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match commands::dispatch(&cli) {
        Ok(report) => {
            if out.write_all(report.stdout.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
            for w in &report.warnings {
                let _ = writeln!(err, "warning: {w}");
            }
            report.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
