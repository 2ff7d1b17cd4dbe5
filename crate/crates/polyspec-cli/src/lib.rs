//! Command-line front end for `polyspec`.
//!
//! [`run`] parses an argument vector, dispatches to one subcommand and
//! returns the process exit code: 0 on success or when every check passes, 1
//! when a check fails or a computation breaks down, 2 on a usage error
//! (unknown subcommand or flag, malformed polynomial or series JSON).
//!
//! Polynomials are JSON arrays of coefficients, low degree first: strings
//! `"p/q"` or integers select the exact backend, `[re, im]` pairs or
//! non-integer numbers the float backend. Every `--poly`-like option takes
//! either inline JSON or the path of a file containing it.
//!
//! Sampling commands draw sample `i` from its own seeded ChaCha stream, so
//! output does not depend on the number of workers; the seed is echoed in
//! every report. `POLYSPEC_THREADS` caps the worker count.

mod commands;
mod format;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polyspec::acceptance::DEFAULT_SEED;
use polyspec::Error;

/// Exit code for success or passing checks.
pub const EXIT_OK: i32 = 0;
/// Exit code for failed checks or computations.
pub const EXIT_FAIL: i32 = 1;
/// Exit code for usage errors.
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "POLYSPEC_THREADS";

/// Top-level command line.
#[derive(Debug, Parser)]
#[command(name = "polyspec", version, about = "Multiplier spectra and escape rates of polynomial maps")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Seed for every sampling run.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

/// Arithmetic backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    /// Exact rational arithmetic.
    Exact,
    /// Complex double precision.
    Float,
}

/// Normal form requested by `normalize`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Form {
    /// Monic with vanishing subleading coefficient.
    MonicCentered,
    /// Critically marked: leading coefficient `1/d`, `f(0) = 0`.
    Ingram,
}

/// Sample selection shared by the inequality checks.
#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    /// Check this polynomial instead of sampling.
    #[arg(long)]
    pub poly: Option<String>,
    /// Degrees to sample.
    #[arg(long, value_delimiter = ',', default_values_t = [4usize, 5, 6])]
    pub degree: Vec<usize>,
    /// Samples per degree.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Multiplier polynomial, multipliers and symmetric functions of one period.
    Spectrum {
        /// Polynomial (inline JSON or file).
        #[arg(long)]
        poly: String,
        /// Period.
        #[arg(long, default_value_t = 1)]
        period: usize,
        /// Expected degree, checked against the input.
        #[arg(long)]
        degree: Option<usize>,
        /// Backend; defaults to exact for rational input.
        #[arg(long, value_enum)]
        backend: Option<Backend>,
    },
    /// Conjugate into a normal form.
    Normalize {
        /// Polynomial (inline JSON or file).
        #[arg(long)]
        poly: String,
        /// Target normal form.
        #[arg(long, value_enum, default_value_t = Form::MonicCentered)]
        form: Form,
    },
    /// Moduli coordinates (degrees 2, 3) or quartic invariants.
    Invariants {
        /// Polynomial (inline JSON or file).
        #[arg(long)]
        poly: String,
    },
    /// Conjugacy classes from spectral data.
    Reconstruct {
        /// Degree: 2 and 3 take the fixed-point σ-vector, 4 takes `[s1, s2, s4, t2]`.
        #[arg(long)]
        degree: usize,
        /// Spectral data (inline JSON or file).
        #[arg(long)]
        sigma: String,
    },
    /// Compare the spectra and classes of `h1∘h2` and `h2∘h1`.
    IsospectralPair {
        /// First factor (inline JSON or file).
        #[arg(long)]
        h1: String,
        /// Second factor (inline JSON or file).
        #[arg(long)]
        h2: String,
        /// Largest period compared.
        #[arg(long, default_value_t = 2)]
        max_period: usize,
    },
    /// Escape rates and characteristic exponents.
    Escape {
        /// Complex polynomial (inline JSON or file).
        #[arg(long, conflicts_with = "series")]
        poly: Option<String>,
        /// Polynomial with series coefficients `[[exponent, coefficient], ...]`.
        #[arg(long, requires = "critical")]
        series: Option<String>,
        /// Critical points of the series polynomial, as series literals.
        #[arg(long)]
        critical: Option<String>,
        /// Largest period for characteristic exponents.
        #[arg(long, default_value_t = 1)]
        max_period: usize,
    },
    /// Lower bounds on `M^(1)`, `M^(2)` in terms of the escape rate.
    CheckTheoremB(SampleArgs),
    /// Upper and lower bounds on `M^(p)`, `m^(p)`.
    CheckAppendixA {
        #[command(flatten)]
        samples: SampleArgs,
        /// Largest period.
        #[arg(long, default_value_t = 3)]
        max_period: usize,
    },
    /// CSV of `(t, M, M1, M2)` along a sharp family, with fitted slopes.
    SharpFamily {
        /// Family kind.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        kind: u8,
        /// Degree.
        #[arg(long)]
        degree: usize,
        /// Parameter values as rationals; defaults to `10^2, …, 10^6`.
        #[arg(long, value_delimiter = ',')]
        t_grid: Option<Vec<String>>,
        /// Write the JSON summary here instead of a trailing comment line.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Exact `(M, M^(1), M^(2))` of a sharp family over the series field.
    VerifySharpness {
        /// Family kind.
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        kind: u8,
        /// Degree (4 or 5).
        #[arg(long)]
        degree: usize,
        /// Emit JSON instead of a text line.
        #[arg(long)]
        json: bool,
    },
    /// Jacobians of the multiplier maps at `z^d` and their checks.
    Jacobians {
        /// Degree.
        #[arg(long)]
        degree: usize,
    },
    /// Run the acceptance suite.
    Reproduce {
        /// Criteria to run; all by default.
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u8>>,
    },
}

/// Failure of a command before it could produce a verdict.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or input.
    Usage(String),
    /// A computation failed.
    Compute(Error),
    /// Output could not be written.
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::InvalidInput(_) | Error::BackendMismatch(_) => CliError::Usage(e.to_string()),
            other => CliError::Compute(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

/// Verdict of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Success, or every check passed.
    Pass,
    /// Some check failed.
    Fail,
}

/// Run with output to stdout (or `--output`) and diagnostics to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    run_with(argv, &mut stdout.lock(), &mut std::io::stderr())
}

/// Run with explicit report and diagnostic sinks.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(err, "{e}");
        return EXIT_USAGE;
    }
    let mut report = Vec::new();
    let result = commands::dispatch(&cli, &mut report);
    let written = match &cli.config.output {
        Some(path) => std::fs::write(path, &report),
        None => out.write_all(&report),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "i/o error: {e}");
        return EXIT_FAIL;
    }
    match result {
        Ok(Verdict::Pass) => EXIT_OK,
        Ok(Verdict::Fail) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(err, "polyspec: {e}");
            match e {
                CliError::Usage(_) => EXIT_USAGE,
                _ => EXIT_FAIL,
            }
        }
    }
}

/// Apply `POLYSPEC_THREADS` to the global worker pool.
fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
    // The pool can only be configured once per process; later calls keep it.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
