//! Command-line front end.
//!
//! Exit codes: 0 success, 1 harness experiment failed, 2 unreadable or
//! malformed input, 3 invalid parameters, 4 numerical failure. Standard
//! output carries only the report; diagnostics go to standard error.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use specnorm_core::harness::{run_suite, Experiment, SuiteTrials};
use specnorm_core::{estimate, EstimateRequest, ErrorKind, Method};
use thiserror::Error;

use crate::io::{read_matrix, Format, ReadError};
use crate::report::JsonReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_EXPERIMENT_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_PARAMETER: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "specnorm", version, about = "Randomized relative-error spectral norm estimation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the spectral norm of a matrix file.
    Estimate(EstimateArgs),
    /// Run the Monte Carlo validation experiments.
    Harness(HarnessArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    Sketch,
    Direct,
    Exact,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Auto => Method::Auto,
            MethodArg::Sketch => Method::Sketch,
            MethodArg::Direct => Method::Direct,
            MethodArg::Exact => Method::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputKind {
    Json,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentArg {
    Lemma1,
    Lemma3,
    Theorem1,
    All,
}

impl From<ExperimentArg> for Experiment {
    fn from(e: ExperimentArg) -> Experiment {
        match e {
            ExperimentArg::Lemma1 => Experiment::Lemma1,
            ExperimentArg::Lemma3 => Experiment::Lemma3,
            ExperimentArg::Theorem1 => Experiment::Theorem1,
            ExperimentArg::All => Experiment::All,
        }
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Matrix file (Matrix Market or dense CSV).
    pub input: PathBuf,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Relative error tolerance, in (0, 1).
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Failure probability, in (0, 1).
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// RNG seed; drawn from OS entropy when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = OutputKind::Json)]
    pub output: OutputKind,
}

#[derive(Debug, Args)]
pub struct HarnessArgs {
    #[arg(long, value_enum, default_value_t = ExperimentArg::All)]
    pub experiment: ExperimentArg,
    /// Trials per experiment; each experiment has its own default.
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

/// Resolved settings for one estimate run.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub input_path: PathBuf,
    pub format: Format,
    pub eps: f64,
    pub delta: f64,
    pub method: Method,
    pub seed: u64,
    pub output: OutputKind,
}

impl From<EstimateArgs> for CliConfig {
    fn from(a: EstimateArgs) -> Self {
        CliConfig {
            format: a.format.unwrap_or_else(|| Format::infer(&a.input)),
            input_path: a.input,
            eps: a.eps,
            delta: a.delta,
            method: a.method.into(),
            seed: a.seed.unwrap_or_else(rand::random),
            output: a.output,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: ReadError },
    #[error("{0}")]
    Core(#[from] specnorm_core::Error),
    #[error("cannot write output: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } => EXIT_PARSE,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Input => EXIT_PARSE,
                ErrorKind::Parameter => EXIT_PARAMETER,
                ErrorKind::Numerical => EXIT_NUMERICAL,
            },
            CliError::Output(_) => EXIT_NUMERICAL,
        }
    }
}

/// Reads the matrix, estimates, and writes the report to `out`.
pub fn run<W: Write>(config: &CliConfig, out: W) -> Result<(), CliError> {
    let start = Instant::now();
    let req = EstimateRequest::new(config.eps, config.delta, config.method, config.seed);
    // validate parameters before touching the file
    for (name, value) in [("eps", config.eps), ("delta", config.delta)] {
        if !(value > 0.0 && value < 1.0) {
            return Err(specnorm_core::Error::OutOfUnitInterval { name, value }.into());
        }
    }
    let matrix = read_matrix(&config.input_path, config.format).map_err(|source| CliError::Read {
        path: config.input_path.clone(),
        source,
    })?;
    let report = estimate(&matrix, &req)?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let json = JsonReport::new(&report, wall_time_ms);
    match config.output {
        OutputKind::Json => json.write_json(out)?,
        OutputKind::Plain => json.write_plain(out)?,
    }
    Ok(())
}

/// Runs the harness and writes its JSON report; returns whether every
/// experiment passed.
pub fn run_harness<W: Write>(args: &HarnessArgs, mut out: W) -> Result<bool, CliError> {
    let trials = args.trials.map(SuiteTrials::uniform).unwrap_or_default();
    let report = run_suite(args.experiment.into(), trials, args.seed)?;
    for r in &report.results {
        eprintln!(
            "{} {:<32} rate {:.4} bound {:.4} ({} trials)",
            if r.stats.passed { "PASS" } else { "FAIL" },
            r.name,
            r.stats.empirical_rate,
            r.stats.bound,
            r.stats.trials
        );
    }
    serde_json::to_writer(&mut out, &report).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(report.passed)
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARAMETER } else { EXIT_OK };
        }
    };
    let stdout = io::stdout();
    let result = match cli.command {
        Command::Estimate(a) => run(&CliConfig::from(a), stdout.lock()).map(|()| true),
        Command::Harness(a) => run_harness(&a, stdout.lock()),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_EXPERIMENT_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
