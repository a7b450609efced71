//! Command-line front end: reads a JSON run configuration, computes outage
//! curves, capacities or cross-method comparisons, and writes CSV.

pub mod commands;
pub mod config;
pub mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{Prepared, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Config = 1,
    Numerical = 2,
    BoundExceeded = 3,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

impl CliError {
    pub fn exit(&self) -> Exit {
        Exit::Config
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "spa-outage",
    version,
    about = "Outage probability by saddle point approximation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outage probability over the threshold grid, one row per point and method.
    Outage(RunArgs),
    /// Ergodic capacity, one row per scenario and method.
    Capacity(RunArgs),
    /// Pairwise method deviations; exits 3 when a bound is exceeded.
    Compare(RunArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// JSON run configuration.
    pub config: PathBuf,
    /// Output file; CSV goes to stdout and the summary to stderr when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<config::OutputFormat>,
    /// Overrides the Monte Carlo seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the method list, e.g. `spa,gil_pelaez`.
    #[arg(long, value_delimiter = ',')]
    pub method: Option<Vec<String>>,
}

impl RunArgs {
    /// Loads the config file and applies the command-line overrides.
    pub fn load(&self) -> Result<Prepared, CliError> {
        let mut cfg = RunConfig::from_path(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.monte_carlo.seed = Some(seed);
        }
        if let Some(methods) = &self.method {
            cfg.methods = methods
                .iter()
                .map(|m| {
                    serde_json::from_value(serde_json::Value::String(m.trim().to_string()))
                        .map_err(|_| CliError::Config(format!("--method: unknown method '{m}'")))
                })
                .collect::<Result<_, _>>()?;
        }
        if let Some(out) = &self.output {
            cfg.output = Some(out.clone());
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        cfg.prepare()
    }
}

type Handler = fn(&Prepared, &mut dyn Write, &mut dyn Write) -> Result<Exit, CliError>;

/// Runs a parsed command line. CSV goes to the configured output file, or
/// to `stdout` (with the summary on `stderr`) when there is none.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<Exit, CliError> {
    let (args, command): (&RunArgs, Handler) = match &cli.command {
        Command::Outage(a) => (a, commands::outage),
        Command::Capacity(a) => (a, commands::capacity),
        Command::Compare(a) => (a, commands::compare),
    };
    let prepared = args.load()?;
    match &prepared.output {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Config(format!("output: cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            let exit = command(&prepared, &mut w, stdout)?;
            w.flush()?;
            Ok(exit)
        }
        None => command(&prepared, stdout, stderr),
    }
}

/// Entry point shared by the binary and the tests: parses `argv`, runs,
/// reports errors and returns the process exit code.
pub fn main_with_args<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() {
                Exit::Config.code()
            } else {
                Exit::Ok.code()
            };
        }
    };
    match run(&cli, stdout, stderr) {
        Ok(exit) => exit.code(),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit().code()
        }
    }
}
