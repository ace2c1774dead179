//! Command-line front end for `hlmax-core`: configuration, suite orchestration
//! and CSV/JSON output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod commands;
pub mod config;
pub mod error;
pub mod json;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;

pub const EXIT_SUCCESS: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_RESOLUTION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(
    name = "hlmax",
    version,
    about = "Discrete maximal operators and numerical checks of their inequalities"
)]
pub struct Cli {
    #[command(flatten)]
    pub options: GlobalOptions,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOptions {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Suite to run (repeatable; `all` selects every suite).
    #[arg(long = "suite", global = true, value_name = "NAME")]
    pub suites: Vec<String>,
    /// Grid spacing.
    #[arg(long = "h", global = true)]
    pub h: Option<f64>,
    #[arg(long, global = true)]
    pub radii_max: Option<f64>,
    #[arg(long, global = true)]
    pub radii_count: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub q: Option<f64>,
    /// Seed for the randomized batteries and benchmark data.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Include per-point checks in the JSON report.
    #[arg(long, global = true)]
    pub per_point: bool,
    /// Any configuration key, as `KEY=VALUE` (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a maximal operator and write CSV fields.
    Compute,
    /// Run verification suites and write `verify.json`.
    Verify,
    /// Time the naive and prefix-sum averaging paths.
    Bench,
    /// Write the plot-ready table behind one example.
    Repro {
        /// One of example-5-1, example-6-local, example-6-global, theorem-9, noncompact.
        id: String,
    },
}

impl GlobalOptions {
    /// Loads the configuration file (if any) and applies the flags on top.
    pub fn config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        for item in &self.set {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {item:?}")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        if !self.suites.is_empty() {
            cfg.suites = self.suites.clone();
        }
        cfg.h = self.h.or(cfg.h);
        cfg.radii_max = self.radii_max.or(cfg.radii_max);
        cfg.radii_count = self.radii_count.or(cfg.radii_count);
        cfg.alpha = self.alpha.unwrap_or(cfg.alpha);
        cfg.p = self.p.unwrap_or(cfg.p);
        cfg.q = self.q.unwrap_or(cfg.q);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        cfg.threads = self.threads.or(cfg.threads);
        cfg.per_point |= self.per_point;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(command: &Command, cfg: &RunConfig) -> Result<i32, CliError> {
    match command {
        Command::Compute => {
            for path in commands::cmd_compute(cfg)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(EXIT_SUCCESS)
        }
        Command::Verify => Ok(commands::cmd_verify(cfg)?.1),
        Command::Bench => Ok(commands::cmd_bench(cfg)?.1),
        Command::Repro { id } => {
            let path = commands::cmd_repro(id, cfg)?;
            eprintln!("wrote {}", path.display());
            Ok(EXIT_SUCCESS)
        }
    }
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let cfg = cli.options.config()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Failed(e.to_string()))?;
    pool.install(|| execute(&cli.command, &cfg))
}

/// Parses `args` (including the program name) and runs the command; returns the exit status.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_SUCCESS };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hlmax: {e}");
            e.exit_code()
        }
    }
}
