//! Experiment runner for the skewdiff toolkit.
//!
//! Every subcommand resolves its parameters from an optional flat config
//! file overlaid by command-line flags, runs one experiment on a seeded
//! ensemble and writes a JSON summary (or a CSV path table). Exit codes:
//! 0 when every gate passes, 1 when a gate fails, 2 for invalid input.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{ParamMap, SEED_ENV};
pub use error::{CliError, EXIT_GATE_FAILED, EXIT_INVALID_CONFIG, EXIT_PASS};
pub use report::{Check, CsvTable, Report};

macro_rules! param_flags {
    ($($field:ident => $key:literal : $help:literal),* $(,)?) => {
        /// Experiment parameters; each may also be set in the config file.
        #[derive(Debug, Clone, Default, Args)]
        pub struct ParamFlags {
            $(
                #[arg(long = $key, value_name = "VALUE", help = $help, allow_negative_numbers = true)]
                pub $field: Option<String>,
            )*
        }

        impl ParamFlags {
            /// Keys accepted in config files.
            pub const KEYS: &'static [&'static str] = &[$($key),*];

            pub fn to_map(&self) -> ParamMap {
                let mut m = ParamMap::default();
                $(
                    if let Some(v) = &self.$field {
                        m.insert($key, v.clone());
                    }
                )*
                m
            }
        }
    };
}

param_flags! {
    experiment => "experiment": "Experiment name within the subcommand",
    seed => "seed": "Master seed (default from SKEWDIFF_SEED)",
    q => "q": "Skewing parameter",
    q1 => "q1": "Skewing parameter of the first process",
    q2 => "q2": "Skewing parameter of the second process",
    x0 => "x0": "Start point (signed distance to the interface)",
    x01 => "x01": "Start of the first process",
    x02 => "x02": "Start of the second process",
    t => "t": "Time horizon",
    steps => "steps": "Number of time steps (overrides --dt)",
    dt => "dt": "Time step (default 1e-4)",
    paths => "paths": "Number of Monte Carlo paths",
    n => "n": "Mollifier scale n",
    tol_factor => "tol-factor": "Ordering tolerance factor c in c*sqrt(dt)",
    refine => "refine": "Also run at dt/4 (true/false)",
    xs => "xs": "Comma-separated start points for the mean local-time table",
    ts => "ts": "Comma-separated horizons for the mean local-time table",
    epsilon => "epsilon": "Separation threshold",
    profile => "profile": "Coefficient profile: zero, constant, sinusoidal, mixed",
    dim => "dim": "Ambient dimension d >= 2",
    kappa => "kappa": "Noise scale of the profile",
    amp => "amp": "Drift amplitude of the profile",
    freq => "freq": "Frequency of the profile",
    alpha => "alpha": "Constant drift of the constant profile",
    offsets => "offsets": "Comma-separated offset lengths along the offset direction",
    offset_dir => "offset-dir": "Comma-separated offset direction (default: the normal)",
    start => "start": "Comma-separated start point in R^d (default: origin)",
    normal => "normal": "Comma-separated interface normal (default: e_1)",
    level => "level": "Local-time level",
    big_t => "big-t": "Constant T of the tail bound",
    n_level => "n-level": "Time level N of the tail bound",
    a => "a": "Local-time threshold a",
    levels => "levels": "Number of local-time levels",
    probes => "probes": "Number of coefficient probe points",
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Flat key = value config file; flags take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads (0: all cores). Output does not depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Output file for the JSON summary or path CSV (default: stdout).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Extra CSV output (path or table data) where the experiment has one.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub params: ParamFlags,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Skew Brownian motion paths: one path as CSV, or an ensemble summary.
    Sbm(CommonArgs),
    /// Coupled pairs: corollary1, corollary2, remark1, remark2, ordering.
    Couple(CommonArgs),
    /// Local-time laws: eta-cdf, i-table, mollified, transform.
    Laws(CommonArgs),
    /// Interface diffusion: simulate, validate, rho-tail, small-local-time,
    /// time-change, moment.
    Gdiff(CommonArgs),
    /// Stochastic continuity in the start point under shared noise.
    Continuity(CommonArgs),
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "skewdiff",
    version,
    about = "Skew Brownian motion and interface diffusion experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    fn common(&self) -> &CommonArgs {
        match &self.command {
            Command::Sbm(c)
            | Command::Couple(c)
            | Command::Laws(c)
            | Command::Gdiff(c)
            | Command::Continuity(c) => c,
        }
    }
}

/// Result of one run: an optional JSON summary and an optional CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub report: Option<Report>,
    pub csv: Option<CsvTable>,
    pub pass: bool,
}

/// Resolves parameters and runs the selected experiment on a pool of
/// `workers` threads.
pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let common = cli.common();
    let mut params = match &common.config {
        Some(path) => ParamMap::load(path, ParamFlags::KEYS)?,
        None => ParamMap::default(),
    };
    params.overlay(common.params.to_map());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.workers)
        .build()
        .map_err(|e| CliError::config(format!("cannot start {} workers: {e}", common.workers)))?;
    pool.install(|| match &cli.command {
        Command::Sbm(_) => commands::sbm::run(&params),
        Command::Couple(_) => commands::couple::run(&params),
        Command::Laws(_) => commands::laws::run(&params),
        Command::Gdiff(_) => commands::gdiff::run(&params),
        Command::Continuity(_) => commands::continuity::run(&params),
    })
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs `cli`, writes its outputs and returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let common = cli.common();
    let result = run(cli).and_then(|out| {
        match (&out.report, &out.csv) {
            (Some(report), csv) => {
                emit(common.out.as_ref(), &report.to_json())?;
                if let (Some(table), Some(path)) = (csv, &common.csv) {
                    fs::write(path, table.render())?;
                }
            }
            (None, Some(table)) => emit(common.out.as_ref(), &table.render())?,
            (None, None) => {}
        }
        Ok(out.pass)
    });
    match result {
        Ok(true) => EXIT_PASS,
        Ok(false) => {
            eprintln!("skewdiff: at least one acceptance gate failed");
            EXIT_GATE_FAILED
        }
        Err(e) => {
            eprintln!("skewdiff: {e}");
            e.exit_code()
        }
    }
}

/// Parses `args` (including the program name) and runs them.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli),
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID_CONFIG
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            code
        }
    }
}
