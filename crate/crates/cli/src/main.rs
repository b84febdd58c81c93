//! Command line front end for the ring soliton solver.
//!
//! Subcommands:
//!   solve     one profile, written as profile.csv + summary.csv
//!   sweep     beta across a grid of (m, P0), written as beta_vs_P0.csv
//!   validate  recheck artifacts on disk, or a fresh solve, against the bounds
//!   export    figure-ready data sets (and optionally a gnuplot script)
//!
//! Exit codes: 0 success, 1 runtime failure, 2 a validation or positivity
//! check failed, 64 usage error, 65 malformed input data.

// Negated comparisons keep NaN on the rejecting side of parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

mod commands;
mod config;
mod output;

use config::RunConfig;

/// Failure modes that map onto process exit codes.
pub enum Failure {
    /// Bad flags, bad config keys, out of range parameters. Exit 64.
    Usage(String),
    /// Input files that do not parse or fail basic schema checks. Exit 65.
    Data(String),
    /// Everything else (solver breakdown, IO). Exit 1.
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Internal(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Internal(e.into())
    }
}

impl From<ringsol_core::Error> for Failure {
    fn from(e: ringsol_core::Error) -> Self {
        Failure::Internal(anyhow::anyhow!("{e}"))
    }
}

#[derive(Parser)]
#[command(
    name = "ringsol",
    version,
    about = "Ring soliton profiles on a disk",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one (R, m, alpha, P0) problem and write profile + summary
    Solve(SolveArgs),
    /// Solve a grid of (m, P0) pairs and tabulate beta
    Sweep(SweepArgs),
    /// Check solver artifacts (or a fresh solve) against the analytic bounds
    Validate(SolveArgs),
    /// Write figure-ready CSV data sets
    Export(ExportArgs),
}

/// Flags shared by every subcommand. Scalar m / P0 live on the subcommands
/// because sweep takes repeated values.
#[derive(Args)]
struct CommonFlags {
    /// Domain radius
    #[arg(long = "R", value_name = "R")]
    radius: Option<f64>,
    /// Saturation parameter, must be >= 1
    #[arg(long)]
    alpha: Option<f64>,
    /// Basis dimension
    #[arg(long = "N", value_name = "N")]
    n: Option<usize>,
    /// Iteration cap for the minimizer
    #[arg(long)]
    max_iters: Option<usize>,
    /// Relative tolerance on the projected gradient
    #[arg(long)]
    grad_tol: Option<f64>,
    /// Quadrature panel count, defaults to max(8, N)
    #[arg(long)]
    panels: Option<usize>,
    /// Gauss nodes per quadrature panel
    #[arg(long)]
    nodes_per_panel: Option<usize>,
    /// Directory for output files
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// key = value config file; command line flags take precedence
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output format: csv (default) or json-lines
    #[arg(long, value_name = "FMT")]
    format: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    /// Vortex charge
    #[arg(long)]
    m: Option<i32>,
    /// Prescribed flux, must be positive
    #[arg(long = "P0", value_name = "P0")]
    p0: Option<f64>,
    #[command(flatten)]
    common: CommonFlags,
}

#[derive(Args)]
struct SweepArgs {
    /// Vortex charge, repeatable
    #[arg(long)]
    m: Vec<i32>,
    /// Prescribed flux, repeatable
    #[arg(long = "P0", value_name = "P0")]
    p0: Vec<f64>,
    #[command(flatten)]
    common: CommonFlags,
}

#[derive(Args)]
struct ExportArgs {
    /// Vortex charge (figure 2 only)
    #[arg(long)]
    m: Option<i32>,
    /// Prescribed flux (figure 1 only)
    #[arg(long = "P0", value_name = "P0")]
    p0: Option<f64>,
    /// Which data set: 1, 2, 3, or all
    #[arg(long, default_value = "all")]
    figure: String,
    /// Also write a plot.gp script for the exported data
    #[arg(long)]
    gnuplot: bool,
    #[command(flatten)]
    common: CommonFlags,
}

fn merge(common: &CommonFlags, m: Option<i32>, p0: Option<f64>) -> Result<RunConfig, Failure> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        cfg.apply_file(path)?;
    }
    if let Some(v) = common.radius {
        cfg.radius = Some(v);
    }
    if let Some(v) = m {
        cfg.m = v;
    }
    if let Some(v) = p0 {
        cfg.p0 = Some(v);
    }
    if let Some(v) = common.alpha {
        cfg.alpha = v;
    }
    if let Some(v) = common.n {
        cfg.n = v;
    }
    if let Some(v) = common.max_iters {
        cfg.max_iters = v;
    }
    if let Some(v) = common.grad_tol {
        cfg.grad_tol = v;
    }
    if let Some(v) = common.panels {
        cfg.panels = Some(v);
    }
    if let Some(v) = common.nodes_per_panel {
        cfg.nodes_per_panel = v;
    }
    if let Some(v) = &common.out_dir {
        cfg.out_dir = v.clone();
    }
    if let Some(v) = &common.format {
        cfg.format = config::parse_format(v).map_err(Failure::Usage)?;
    }
    Ok(cfg)
}

fn dispatch(cmd: Cmd) -> Result<u8, Failure> {
    match cmd {
        Cmd::Solve(a) => {
            let cfg = merge(&a.common, a.m, a.p0)?;
            commands::solve(&cfg)
        }
        Cmd::Sweep(a) => {
            let cfg = merge(&a.common, None, None)?;
            commands::sweep(&cfg, &a.m, &a.p0)
        }
        Cmd::Validate(a) => {
            let cfg = merge(&a.common, a.m, a.p0)?;
            commands::validate(&cfg)
        }
        Cmd::Export(a) => {
            let cfg = merge(&a.common, a.m, a.p0)?;
            commands::export(&cfg, &a.figure, a.gnuplot)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(64);
        }
    };
    match dispatch(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(64)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(65)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
