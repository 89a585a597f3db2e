//! `gfad`: run activity detection experiments, plot their results and run
//! the invariant self-test.
//!
//! Exit codes: 0 on success, 1 when a self-test check fails, 2 on a bad
//! config, CSV or argument, 3 when an experiment fails or its output cannot
//! be written.

mod config;
mod output;
mod plot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gf_detect::bench::{run_experiment, MetricRow};
use gf_detect::checks::{quick_suite, QUICK_SUITE};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("experiment error: {0}")]
    Experiment(#[from] gf_detect::Error),

    #[error("output error: {0}")]
    Output(String),

    #[error("{0} self-test check(s) failed")]
    Checks(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Checks(_) => 1,
            Self::Config(_) => 2,
            Self::Experiment(_) | Self::Output(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gfad", version, about = "Grant-free activity detection experiments")]
struct Cli {
    /// Worker threads for the trial pool (default: all cores). The
    /// `GF_THREADS` environment variable takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment or sweep described by a JSON config and write CSV.
    Run { config: PathBuf },
    /// Plot error rate against a CSV column as an SVG line chart.
    Plot {
        csv: PathBuf,
        /// Column for the x axis, e.g. `L`, `M`, `P` or `q`.
        #[arg(long)]
        x: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the fast invariant checks.
    Selftest {
        /// Deliberately break the named check.
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
}

fn threads(flag: Option<usize>) -> Result<usize, CliError> {
    let bad = |what: String| CliError::Config(format!("{what} must be a positive integer"));
    if let Ok(v) = std::env::var("GF_THREADS") {
        return match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(bad(format!("GF_THREADS={v}"))),
        };
    }
    match flag {
        Some(0) => Err(bad("--threads".into())),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn run(path: PathBuf, threads: usize) -> Result<(), CliError> {
    let plan = config::load(&path)?;
    let cells = match &plan.sweep {
        None => vec![plan.spec.clone()],
        Some(sweep) => (0..sweep.len())
            .map(|k| sweep.cell(&plan.spec, k))
            .collect::<Result<_, _>>()?,
    };
    let mut rows: Vec<MetricRow> = Vec::with_capacity(cells.len());
    for (k, cell) in cells.iter().enumerate() {
        let row = run_experiment(cell, threads)?;
        eprintln!("[{}/{}] {row}", k + 1, cells.len());
        if row.failures > 0 {
            eprintln!("  {} trial(s) lost to ill-conditioning", row.failures);
        }
        rows.push(row);
    }
    output::write_csv(&plan.csv, &rows)?;
    eprintln!("wrote {}", plan.csv.display());
    if let (Some(svg), Some(x)) = (&plan.svg, plan.x_column) {
        plot::plot(&plan.csv, x, svg)?;
        eprintln!("wrote {}", svg.display());
    }
    Ok(())
}

fn selftest(fault: Option<String>) -> Result<(), CliError> {
    if let Some(f) = &fault {
        if !QUICK_SUITE.contains(&f.as_str()) {
            return Err(CliError::Config(format!(
                "unknown check `{f}`, expected one of {}",
                QUICK_SUITE.join(", ")
            )));
        }
    }
    let results = quick_suite(fault.as_deref());
    for r in &results {
        println!("{r}");
    }
    match results.iter().filter(|r| !r.passed).count() {
        0 => Ok(()),
        n => Err(CliError::Checks(n)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = threads(cli.threads).and_then(|threads| match cli.command {
        Command::Run { config } => run(config, threads),
        Command::Plot { csv, x, out } => plot::plot(&csv, &x, &out),
        Command::Selftest { inject_fault } => selftest(inject_fault),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gfad: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
