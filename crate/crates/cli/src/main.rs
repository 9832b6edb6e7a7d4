use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qnbt_core::harness::{self, checks, emit_report, ReportFormat, RunOptions};
use qnbt_core::{Algorithm, Error};

/// Runs the optimizer benchmark experiments.
#[derive(Parser, Debug)]
#[command(name = "qnbt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one experiment, or `all` of them, and print a results table.
    Run {
        /// Experiment id from `qnbt list`, or `all`.
        experiment: String,
        /// Comma-separated algorithm labels replacing the registered ones.
        #[arg(long, value_delimiter = ',')]
        algos: Option<Vec<String>>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        grad_tol: Option<f64>,
        #[arg(long, env = "QNBT_SEED", default_value_t = 0)]
        seed: u64,
        /// csv, markdown or jsonlines.
        #[arg(long, default_value = "csv")]
        format: String,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include the large stochastic batches in `run all`.
        #[arg(long)]
        heavy: bool,
    },
    /// List registered experiments.
    List,
    /// Run the acceptance checks; exits with status 2 if any fails.
    Check {
        /// Only these criteria, e.g. `--only 1,4,11`.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u8>>,
    },
}

fn usage_error(e: &Error) -> bool {
    matches!(e, Error::UnknownExperiment(_) | Error::UnknownFormat(_) | Error::UnknownAlgorithm(_))
}

fn run(
    experiment: &str,
    algos: Option<Vec<String>>,
    opts: RunOptions,
    format: &str,
    out: Option<PathBuf>,
) -> Result<(), Error> {
    let format: ReportFormat = format.parse()?;
    let algorithms = algos.map(|v| v.iter().map(|s| s.trim().parse::<Algorithm>()).collect()).transpose()?;
    let opts = RunOptions { algorithms, ..opts };
    let rows = match experiment {
        "all" => harness::run_all(&opts)?,
        id => harness::run_experiment(&harness::lookup(id)?, &opts)?,
    };
    let bytes = emit_report(&rows, format)?;
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}

fn list() {
    for def in harness::registry() {
        let algs: Vec<&str> = def.algorithms().iter().map(|a| a.label()).collect();
        let heavy = if def.heavy { " (heavy)" } else { "" };
        println!("{}\tdim={}\t{}{heavy}", def.id, def.dim(), algs.join(","));
    }
}

fn check(only: Option<Vec<u8>>) -> ExitCode {
    let outcomes: Vec<_> = match only {
        None => checks::run_all_checks(),
        Some(ids) => {
            let mut v = Vec::new();
            for id in ids {
                match checks::run_check(id) {
                    Some(o) => v.push(o),
                    None => {
                        eprintln!("error: no criterion {id}");
                        return ExitCode::from(1);
                    }
                }
            }
            v
        }
    };
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(2) }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { experiment, algos, max_iters, grad_tol, seed, format, out, heavy } => {
            let opts = RunOptions { algorithms: None, max_iters, grad_tol, seed, include_heavy: heavy };
            match run(&experiment, algos, opts, &format, out) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(if usage_error(&e) { 1 } else { 3 })
                }
            }
        }
        Command::List => {
            list();
            ExitCode::SUCCESS
        }
        Command::Check { only } => check(only),
    }
}
