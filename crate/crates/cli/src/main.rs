use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zerocert_cli::output::write_atomic;
use zerocert_cli::{exit, run, CliError, Command, ProblemConfig};

/// Certified convexity-defect brackets and near-zero certificates.
#[derive(Parser, Debug)]
#[command(name = "zerocert", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Problem definition (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write the JSON certificate here (atomically).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Write the CSV table here (atomically).
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,

    /// Override the sampling resolution.
    #[arg(long, global = true, value_name = "N")]
    resolution: Option<usize>,

    /// Override the random seed.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Override a tolerance, e.g. `--tol hull=1e-9` (repeatable).
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,

    /// Suppress the human-readable report.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Two-sided bracket on delta of the body (or region).
    Delta,
    /// Near-zero certificate for the operator over the body (or region).
    Certify,
    /// Search the region for small-delta sets whose image hull holds 0.
    Search,
    /// Table of the oscillating counterexample.
    Example11 {
        /// Number of rows.
        #[arg(long, value_name = "N")]
        n_max: Option<u64>,
    },
    /// Sampled minimax gap inequality and convexity mechanism.
    Gap,
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let value: f64 = value.trim().parse().map_err(|e| format!("bad value `{value}`: {e}"))?;
    Ok((name.trim().to_string(), value))
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    let mut config = match &cli.config {
        Some(path) => ProblemConfig::load(path)?,
        None => ProblemConfig::default(),
    };
    if let Some(r) = cli.resolution {
        config.resolution = r;
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    for (name, value) in cli.tol {
        config.tolerances.insert(name, value);
    }
    let command = match cli.command {
        Cmd::Delta => Command::Delta,
        Cmd::Certify => Command::Certify,
        Cmd::Search => Command::Search,
        Cmd::Example11 { n_max } => {
            if n_max.is_some() {
                config.n_max = n_max;
            }
            Command::Example11
        }
        Cmd::Gap => Command::Gap,
    };
    let outcome = run(command, &config)?;
    if let Some(path) = &cli.out {
        write_atomic(path, outcome.file.to_json()?.as_bytes())?;
    }
    if let Some(path) = &cli.csv {
        write_atomic(path, &outcome.csv.to_bytes()?)?;
    }
    if !cli.quiet {
        print!("{}", outcome.report);
        println!("status: {}", outcome.file.status);
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    // clap would exit with 2 on usage errors, which is reserved for sound
    // negative outcomes here.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::ERROR } else { exit::SUCCESS });
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit::ERROR)
        }
    }
}
