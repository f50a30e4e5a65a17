use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use propscore::cli::{self, CliError, CliResult, RunConfig, EXIT_VERIFY_FAILED};

#[derive(Parser)]
#[command(name = "propscore", version, about = "Evaluate and verify proper scoring rules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Comma-separated rules, e.g. `quadratic,power(3),shannon`.
    #[arg(long)]
    rules: Option<String>,
    /// INI configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Score forecasts against realized outcomes.
    Score {
        forecasts: PathBuf,
        outcomes: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Divergence matrix between two sets of densities.
    Divergence {
        p: PathBuf,
        q: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Randomized propriety, Euler and symmetry checks; JSON report.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Hyvärinen score of a positive density on a periodic grid.
    GridScore {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(common: &Common) -> CliResult<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig { rules: vec![], ..RunConfig::default() },
    };
    if let Some(list) = &common.rules {
        cfg.rules = cli::parse_rule_list(list)?;
    } else if common.config.is_none() {
        cfg.rules = RunConfig::default().rules;
    }
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError { code: 2, message: format!("cannot write {}: {e}", path.display()) }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Score { forecasts, outcomes, common } => {
            let cfg = load(&common)?;
            emit(common.out.as_deref(), &cli::run_score(&cfg, &forecasts, &outcomes)?)?;
        }
        Command::Divergence { p, q, common } => {
            let cfg = load(&common)?;
            emit(common.out.as_deref(), &cli::run_divergence(&cfg, &p, &q)?)?;
        }
        Command::Verify { common, seed, samples, tol } => {
            let mut cfg = load(&common)?;
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.samples = samples.unwrap_or(cfg.samples);
            cfg.tol = tol.unwrap_or(cfg.tol);
            let report = cli::run_verify(&cfg)?;
            emit(common.out.as_deref(), &cli::verify_report_json(&report))?;
            if !report.pass {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
        Command::GridScore { input, out } => emit(out.as_deref(), &cli::run_grid_score(&input)?)?,
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("propscore: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
