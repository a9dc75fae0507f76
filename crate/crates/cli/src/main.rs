//! Command-line front door for coined quantum-walk experiments.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical contract
//! violation, 4 protocol inapplicable (degenerate spectrum).

mod config;
mod manifest;
mod output;
mod runner;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use config::Mode;

#[derive(Parser)]
#[command(
    name = "coinwalk",
    version,
    about = "Coined quantum-walk experiments with scheduled coin-space interventions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Flat `key = value` experiment file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output path (overrides the config file).
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format: csv or json.
    #[arg(long, global = true, value_name = "FMT")]
    format: Option<String>,

    /// Seed for the eigensolver's splitting draws.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Tolerance override for this mode's pass/fail check.
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,

    /// Extra KEY=VALUE overrides, applied after the config file (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a walk and write the final position distribution.
    Walk,
    /// Check return-to-origin for a single midpoint intervention.
    Revert,
    /// Run the periodic routine and detect position/coin periods.
    Periodic,
    /// Verify the momentum-block cycle identity and run the return protocol.
    Spectral,
    /// Sweep the intervention step and record peak location and negative mass.
    Scan,
    /// Run both backends on the same configuration and compare amplitudes.
    Crosscheck,
}

impl Command {
    fn mode(&self) -> Mode {
        match self {
            Command::Walk => Mode::Walk,
            Command::Revert => Mode::Revert,
            Command::Periodic => Mode::Periodic,
            Command::Spectral => Mode::Spectral,
            Command::Scan => Mode::Scan,
            Command::Crosscheck => Mode::Crosscheck,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

fn run(cli: Cli) -> i32 {
    let started = std::time::Instant::now();
    let mode = cli.command.mode();
    let cfg = match config::load(
        mode,
        cli.config.as_deref(),
        cli.out.as_deref(),
        cli.format.as_deref(),
        cli.seed,
        cli.tol,
        &cli.overrides,
    ) {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("config error: {msg}");
            return 2;
        }
    };

    match runner::run(&cfg) {
        Ok(outcome) => {
            let files: Vec<String> = outcome
                .files
                .iter()
                .map(|p| p.display().to_string())
                .collect();
            // Wall time goes to stderr only; output files stay byte-stable
            // across identical runs.
            eprintln!(
                "{} finished in {:.1} ms; wrote {}",
                mode.name(),
                started.elapsed().as_secs_f64() * 1e3,
                files.join(", ")
            );
            for warning in &outcome.manifest.warnings {
                eprintln!("warning: {warning}");
            }
            0
        }
        Err(err) => {
            eprintln!("{err}");
            err.exit_code()
        }
    }
}
