use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use turnpike_lab::scenario::{load_and_execute, load_and_sweep, Mode, Outcome};

/// Finite-time turnpike experiments from JSON scenario configs.
#[derive(Parser)]
#[command(name = "turnpike-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory, overriding `output_dir` of the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed of the power-method start vector.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the scenario and write results.csv, summary.csv and plots.
    Run { config: PathBuf },
    /// As `run`, then check the scenario against its oracles.
    Verify { config: PathBuf },
    /// One solve per penalty weight; writes sweep.csv.
    Sweep {
        config: PathBuf,
        #[arg(long, value_delimiter = ',')]
        gammas: Option<Vec<f64>>,
        /// Solve the rows concurrently.
        #[arg(long)]
        parallel: bool,
        /// Also run the sweep checks.
        #[arg(long)]
        verify: bool,
    },
}

fn report(outcome: &Outcome, quiet: bool) {
    if quiet {
        return;
    }
    for (k, v) in outcome.summary.iter().filter(|(k, _)| !k.starts_with("check.")) {
        if !v.is_empty() {
            println!("{k:<20} {v}");
        }
    }
    println!();
    print!("{}", outcome.table());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (out, seed) = (cli.out.as_deref(), cli.seed);
    let result = match &cli.command {
        Command::Run { config } => load_and_execute(config, out, seed, Mode::Run),
        Command::Verify { config } => load_and_execute(config, out, seed, Mode::Verify),
        Command::Sweep {
            config,
            gammas,
            parallel,
            verify,
        } => {
            let mode = if *verify { Mode::Verify } else { Mode::Run };
            load_and_sweep(config, out, seed, gammas.as_deref(), *parallel, mode)
        }
    };
    match result {
        Ok(outcome) => {
            report(&outcome, cli.quiet);
            if outcome.failed() {
                if cli.quiet {
                    eprint!("{}", outcome.table());
                }
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
