use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lexsim::harness::{self, ExperimentGrid, SimulateOptions};
use lexsim::{Error, Result};

#[derive(Parser)]
#[command(name = "lexsim", version, about = "Success-gated lexical convention simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the parameter sweep and write runs.csv.
    Simulate {
        /// Flat `key = value` config file.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Runs per parameter combination (overrides the config file).
        #[arg(long)]
        runs: Option<usize>,
        /// Master seed (overrides the config file).
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; defaults to all cores.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Write a JSON-lines trace of every interaction.
        #[arg(long)]
        trace: bool,
        /// Write every agent's final lexicon.
        #[arg(long)]
        dump_lexicons: bool,
    },
    /// Summaries, t-tests and the mapshare fit from runs.csv.
    Analyze {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-figure CSV tables from runs.csv.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out, runs, seed, threads, trace, dump_lexicons } => {
            let text = std::fs::read_to_string(&config).map_err(|source| Error::Io { path: config.clone(), source })?;
            let mut grid = ExperimentGrid::parse(&text)?;
            if let Some(runs) = runs {
                grid.runs = runs;
            }
            if let Some(seed) = seed {
                grid.master_seed = seed;
            }
            let combos = harness::expand_grid(&grid).len();
            eprintln!("simulating {combos} combos x {} runs", grid.runs);
            let opts = SimulateOptions { threads, trace, dump_lexicons };
            let results = harness::simulate(&grid, &out, &opts)?;
            eprintln!("wrote {} rows to {}", results.len(), out.join(harness::io::RUNS_FILE).display());
        }
        Command::Analyze { input, out } => {
            let a = harness::analyze(&input, &out)?;
            eprintln!(
                "wrote {} summary rows, {} tests, {} fits to {}",
                a.summary.len(),
                a.tests.len(),
                a.fits.len(),
                out.display()
            );
        }
        Command::Report { input, out } => {
            let tables = harness::report(&input, &out)?;
            eprintln!("wrote {} figure tables to {}", tables.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
