use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ndn_radar::runner::{
    compare_dirs, run_scenario, write_outputs, RunError, RunOptions, Scenario,
};

/// Simulate round-based NDN retrieval of radar data.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its outputs.
    Run {
        config: PathBuf,
        /// Base seed; repetition i uses seed + i.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<u32>,
        /// Output directory (default: out/<scenario name>).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a scenario, its topology and traces without running it.
    Validate { config: PathBuf },
    /// Compare the summaries of two output directories.
    Compare { a: PathBuf, b: PathBuf },
}

const EXIT_CONFIG: u8 = 1;
const EXIT_ABORT: u8 = 2;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            seed,
            reps,
            out,
        } => {
            let scenario = match Scenario::load(&config) {
                Ok(s) => s,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            let out = out.unwrap_or_else(|| PathBuf::from("out").join(&scenario.name));
            let result = run_scenario(
                &scenario,
                &RunOptions {
                    seed,
                    reps,
                    record_packets: false,
                },
            );
            let written = write_outputs(&result, &out);
            let aborted = result.aborted().len();
            match written {
                Ok(()) if aborted == 0 => {
                    println!(
                        "{}: {} simulations, outputs in {}",
                        scenario.name,
                        result.reps.len(),
                        out.display()
                    );
                    ExitCode::SUCCESS
                }
                Ok(()) | Err(RunError::NoCompletedReps) => {
                    eprintln!(
                        "error: {aborted} of {} simulations aborted; see {}",
                        result.reps.len(),
                        out.display()
                    );
                    ExitCode::from(EXIT_ABORT)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_CONFIG)
                }
            }
        }
        Command::Validate { config } => match Scenario::load(&config) {
            Ok(s) => {
                let points = s.sweep_points().len();
                println!(
                    "{}: ok ({} nodes, {} links, {} files per round, {} sweep point(s) x {} repetitions)",
                    s.name,
                    s.topology.nodes.len(),
                    s.topology.links.len(),
                    s.topology.ideal_files(),
                    points,
                    s.repetitions
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
        Command::Compare { a, b } => match compare_dirs(&a, &b) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(EXIT_CONFIG)
            }
        },
    }
}
