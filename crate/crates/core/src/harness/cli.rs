//! `defer-lab` command line.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 bad config or
//! arguments, 3 runtime error.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use super::config::ExperimentConfig;
use super::{dataset, experiments, verify};
use crate::error::Error;

#[derive(Debug, Parser)]
#[command(name = "defer-lab", version, about = "Learning to defer: staged vs. joint learning experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        /// Overrides `experiment.output_dir`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites and print a JSON report.
    Verify {
        /// One of consistency, calibration, gradient, cal_failure, theorem1.
        #[arg(long)]
        suite: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample datasets.
    Dataset {
        #[command(subcommand)]
        command: DatasetCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum DatasetCommand {
    /// Write `n` samples of a world (fig4, mixture, cal, theorem1) as CSV.
    Gen { world: String, n: usize, seed: u64, out: PathBuf },
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidWorld(_) => 2,
        _ => 3,
    }
}

fn fail(err: Error) -> i32 {
    eprintln!("error: {err}");
    exit_code(&err)
}

pub fn main() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => execute(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    }
}

pub fn execute(cli: Cli) -> i32 {
    match cli.command {
        Command::Run { config, out } => {
            let config = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            let dir = out.unwrap_or_else(|| config.experiment.output_dir.clone());
            let output = match experiments::run_experiment(&config) {
                Ok(o) => o,
                Err(e) => return fail(e),
            };
            match output.write(&dir) {
                Ok(paths) => {
                    for p in paths {
                        println!("wrote {}", p.display());
                    }
                }
                Err(e) => return fail(e),
            }
            match output.passed {
                Some(false) => {
                    eprintln!("{}: FAILED", config.experiment.kind.name());
                    1
                }
                _ => 0,
            }
        }
        Command::Verify { suite, seed, out } => {
            let names: Vec<&str> = suite.iter().map(String::as_str).collect();
            let report = match verify::run_verifications(&names, seed) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{text}");
            if let Some(path) = out {
                if let Err(e) = std::fs::write(&path, format!("{text}\n")) {
                    return fail(e.into());
                }
            }
            if report.passed {
                0
            } else {
                1
            }
        }
        Command::Dataset { command: DatasetCommand::Gen { world, n, seed, out } } => {
            let result = dataset::generate(&world, n, seed).and_then(|samples| {
                let file = std::fs::File::create(&out)?;
                dataset::write_csv(&samples, std::io::BufWriter::new(file))
            });
            match result {
                Ok(()) => 0,
                Err(e) => fail(e),
            }
        }
    }
}
