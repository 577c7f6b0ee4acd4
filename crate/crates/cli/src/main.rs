//! Experiment runner for the vertical-federated contextual bandit library.

mod cost_model;
mod error;
mod ingest_cmd;
mod out;
mod run_replay;
mod run_synthetic;
mod spec;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::CliResult;

#[derive(Parser)]
#[command(
    name = "vfcb",
    version,
    about = "Vertical-federated linear contextual bandits: simulation, replay evaluation, cost models, verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a synthetic experiment spec (regret curves per cell and seed).
    RunSynthetic {
        /// Experiment spec (JSON).
        #[arg(long)]
        spec: PathBuf,
        /// Output directory (default: $VFCB_OUT_DIR, then ./out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the spec's repetition count.
        #[arg(long)]
        seeds: Option<usize>,
        /// Worker threads for the run matrix (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Couple Thompson-sampling runs to their centralized counterparts
        /// (test flag).
        #[arg(long)]
        coupled_ts: bool,
    },
    /// Evaluate policies against an ingested log with the replay evaluator.
    RunReplay {
        /// Ingested binary log cache (see `ingest`).
        #[arg(long)]
        log: PathBuf,
        /// Replay spec (JSON).
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ingest a raw tab-separated ad log into the binary replay cache.
    Ingest {
        /// Raw log: response, 13 integer columns, 26 categorical columns.
        #[arg(long)]
        log: PathBuf,
        /// Cache file to write.
        #[arg(long)]
        out: PathBuf,
        /// Ingestion settings (JSON; defaults apply when omitted).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Emit the analytical compute/communication cost table.
    CostModel {
        /// Horizon T.
        #[arg(long, default_value_t = 5000)]
        t: u64,
        /// Participant count M.
        #[arg(long, default_value_t = 5)]
        m: u64,
        /// Arm counts K (comma separated).
        #[arg(long, value_delimiter = ',', default_value = "100,500,1000")]
        k: Vec<u64>,
        /// Context dimensions d (comma separated).
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "10,20,50,100,200,500,1000,2000,5000"
        )]
        d: Vec<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the protocol invariant suites and report PASS/FAIL per suite.
    Verify {
        /// Number of privacy witnesses to check.
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        /// Corrupt one mask entry before a losslessness run; the suite is
        /// then expected to fail and to name the first diverging round.
        #[arg(long)]
        inject_fault: bool,
    },
}

fn dispatch(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::RunSynthetic {
            spec,
            out,
            seeds,
            threads,
            coupled_ts,
        } => {
            run_synthetic::run(&spec, out::resolve_out_dir(out), seeds, threads, coupled_ts)?;
            Ok(0)
        }
        Command::RunReplay { log, spec, out } => {
            run_replay::run(&log, &spec, out::resolve_out_dir(out))?;
            Ok(0)
        }
        Command::Ingest { log, out, config } => {
            ingest_cmd::run(&log, &out, config.as_deref())?;
            Ok(0)
        }
        Command::CostModel { t, m, k, d, out } => {
            cost_model::run(t, m, k, d, out::resolve_out_dir(out))?;
            Ok(0)
        }
        Command::Verify {
            seeds,
            inject_fault,
        } => verify::run(seeds, inject_fault),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}
