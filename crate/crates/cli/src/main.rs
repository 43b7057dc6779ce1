use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ebrank_cli::{CliError, Pipeline, PipelineConfig, Stage};

/// Energy-based re-ranking pipeline.
#[derive(Parser)]
#[command(name = "ebrank", version)]
struct Args {
    /// One of gen-data, train-lm, generate, label, train-ebr, rerank,
    /// report, sweep-k, sweep-div, cross-model, timing, all.
    stage: String,
    /// Pipeline config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(args: Args) -> Result<(), CliError> {
    let stage = if args.stage == "all" {
        None
    } else {
        Some(args.stage.parse::<Stage>()?)
    };
    let mut cfg = PipelineConfig::load(&args.config)?;
    if let Some(out) = args.out {
        cfg.output_dir = out;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let mut pipeline = Pipeline::new(cfg)?;
    match stage {
        Some(s) => pipeline.run(s),
        None => pipeline.run_all(),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
