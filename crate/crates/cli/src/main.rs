use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use yieldlab::parallel::configure_threads;
use yieldlab::scenario::{run_scenario, ScenarioConfig, ScenarioError};
use yieldlab::{Error, Execution};

/// Runs one batch scenario and writes its CSV/JSON artifacts.
#[derive(Parser, Debug)]
#[command(name = "yieldlab", version)]
struct Args {
    /// Scenario configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output` from the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads, 0 picks the number of CPUs.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Overrides the quadrature cell size `h`.
    #[arg(long, allow_hyphen_values = true)]
    h: Option<f64>,
}

fn fail(err: ScenarioError) -> ExitCode {
    eprint!("{}", err.to_json().render());
    ExitCode::from(if err.is_usage() { 2 } else { 1 })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut config = match ScenarioConfig::from_path(&args.config) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    if let Some(h) = args.h {
        config.h = Some(h);
    }
    if !configure_threads(args.threads) {
        return fail(ScenarioError::new(
            Some(config.scenario),
            Error::config("threads", "could not build the worker pool"),
        ));
    }
    let out = args
        .out
        .or_else(|| config.output.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    match run_scenario(&config, &out, Execution::default()) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}
