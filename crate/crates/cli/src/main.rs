mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use swt_core::couplings::CouplingError;
use swt_core::experiments::ExperimentError;
use swt_core::oracle::OracleError;
use swt_core::{analytic::AnalyticError, mappings::MappingError, ConfigError};

use args::Cli;
use commands::{Ctx, ExperimentFile, Failure};
use output::{manifest_path, write_manifest, RunManifest, Sink};

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(f) = cause.downcast_ref::<Failure>() {
            return match f {
                Failure::Assertion(_) => 1,
                Failure::Usage(_) => 2,
                Failure::Cap(_) => 3,
            };
        }
        if let Some(OracleError::CapExceeded { .. }) = cause.downcast_ref::<OracleError>() {
            return 3;
        }
        if let Some(e) = cause.downcast_ref::<ExperimentError>() {
            return match e {
                ExperimentError::AssertionFailed(_) => 1,
                ExperimentError::IndeterminateAtBudget { .. } => 3,
                ExperimentError::Oracle(OracleError::CapExceeded { .. }) => 3,
                ExperimentError::Oracle(_) => 1,
                _ => 2,
            };
        }
        if let Some(e) = cause.downcast_ref::<CouplingError>() {
            return match e {
                CouplingError::Violated { .. } => 1,
                CouplingError::Oracle(OracleError::CapExceeded { .. }) => 3,
                _ => 2,
            };
        }
        if cause.is::<ConfigError>() || cause.is::<AnalyticError>() || cause.is::<MappingError>() {
            return 2;
        }
    }
    1
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let started = chrono::DateTime::<chrono::Utc>::from(std::time::SystemTime::now());
    if let Some(n) = cli.global.workers {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let file = match &cli.global.experiment {
        Some(p) => ExperimentFile::load(p)?,
        None => ExperimentFile::default(),
    };
    let seed = cli.global.seed.or(file.seed).unwrap_or(0);
    let ctx = Ctx {
        global: &cli.global,
        file,
        seed,
        sink: Sink {
            format: cli.global.format,
            out: cli.global.out.clone(),
        },
    };
    let result = commands::dispatch(&ctx, &cli.command);
    if let Some(out) = &cli.global.out {
        if out.exists() {
            let name = serde_json::to_value(&cli.command)?;
            let manifest = RunManifest {
                subcommand: name["subcommand"].as_str().unwrap_or(""),
                parameters: cli,
                master_seed: seed,
                tool_version: env!("CARGO_PKG_VERSION"),
                outputs: vec![out.clone()],
                started,
                finished: chrono::DateTime::<chrono::Utc>::from(std::time::SystemTime::now()),
            };
            write_manifest(&manifest_path(out), &manifest)?;
        }
    }
    result
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
