use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use fraclap::config::RunConfig;
use fraclap::runner::{error_json, run, run_suite, Command, RunRequest};
use fraclap::Error;

#[derive(Parser)]
#[command(version, about = "Nonlocal p-Laplacian eigenvalue and energy optimization")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the seed in the configuration
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Cross-check results against exact oracles where feasible
    #[arg(long, global = true)]
    validate: bool,
    /// Directory for cached kernel assemblies
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Principal eigenvalue and eigenfunction for the configured weight
    EigenSolve,
    /// Minimize the principal eigenvalue over the rearrangement class
    EigMin,
    /// Solve the Dirichlet problem for the configured weight
    DirichletSolve,
    /// Maximize the energy over the rearrangement class
    EnergyMax,
    /// Run the built-in oracle and property checks
    Validate,
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("{}", json!({ "error": error_json(e) }));
    match e {
        Error::Config(_) | Error::Json(_) => ExitCode::from(2),
        _ => ExitCode::FAILURE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Sub::EigenSolve => Command::EigenSolve,
        Sub::EigMin => Command::EigMin,
        Sub::DirichletSolve => Command::DirichletSolve,
        Sub::EnergyMax => Command::EnergyMax,
        Sub::Validate => return validate(&cli),
    };
    let Some(path) = &cli.config else {
        return fail(&Error::Config(vec!["--config is required".into()]));
    };
    let config = match fs::read_to_string(path).map_err(Error::from).and_then(|t| RunConfig::from_json(&t)) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let req = RunRequest {
        config,
        command,
        out: cli.out.clone(),
        seed: cli.seed,
        validate: cli.validate,
        cache_dir: cli.cache_dir.clone(),
    };
    match run(&req) {
        Ok(summary) => {
            println!("{}", serde_json::to_string(&summary).expect("summary serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn validate(cli: &Cli) -> ExitCode {
    let report = match run_suite(cli.seed.unwrap_or(0)) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    for c in &report.checks {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        println!("{mark} {} value={:?} tolerance={:?}", c.name, c.value, c.tolerance);
    }
    if let Some(out) = &cli.out {
        if let Err(e) = fs::create_dir_all(out).and_then(|_| fs::write(out.join("validate.json"), report.to_json())) {
            return fail(&Error::from(e));
        }
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
