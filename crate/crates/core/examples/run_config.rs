//! Drives a run from a JSON configuration, as the command-line tool does, and
//! prints the resulting summary.

use fraclap::config::RunConfig;
use fraclap::runner::{run, Command, RunRequest};

const CONFIG: &str = r#"{
    "grid": {"dim": 1, "bounds": [[0, 1]], "cells_per_axis": [8]},
    "kernel": {"family": "pure_fractional", "p": 2, "s": 0.4},
    "weight": {"generator": "binary", "fraction": 0.5},
    "solver": {"restarts": 5, "seed": 11}
}"#;

fn main() -> fraclap::Result<()> {
    let out = std::env::temp_dir().join("fraclap-run-config");
    let req = RunRequest {
        config: RunConfig::from_json(CONFIG)?,
        command: Command::EigMin,
        out: Some(out.clone()),
        seed: None,
        validate: true,
        cache_dir: None,
    };
    let summary = run(&req)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    println!("outputs written to {}", out.display());
    Ok(())
}
