//! Batch runs driven by a [`RunConfig`], writing plot-ready CSV and a JSON summary.

mod suite;

pub use suite::{run_suite, CheckOutcome, SuiteReport};

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::config::{Problem, RunConfig};
use crate::dirichlet::{energy_e, p2_linear_oracle, solve_dirichlet};
use crate::eigen::{p2_oracle, principal_eigen};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::kernel::{assemble_cached, assemble_with, AssemblyOptions, KernelAssembly};
use crate::optimize::{maximize_energy, minimize_eigenvalue, OptimizationTrace};

/// Classes with at most this many members are checked exhaustively under `--validate`.
pub const BRUTE_FORCE_LIMIT: u128 = 5_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    EigenSolve,
    EigMin,
    DirichletSolve,
    EnergyMax,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::EigenSolve => "eigen-solve",
            Command::EigMin => "eig-min",
            Command::DirichletSolve => "dirichlet-solve",
            Command::EnergyMax => "energy-max",
        }
    }

    pub fn parse(name: &str) -> Option<Command> {
        [Command::EigenSolve, Command::EigMin, Command::DirichletSolve, Command::EnergyMax]
            .into_iter()
            .find(|c| c.name() == name)
    }
}

#[derive(Clone, Debug)]
pub struct RunRequest {
    pub config: RunConfig,
    pub command: Command,
    /// Output directory; falls back to the config's `output_dir`, then `out`.
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub validate: bool,
    pub cache_dir: Option<PathBuf>,
}

/// SHA-256 of the compact JSON form of the config.
pub fn config_hash(config: &RunConfig) -> String {
    let text = serde_json::to_string(config).expect("config serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Executes a run and writes `trace.csv`, `field_u.csv`, `field_g.csv` and
/// `summary.json`. Solver failures still produce a `summary.json` describing
/// the error before it is returned.
pub fn run(req: &RunRequest) -> Result<Value> {
    let mut config = req.config.clone();
    if let Some(cmd) = &config.command {
        if cmd != req.command.name() {
            return Err(Error::Config(vec![format!(
                "config is for command {cmd:?}, not {:?}",
                req.command.name()
            )]));
        }
    }
    config.command = Some(req.command.name().to_string());
    if req.seed.is_some() {
        config.solver.seed = req.seed;
    }
    let problem = config.build()?;
    let out = req
        .out
        .clone()
        .or_else(|| config.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out)?;

    let mut summary = Map::new();
    summary.insert("command".into(), json!(req.command.name()));
    summary.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    summary.insert("config_hash".into(), json!(config_hash(&config)));
    summary.insert("config".into(), serde_json::to_value(&config)?);

    let result = execute(&problem, req, &out, &mut summary);
    match result {
        Ok(()) => {
            summary.insert("status".into(), json!("ok"));
            let value = Value::Object(summary);
            if !all_finite(&value) {
                return Err(Error::NonConvergence {
                    solver: "run",
                    iterations: 0,
                    residual: f64::NAN,
                    objective: f64::NAN,
                });
            }
            write_json(&out.join("summary.json"), &value)?;
            Ok(value)
        }
        Err(e) => {
            summary.insert("status".into(), json!("error"));
            summary.insert("error".into(), error_json(&e));
            write_json(&out.join("summary.json"), &Value::Object(summary))?;
            Err(e)
        }
    }
}

fn execute(problem: &Problem, req: &RunRequest, out: &Path, summary: &mut Map<String, Value>) -> Result<()> {
    let assembly = match &req.cache_dir {
        Some(dir) => assemble_cached(&problem.grid, &problem.kernel, &AssemblyOptions::default(), dir)?,
        None => assemble_with(&problem.grid, &problem.kernel, &AssemblyOptions::default())?,
    };
    let grid = &problem.grid;
    let g0 = problem.class.generator();
    match req.command {
        Command::EigenSolve => {
            let r = principal_eigen(&assembly, g0, &problem.eigen)?;
            let phi = 1.0 / (r.lambda * r.lambda);
            write_text(
                &out.join("trace.csv"),
                &format!(
                    "k,lambda,phi,eigen_iterations,eigen_residual\n0,{:?},{:?},{},{:?}\n",
                    r.lambda, phi, r.iterations, r.residual
                ),
            )?;
            write_field(&out.join("field_u.csv"), grid, &r.u)?;
            write_field(&out.join("field_g.csv"), grid, g0)?;
            summary.insert("lambda".into(), json!(r.lambda));
            summary.insert("phi".into(), json!(phi));
            summary.insert("residual".into(), json!(r.residual));
            summary.insert("iterations".into(), json!(r.iterations));
            summary.insert("normalization_defect".into(), json!(r.normalization_defect));
            if req.validate {
                if assembly.p() == 2.0 {
                    let o = p2_oracle(&assembly, g0)?;
                    summary.insert("oracle_lambda".into(), json!(o));
                    summary.insert("matches_oracle".into(), json!(rel(r.lambda, o) <= 1e-8));
                } else {
                    summary.insert("validation_skipped".into(), json!("dense oracle requires p = 2"));
                }
            }
        }
        Command::DirichletSolve => {
            let r = solve_dirichlet(&assembly, g0, &problem.reaction, &problem.dirichlet)?;
            write_text(
                &out.join("trace.csv"),
                &format!(
                    "k,lambda,phi,eigen_iterations,eigen_residual\n0,,{:?},{},{:?}\n",
                    r.energy, r.iterations, r.residual
                ),
            )?;
            write_field(&out.join("field_u.csv"), grid, &r.u)?;
            write_field(&out.join("field_g.csv"), grid, g0)?;
            summary.insert("phi".into(), json!(r.energy));
            summary.insert("energy".into(), json!(r.energy));
            summary.insert("residual".into(), json!(r.residual));
            summary.insert("iterations".into(), json!(r.iterations));
            if req.validate {
                if assembly.p() == 2.0 && problem.reaction.is_zero() {
                    let exact = p2_linear_oracle(&assembly, g0)?;
                    let dist = r.u.sup_distance(&exact);
                    summary.insert("oracle_sup_distance".into(), json!(dist));
                    summary.insert("matches_oracle".into(), json!(dist <= 1e-8 * exact.max_abs().max(1.0)));
                } else {
                    summary.insert("validation_skipped".into(), json!("linear oracle requires p = 2 and c = 0"));
                }
            }
        }
        Command::EigMin => {
            let t = minimize_eigenvalue(&assembly, &problem.class, &problem.alternating, &problem.eigen)?;
            write_trace(out, grid, &t)?;
            let best = t.best();
            let lambda = best.lambda.expect("eigen trace records lambda");
            summary.insert("lambda".into(), json!(lambda));
            summary.insert("phi".into(), json!(best.phi));
            summary.insert("residual".into(), json!(best.solver_residual));
            insert_trace_info(summary, &t);
            if req.validate {
                validate_bruteforce(problem, summary, |g| {
                    if assembly.p() == 2.0 {
                        p2_oracle(&assembly, g)
                    } else {
                        Ok(principal_eigen(&assembly, g, &problem.eigen)?.lambda)
                    }
                }, lambda, false, assembly.p() == 2.0)?;
            }
        }
        Command::EnergyMax => {
            let t = maximize_energy(&assembly, &problem.class, &problem.reaction, &problem.alternating, &problem.dirichlet)?;
            write_trace(out, grid, &t)?;
            let best = t.best();
            summary.insert("phi".into(), json!(best.phi));
            summary.insert("residual".into(), json!(best.solver_residual));
            insert_trace_info(summary, &t);
            if req.validate {
                let exact = assembly.p() == 2.0 && problem.reaction.is_zero();
                validate_bruteforce(problem, summary, |g| energy_of(&assembly, problem, g, exact), best.phi, true, exact)?;
            }
        }
    }
    Ok(())
}

fn energy_of(assembly: &KernelAssembly, problem: &Problem, g: &Field, exact: bool) -> Result<f64> {
    if exact {
        let u = p2_linear_oracle(assembly, g)?;
        energy_e(assembly, g, &problem.reaction, &u)
    } else {
        Ok(solve_dirichlet(assembly, g, &problem.reaction, &problem.dirichlet)?.energy)
    }
}

/// Compares the optimizer's value with the exhaustive optimum over the class.
fn validate_bruteforce(
    problem: &Problem,
    summary: &mut Map<String, Value>,
    value: impl Fn(&Field) -> Result<f64>,
    found: f64,
    maximize: bool,
    exact: bool,
) -> Result<()> {
    let count = problem.class.count();
    if count > BRUTE_FORCE_LIMIT {
        summary.insert(
            "validation_skipped".into(),
            json!(format!("class has {count} members, above the limit of {BRUTE_FORCE_LIMIT}")),
        );
        return Ok(());
    }
    let mut best = if maximize { f64::NEG_INFINITY } else { f64::INFINITY };
    for g in problem.class.enumerate(BRUTE_FORCE_LIMIT)? {
        let v = value(&g)?;
        best = if maximize { best.max(v) } else { best.min(v) };
    }
    let tol = if exact { 1e-9 } else { 1e-7 };
    summary.insert("bruteforce_optimum".into(), json!(best));
    summary.insert("bruteforce_members".into(), json!(count as u64));
    summary.insert("matches_bruteforce".into(), json!(rel(found, best) <= tol));
    Ok(())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn insert_trace_info(summary: &mut Map<String, Value>, t: &OptimizationTrace) {
    let best = t.best();
    summary.insert("terminated_by".into(), json!(t.terminated_by.as_str()));
    summary.insert("outer_iterations".into(), json!(best.k));
    summary.insert("iterations".into(), json!(best.solver_iterations));
    summary.insert("restart".into(), json!(t.restart));
    let failed: Vec<Value> = t.failed_restarts.iter().map(|(r, m)| json!({"restart": r, "error": m})).collect();
    summary.insert("failed_restarts".into(), Value::Array(failed));
}

fn write_trace(out: &Path, grid: &Grid, t: &OptimizationTrace) -> Result<()> {
    let mut buf = Vec::new();
    t.write_csv(&mut buf)?;
    fs::write(out.join("trace.csv"), buf)?;
    write_field(&out.join("field_u.csv"), grid, &t.u)?;
    write_field(&out.join("field_g.csv"), grid, &t.best().g)
}

/// One row per cell: index, center coordinates, value.
pub fn field_csv(grid: &Grid, f: &Field) -> String {
    let mut s = String::from(if grid.dim() == 1 { "cell,x,value\n" } else { "cell,x,y,value\n" });
    for (i, v) in f.iter().enumerate() {
        s.push_str(&i.to_string());
        for c in grid.center(i) {
            s.push_str(&format!(",{c:?}"));
        }
        s.push_str(&format!(",{v:?}\n"));
    }
    s
}

fn write_field(path: &Path, grid: &Grid, f: &Field) -> Result<()> {
    write_text(path, &field_csv(grid, f))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    Ok(fs::write(path, text)?)
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    write_text(path, &text)
}

fn all_finite(v: &Value) -> bool {
    match v {
        Value::Number(n) => n.as_f64().is_some_and(f64::is_finite),
        Value::Array(a) => a.iter().all(all_finite),
        Value::Object(o) => o.values().all(all_finite),
        _ => true,
    }
}

/// Machine-readable description of an error.
pub fn error_json(e: &Error) -> Value {
    let mut obj = json!({"kind": e.kind(), "message": e.to_string()});
    match e {
        Error::Config(v) => obj["violations"] = json!(v),
        Error::NonConvergence { solver, iterations, residual, objective } => {
            obj["solver"] = json!(solver);
            obj["iterations"] = json!(iterations);
            obj["residual"] = finite_or_null(*residual);
            obj["objective"] = finite_or_null(*objective);
        }
        Error::EnumerationCap { count, cap } => {
            obj["count"] = json!(count.to_string());
            obj["cap"] = json!(cap.to_string());
        }
        _ => {}
    }
    obj
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}
