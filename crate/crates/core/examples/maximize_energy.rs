//! Maximizes the Dirichlet energy over rearrangements of a ramp weight.

use fraclap::dirichlet::{ReactionSpec, SolveOptions};
use fraclap::optimize::{maximize_energy, AlternatingOptions};
use fraclap::rearrange::is_comonotone;
use fraclap::{assemble, Grid, KernelSpec, RearrangementClass};

fn main() -> fraclap::Result<()> {
    let n = 48;
    let grid = Grid::new(1, &[(-1.0, 1.0)], &[n])?;
    let assembly = assemble(&grid, &KernelSpec::pure_fractional(3.0, 0.3, 1.0)?)?;
    let class = RearrangementClass::linear_ramp(n, 0.0, 1.0)?;
    let reaction = ReactionSpec::constant(n, 1.0, 2.0);

    let opts = AlternatingOptions { restarts: 3, seed: 5, ..Default::default() };
    let trace = maximize_energy(&assembly, &class, &reaction, &opts, &SolveOptions::default())?;
    for r in &trace.iterations {
        println!("k = {:2}  phi = {:.12}", r.k, r.phi);
    }
    let best = trace.best();
    println!("terminated by {}", trace.terminated_by.as_str());
    println!("optimal weight is comonotone with u: {}", is_comonotone(&best.g, &trace.u, 1e-9));
    let profile: Vec<String> = best.g.iter().map(|v| format!("{v:.2}")).collect();
    println!("g = [{}]", profile.join(" "));

    let mut csv = Vec::new();
    trace.write_csv(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    Ok(())
}
