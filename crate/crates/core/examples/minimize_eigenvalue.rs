//! Minimizes the principal eigenvalue over all rearrangements of a quarter-mass
//! indicator on a 1D grid, then checks the structure of the optimal weight.

use fraclap::eigen::EigenOptions;
use fraclap::optimize::{minimize_eigenvalue, AlternatingOptions};
use fraclap::rearrange::is_comonotone;
use fraclap::{assemble, Grid, KernelSpec, RearrangementClass};

fn main() -> fraclap::Result<()> {
    let n = 128;
    let grid = Grid::new(1, &[(0.0, 1.0)], &[n])?;
    let class = RearrangementClass::binary(n, 0.25)?;

    for (p, s) in [(2.0, 0.4), (3.0, 0.3)] {
        let start = std::time::Instant::now();
        let assembly = assemble(&grid, &KernelSpec::pure_fractional(p, s, 1.0)?)?;
        let opts = AlternatingOptions { seed: 2024, ..Default::default() };
        let trace = minimize_eigenvalue(&assembly, &class, &opts, &EigenOptions::default())?;

        println!("p = {p}, s = {s}: run {} of {}", trace.restart, opts.restarts + 1);
        for r in &trace.iterations {
            println!(
                "  k = {:2}  lambda = {:.12}  eigen iterations = {}",
                r.k,
                r.lambda.unwrap_or(f64::NAN),
                r.solver_iterations
            );
        }
        let best = trace.best();
        let w: Vec<f64> = trace.w.iter().map(|v| v / 2.0).collect();
        let support: Vec<usize> = (0..n).filter(|&i| best.g[i] > 0.0).collect();
        let on_boundary = grid.boundary_adjacent().iter().zip(best.g.iter()).any(|(&b, &g)| b && g > 0.0);
        println!("  terminated by {}", trace.terminated_by.as_str());
        println!("  support: cells {}..={}", support[0], support[support.len() - 1]);
        println!("  comonotone with u^p: {}", is_comonotone(&best.g, &w.into(), 1e-9));
        println!("  touches boundary cells: {on_boundary}");
        println!("  time: {:.2?}", start.elapsed());
    }
    Ok(())
}
