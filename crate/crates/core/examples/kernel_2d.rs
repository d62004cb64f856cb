//! Assembles the kernel on an 8x8 square grid and compares the iterative
//! principal eigenvalue with a dense solve.

use fraclap::eigen::{p2_oracle, principal_eigen, EigenOptions};
use fraclap::kernel::Modulation;
use fraclap::{assemble, Field, Grid, KernelSpec};

fn main() -> fraclap::Result<()> {
    let grid = Grid::new(2, &[(0.0, 1.0), (0.0, 1.0)], &[8, 8])?;

    let start = std::time::Instant::now();
    let assembly = assemble(&grid, &KernelSpec::pure_fractional(2.0, 0.4, 1.0)?)?;
    println!("pure fractional assembly: {:.2?}", start.elapsed());

    let row = 4;
    let kappa_row: Vec<String> = (0..8)
        .map(|ix| format!("{:.5}", assembly.kappa()[grid.linear_index(ix, row)]))
        .collect();
    println!("kappa along row {row}: {}", kappa_row.join(" "));

    let g = Field::constant(grid.len(), 1.0);
    let r = principal_eigen(&assembly, &g, &EigenOptions::default())?;
    let dense = p2_oracle(&assembly, &g)?;
    println!("lambda = {:.12}, dense = {:.12}, rel diff = {:.2e}", r.lambda, dense, (r.lambda - dense).abs() / dense);
    println!("min eigenfunction value = {:.6}", r.u.min());

    let start = std::time::Instant::now();
    let spec = KernelSpec::modulated(2.0, 0.4, 0.5, 1.5, Modulation::checkerboard(2, &grid))?;
    let modulated = assemble(&grid, &spec)?;
    println!("checkerboard assembly: {:.2?}", start.elapsed());
    let lam = principal_eigen(&modulated, &g, &EigenOptions::default())?.lambda;
    println!("checkerboard lambda = {:.12}, dense = {:.12}", lam, p2_oracle(&modulated, &g)?);
    Ok(())
}
