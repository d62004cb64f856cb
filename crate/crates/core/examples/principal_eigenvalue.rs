//! Principal eigenvalue for a few weights, with the dense check at p = 2 and
//! multi-start agreement at p = 3.

use fraclap::eigen::{f_functional, p2_oracle, principal_eigen, tilde_u, EigenOptions};
use fraclap::{assemble, Field, Grid, KernelSpec};

fn main() -> fraclap::Result<()> {
    let n = 64;
    let grid = Grid::new(1, &[(0.0, 1.0)], &[n])?;
    let ones = Field::constant(n, 1.0);
    let middle: Field = (0..n).map(|i| if (24..40).contains(&i) { 1.0 } else { 0.0 }).collect();

    let quad = assemble(&grid, &KernelSpec::pure_fractional(2.0, 0.4, 1.0)?)?;
    for (name, g) in [("g = 1", &ones), ("middle quarter", &middle)] {
        let r = principal_eigen(&quad, g, &EigenOptions::default())?;
        let dense = p2_oracle(&quad, g)?;
        println!(
            "p = 2, {name}: lambda = {:.12} (dense {:.12}), {} iterations, residual {:.1e}",
            r.lambda, dense, r.iterations, r.residual
        );
    }

    let cubic = assemble(&grid, &KernelSpec::pure_fractional(3.0, 0.3, 1.0)?)?;
    let single = principal_eigen(&cubic, &middle, &EigenOptions::default())?;
    let multi = principal_eigen(&cubic, &middle, &EigenOptions { multi_starts: 4, seed: 1, ..Default::default() })?;
    println!("p = 3: lambda = {:.12}, with 4 extra random starts {:.12}", single.lambda, multi.lambda);

    // sup_u F(g, u) = 1/lambda^2 is attained at u / lambda^{2/p}
    let ut = tilde_u(&single, 3.0);
    let f = f_functional(&cubic, &middle, &ut)?;
    println!("F(g, u~) = {:.12}, 1/lambda^2 = {:.12}", f, 1.0 / (single.lambda * single.lambda));
    println!("smallest eigenfunction value: {:.3e}", single.u.min());
    Ok(())
}
