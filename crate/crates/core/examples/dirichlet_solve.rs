//! Solves the nonlinear Dirichlet problem with an absorption term and checks
//! the p = 2 linear case against a dense solve.

use fraclap::dirichlet::{energy_e, p2_linear_oracle, solve_dirichlet, ReactionSpec, SolveOptions};
use fraclap::{assemble, Field, Grid, KernelSpec};

fn main() -> fraclap::Result<()> {
    let n = 64;
    let grid = Grid::new(1, &[(0.0, 1.0)], &[n])?;
    let g: Field = (0..n).map(|i| if (16..32).contains(&i) { 1.0 } else { 0.2 }).collect();

    let linear = assemble(&grid, &KernelSpec::pure_fractional(2.0, 0.4, 1.0)?)?;
    let zero = ReactionSpec::zero(n);
    let r = solve_dirichlet(&linear, &g, &zero, &SolveOptions { tol: 1e-12, ..Default::default() })?;
    let exact = p2_linear_oracle(&linear, &g)?;
    println!(
        "p = 2, h = 0: energy {:.12}, {} iterations, sup distance to dense solve {:.1e}",
        r.energy,
        r.iterations,
        r.u.sup_distance(&exact)
    );

    let nonlinear = assemble(&grid, &KernelSpec::pure_fractional(3.0, 0.3, 1.0)?)?;
    let reaction = ReactionSpec::constant(n, 2.0, 2.0);
    let from_zero = solve_dirichlet(&nonlinear, &g, &reaction, &SolveOptions::default())?;
    let start: Field = (0..n).map(|i| ((i * 7919) % 13) as f64 / 13.0).collect();
    let from_noise = solve_dirichlet(
        &nonlinear,
        &g,
        &reaction,
        &SolveOptions { initial: Some(start), ..Default::default() },
    )?;
    println!(
        "p = 3, h = 2 u_+: energy {:.12}, residual {:.1e}, starts agree to {:.1e}",
        from_zero.energy,
        from_zero.residual,
        from_zero.u.sup_distance(&from_noise.u)
    );
    println!("recomputed energy: {:.12}", energy_e(&nonlinear, &g, &reaction, &from_zero.u)?);
    println!("min u = {:.4e}, max u = {:.4e}", from_zero.u.min(), from_zero.u.max_abs());
    Ok(())
}
