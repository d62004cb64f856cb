//! Nonlinear Dirichlet problem `L_K u + h(x, u) = g` with `u = 0` off the domain.
//!
//! The solution is the unique maximizer of the concave energy
//! `E(g, u) = Σ [g_i u_i - H(x_i, u_i)] μ - Ê(u)/p`, computed here by
//! minimizing `J = -E`.

use nalgebra::DVector;

use crate::eigen::p2_matrix;
use crate::energy::{seminorm_grad, seminorm_p};
use crate::error::{check_len, Error, Result};
use crate::field::Field;
use crate::kernel::KernelAssembly;

/// Reaction `h(x, t) = c(x) (t₊)^{q-1}` with primitive `H(x, t) = c(x) (t₊)^q / q`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReactionSpec {
    pub c: Field,
    /// Ignored when `c ≡ 0`.
    pub q: f64,
}

impl ReactionSpec {
    pub fn new(c: Field, q: f64) -> Self {
        ReactionSpec { c, q }
    }

    pub fn constant(n: usize, c: f64, q: f64) -> Self {
        ReactionSpec { c: Field::constant(n, c), q }
    }

    /// `h ≡ 0`.
    pub fn zero(n: usize) -> Self {
        ReactionSpec { c: Field::zeros(n), q: f64::NAN }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&c| c == 0.0)
    }

    /// Growth constant `C0 = max c_i`.
    pub fn c0(&self) -> f64 {
        self.c.iter().copied().fold(0.0, f64::max)
    }

    pub fn validate(&self, n: usize, p: f64) -> Result<()> {
        check_len(n, self.c.len())?;
        if self.c.iter().any(|&c| !(c >= 0.0) || !c.is_finite()) {
            return Err(Error::InvalidReaction("coefficient c must be finite and nonnegative".into()));
        }
        if !self.is_zero() && !(self.q > 1.0 && self.q < p) {
            return Err(Error::InvalidReaction(format!("exponent q = {} must lie in (1, p) with p = {p}", self.q)));
        }
        Ok(())
    }

    pub fn h(&self, i: usize, t: f64) -> f64 {
        let c = self.c[i];
        if c == 0.0 || t <= 0.0 {
            0.0
        } else {
            c * t.powf(self.q - 1.0)
        }
    }

    #[allow(non_snake_case)]
    pub fn H(&self, i: usize, t: f64) -> f64 {
        let c = self.c[i];
        if c == 0.0 || t <= 0.0 {
            0.0
        } else {
            c * t.powf(self.q) / self.q
        }
    }
}

fn check_inputs(assembly: &KernelAssembly, g: &Field, reaction: &ReactionSpec, u: &Field) -> Result<()> {
    let n = assembly.len();
    check_len(n, g.len())?;
    check_len(n, u.len())?;
    reaction.validate(n, assembly.p())
}

/// `E(g, u) = Σ [g_i u_i - H(x_i, u_i)] μ - Ê(u)/p`.
pub fn energy_e(assembly: &KernelAssembly, g: &Field, reaction: &ReactionSpec, u: &Field) -> Result<f64> {
    check_inputs(assembly, g, reaction, u)?;
    let mu = assembly.grid().cell_measure();
    let local: f64 = (0..u.len()).map(|i| g[i] * u[i] - reaction.H(i, u[i])).sum();
    Ok(local * mu - seminorm_p(assembly, u)? / assembly.p())
}

/// `J(u) = -E(g, u)`.
pub fn objective_j(assembly: &KernelAssembly, g: &Field, reaction: &ReactionSpec, u: &Field) -> Result<f64> {
    Ok(-energy_e(assembly, g, reaction, u)?)
}

/// `∇J(u) = ∇Ê(u)/p + (h(x_i, u_i) - g_i) μ`.
pub fn grad_j(assembly: &KernelAssembly, g: &Field, reaction: &ReactionSpec, u: &Field) -> Result<Field> {
    check_inputs(assembly, g, reaction, u)?;
    let mu = assembly.grid().cell_measure();
    let p = assembly.p();
    let ge = seminorm_grad(assembly, u)?;
    Ok((0..u.len()).map(|i| ge[i] / p + (reaction.h(i, u[i]) - g[i]) * mu).collect())
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Bound on `‖∇J(u)‖∞`.
    pub tol: f64,
    pub max_iters: usize,
    /// Starting field; zero when absent.
    pub initial: Option<Field>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-9, max_iters: 50_000, initial: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub u: Field,
    /// `E(g, u)`.
    pub energy: f64,
    /// `‖∇J(u)‖∞`.
    pub residual: f64,
    pub iterations: usize,
}

/// Gradient descent on `J` with Barzilai–Borwein steps under an Armijo safeguard.
pub fn solve_dirichlet(
    assembly: &KernelAssembly,
    g: &Field,
    reaction: &ReactionSpec,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    let n = assembly.len();
    let mut u = match &opts.initial {
        Some(u0) => u0.clone(),
        None => Field::zeros(n),
    };
    check_inputs(assembly, g, reaction, &u)?;
    if g.iter().any(|&v| !v.is_finite()) || !u.is_finite() {
        return Err(Error::InvalidWeight("data must be finite".into()));
    }
    let mu = assembly.grid().cell_measure();
    // scale of the terms in J, for the rounding allowance of the line search
    let magnitude = |u: &Field, j: f64| j.abs() + g.iter().zip(u.iter()).map(|(a, b)| (a * b).abs()).sum::<f64>() * mu;

    let mut j = objective_j(assembly, g, reaction, &u)?;
    let mut grad = grad_j(assembly, g, reaction, &u)?;
    let mut step = 1.0;
    for it in 0..opts.max_iters {
        let residual = grad.max_abs();
        if residual <= opts.tol {
            return Ok(SolveResult { energy: -j, u, residual, iterations: it });
        }
        let gg = grad.dot(&grad);
        let slack = 1e-14 * magnitude(&u, j);
        let mut t = step;
        let accepted = loop {
            let trial: Field = u.iter().zip(grad.iter()).map(|(a, b)| a - t * b).collect();
            let jt = objective_j(assembly, g, reaction, &trial)?;
            if jt <= j - 1e-4 * t * gg {
                let gt = grad_j(assembly, g, reaction, &trial)?;
                break Some((trial, jt, gt));
            }
            // within rounding of J only a shrinking gradient counts as progress
            if jt <= j + slack {
                let gt = grad_j(assembly, g, reaction, &trial)?;
                if gt.dot(&gt) < gg {
                    break Some((trial, jt, gt));
                }
            }
            t *= 0.5;
            if t * residual <= 1e-18 * (1.0 + u.max_abs()) {
                break None;
            }
        };
        let Some((v, jv, gv)) = accepted else {
            return Err(Error::NonConvergence { solver: "solve_dirichlet", iterations: it, residual, objective: -j });
        };
        let s: Field = v.iter().zip(u.iter()).map(|(a, b)| a - b).collect();
        let y: Field = gv.iter().zip(grad.iter()).map(|(a, b)| a - b).collect();
        let sy = s.dot(&y);
        step = if sy > 0.0 { s.dot(&s) / sy } else { 2.0 * t };
        u = v;
        j = jv;
        grad = gv;
    }
    let residual = grad.max_abs();
    if residual <= opts.tol {
        return Ok(SolveResult { energy: -j, u, residual, iterations: opts.max_iters });
    }
    Err(Error::NonConvergence { solver: "solve_dirichlet", iterations: opts.max_iters, residual, objective: -j })
}

/// Exact maximizer for `p = 2` and `h ≡ 0`: solves `A u = μ g` densely.
pub fn p2_linear_oracle(assembly: &KernelAssembly, g: &Field) -> Result<Field> {
    if assembly.p() != 2.0 {
        return Err(Error::InvalidKernel(format!("linear oracle needs p = 2, got {}", assembly.p())));
    }
    check_len(assembly.len(), g.len())?;
    let a = p2_matrix(assembly);
    let mu = assembly.grid().cell_measure();
    let rhs = DVector::from_iterator(g.len(), g.iter().map(|v| v * mu));
    let chol = a
        .cholesky()
        .ok_or_else(|| Error::InvalidKernel("operator matrix is not positive definite".into()))?;
    Ok(chol.solve(&rhs).iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::kernel::{assemble, KernelSpec};

    fn setup(n: usize, p: f64, s: f64) -> KernelAssembly {
        let grid = Grid::new(1, &[(0.0, 1.0)], &[n]).unwrap();
        assemble(&grid, &KernelSpec::pure_fractional(p, s, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn zero_field_has_zero_energy() {
        let a = setup(8, 3.0, 0.3);
        let r = ReactionSpec::constant(8, 2.0, 2.0);
        let g = Field::constant(8, 1.0);
        assert_eq!(energy_e(&a, &g, &r, &Field::zeros(8)).unwrap(), 0.0);
    }

    #[test]
    fn energy_is_affine_in_g() {
        let a = setup(8, 3.0, 0.3);
        let r = ReactionSpec::constant(8, 1.0, 2.0);
        let u: Field = (0..8).map(|i| (i as f64 * 0.7).sin().abs()).collect();
        let g1: Field = (0..8).map(|i| (i % 2) as f64).collect();
        let g2: Field = (0..8).map(|i| (i % 3) as f64).collect();
        let tau = 0.3;
        let lhs = energy_e(&a, &g1.lerp(&g2, tau), &r, &u).unwrap();
        let rhs = (1.0 - tau) * energy_e(&a, &g1, &r, &u).unwrap() + tau * energy_e(&a, &g2, &r, &u).unwrap();
        assert!((lhs - rhs).abs() <= 1e-14 * (1.0 + lhs.abs()));
    }

    #[test]
    fn reaction_family() {
        let r = ReactionSpec::constant(2, 3.0, 1.5);
        assert_eq!(r.h(0, -1.0), 0.0);
        assert_eq!(r.H(0, 0.0), 0.0);
        assert!((r.h(0, 4.0) - 6.0).abs() < 1e-15);
        assert!((r.H(0, 4.0) - 16.0).abs() < 1e-13);
        assert_eq!(r.c0(), 3.0);
        assert!(r.validate(2, 2.0).is_ok());
        assert!(r.validate(2, 1.4).is_err());
        assert!(ReactionSpec::constant(2, -1.0, 1.5).validate(2, 2.0).is_err());
        assert!(ReactionSpec::zero(2).validate(2, 1.2).is_ok());
        assert!(r.validate(3, 2.0).is_err());
    }

    #[test]
    fn zero_data_gives_zero_solution() {
        let a = setup(16, 3.0, 0.3);
        let r = ReactionSpec::zero(16);
        let res = solve_dirichlet(&a, &Field::zeros(16), &r, &SolveOptions::default()).unwrap();
        assert_eq!(res.u.max_abs(), 0.0);
        assert_eq!(res.energy, 0.0);
    }

    #[test]
    fn p2_matches_linear_solve() {
        let a = setup(32, 2.0, 0.4);
        let g: Field = (0..32).map(|i| if i % 3 == 0 { 1.0 } else { 0.25 }).collect();
        let r = ReactionSpec::zero(32);
        let opts = SolveOptions { tol: 1e-12, ..Default::default() };
        let res = solve_dirichlet(&a, &g, &r, &opts).unwrap();
        let exact = p2_linear_oracle(&a, &g).unwrap();
        assert!(res.u.sup_distance(&exact) < 1e-9);
        assert!(res.u.min() > 0.0);
        let e = energy_e(&a, &g, &r, &res.u).unwrap();
        assert!((e - res.energy).abs() <= 1e-12 * e.abs());
    }

    #[test]
    fn nonlinear_solution_is_stationary_and_positive() {
        let a = setup(24, 3.0, 0.3);
        let r = ReactionSpec::constant(24, 0.5, 2.0);
        let g: Field = (0..24).map(|i| if (6..12).contains(&i) { 1.0 } else { 0.0 }).collect();
        let res = solve_dirichlet(&a, &g, &r, &SolveOptions::default()).unwrap();
        assert!(res.residual <= 1e-9);
        assert!(res.u.min() > 0.0);
        let gr = grad_j(&a, &g, &r, &res.u).unwrap();
        assert!(gr.max_abs() <= 1e-9);
    }

    #[test]
    fn non_convergence_is_reported() {
        let a = setup(32, 3.0, 0.3);
        let opts = SolveOptions { max_iters: 2, ..Default::default() };
        let err = solve_dirichlet(&a, &Field::constant(32, 1.0), &ReactionSpec::zero(32), &opts).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { .. }));
    }
}
