//! Built-in oracle and property checks on small instances, run by `fraclap validate`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dirichlet::{energy_e, grad_j, objective_j, p2_linear_oracle, solve_dirichlet, ReactionSpec, SolveOptions};
use crate::eigen::{p2_oracle, principal_eigen, EigenOptions};
use crate::energy::{seminorm_grad, seminorm_p};
use crate::error::Result;
use crate::field::Field;
use crate::grid::Grid;
use crate::kernel::{assemble, KernelAssembly, KernelSpec, Modulation};
use crate::optimize::{maximize_energy, minimize_eigenvalue, phi_eigen, AlternatingOptions};
use crate::rearrange::{RearrangementClass, DEFAULT_ENUMERATION_CAP};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    /// Measured error (or margin, for positivity) of the check.
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn below(name: &str, value: f64, tolerance: f64) -> CheckOutcome {
    CheckOutcome { name: name.into(), value, tolerance, passed: value <= tolerance }
}

fn above(name: &str, value: f64, tolerance: f64) -> CheckOutcome {
    CheckOutcome { name: name.into(), value, tolerance, passed: value > tolerance }
}

fn line(n: usize, p: f64, s: f64) -> Result<KernelAssembly> {
    let grid = Grid::new(1, &[(0.0, 1.0)], &[n])?;
    assemble(&grid, &KernelSpec::pure_fractional(p, s, 1.0)?)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Largest componentwise deviation of `grad` from central differences of `f`,
/// relative to `‖grad‖∞`.
pub(crate) fn fd_gradient_error(f: impl Fn(&Field) -> f64, u: &Field, grad: &Field) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..u.len() {
        let h = 1e-5 * u[i].abs().max(1.0);
        let mut up = u.clone();
        let mut dn = u.clone();
        up[i] += h;
        dn[i] -= h;
        let fd = (f(&up) - f(&dn)) / (2.0 * h);
        worst = worst.max((fd - grad[i]).abs());
    }
    worst / grad.max_abs()
}

/// Runs every check; the outcome depends only on `seed`.
pub fn run_suite(seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    // closed-form assembly against the generic cubature path
    let mut worst: f64 = 0.0;
    for (p, s) in [(2.0, 0.4), (3.0, 0.3)] {
        let grid = Grid::new(1, &[(0.0, 1.0)], &[8])?;
        let exact = assemble(&grid, &KernelSpec::pure_fractional(p, s, 1.0)?)?;
        let generic = assemble(&grid, &KernelSpec::modulated(p, s, 1.0, 1.0, Modulation::Constant(1.0))?)?;
        for (a, b) in exact.w_matrix().iter().zip(generic.w_matrix()).chain(exact.kappa().iter().zip(generic.kappa())) {
            if *a != 0.0 {
                worst = worst.max(rel(*b, *a));
            }
        }
    }
    checks.push(below("kernel_closed_form_vs_cubature", worst, 1e-9));

    let a3 = line(16, 3.0, 0.3)?;
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let u: Field = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let grad = seminorm_grad(&a3, &u)?;
        worst = worst.max(fd_gradient_error(|v| seminorm_p(&a3, v).expect("sizes match"), &u, &grad));
    }
    checks.push(below("seminorm_gradient_fd", worst, 1e-6));

    let reaction = ReactionSpec::constant(16, 1.0, 2.0);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let g: Field = (0..16).map(|_| rng.gen_range(0.0..1.0)).collect();
        let u: Field = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let grad = grad_j(&a3, &g, &reaction, &u)?;
        worst = worst.max(fd_gradient_error(
            |v| objective_j(&a3, &g, &reaction, v).expect("sizes match"),
            &u,
            &grad,
        ));
    }
    checks.push(below("dirichlet_gradient_fd", worst, 1e-6));

    let a2 = line(16, 2.0, 0.4)?;
    let class16 = RearrangementClass::binary(16, 0.25)?;
    let eig = EigenOptions::default();
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let g = class16.random_member(&mut rng);
        worst = worst.max(rel(principal_eigen(&a2, &g, &eig)?.lambda, p2_oracle(&a2, &g)?));
    }
    checks.push(below("eigen_vs_dense_oracle", worst, 1e-8));

    let g = class16.random_member(&mut rng);
    let base = principal_eigen(&a3, &g, &eig)?.lambda;
    let mut worst: f64 = 0.0;
    for c in [0.5, 2.0, 10.0] {
        worst = worst.max(rel(c * principal_eigen(&a3, &g.scaled(c), &eig)?.lambda, base));
    }
    checks.push(below("eigen_homogeneity", worst, 1e-9));

    let a8 = line(8, 2.0, 0.4)?;
    let class8 = RearrangementClass::binary(8, 0.5)?;
    let alt = AlternatingOptions { seed: rng.gen(), ..Default::default() };
    let members: Vec<Field> = class8.enumerate(DEFAULT_ENUMERATION_CAP)?.collect();
    let trace = minimize_eigenvalue(&a8, &class8, &alt, &eig)?;
    let mut best = f64::INFINITY;
    for m in &members {
        best = best.min(p2_oracle(&a8, m)?);
    }
    checks.push(below("eig_min_bruteforce", rel(trace.best().lambda.expect("eigen trace"), best), 1e-9));

    let zero = ReactionSpec::zero(8);
    let solve = SolveOptions { tol: 1e-12, ..Default::default() };
    let trace = maximize_energy(&a8, &class8, &zero, &alt, &solve)?;
    let mut best = f64::NEG_INFINITY;
    for m in &members {
        best = best.max(energy_e(&a8, m, &zero, &p2_linear_oracle(&a8, m)?)?);
    }
    checks.push(below("energy_max_bruteforce", rel(trace.best().phi, best), 1e-9));

    let g = class16.random_member(&mut rng);
    let u_eig = principal_eigen(&a3, &g, &eig)?.u;
    let r = ReactionSpec::constant(16, 0.5, 2.0);
    let u_dir = solve_dirichlet(&a3, &g, &r, &SolveOptions::default())?.u;
    checks.push(above("positivity_min_value", u_eig.min().min(u_dir.min()), 0.0));

    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let g1 = class16.random_member(&mut rng);
        let g2 = class16.random_member(&mut rng);
        let (f1, f2) = (phi_eigen(&a2, &g1, &eig)?, phi_eigen(&a2, &g2, &eig)?);
        for tau in [0.25, 0.5, 0.75] {
            let mid = phi_eigen(&a2, &g1.lerp(&g2, tau), &eig)?;
            worst = worst.max(mid - ((1.0 - tau) * f1 + tau * f2));
        }
    }
    checks.push(below("phi_convexity_violation", worst, 1e-10));

    Ok(SuiteReport { seed, checks })
}
