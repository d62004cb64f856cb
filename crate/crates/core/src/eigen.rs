//! Principal eigenvalue of the weighted nonlocal p-Laplacian.
//!
//! `λ(g) = min_{u ≠ 0} Ê(u) / Σ g |u|^p μ`. The minimizer is sought over the
//! nonnegative cone by projected descent: a gradient step on the quotient, a
//! cell-wise absolute value (which never raises `Ê` and leaves the mass
//! unchanged) and a rescaling back to unit mass.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::{seminorm_grad, seminorm_p, weighted_mass, weighted_mass_grad};
use crate::error::{check_len, Error, Result};
use crate::field::Field;
use crate::kernel::KernelAssembly;

#[derive(Clone, Debug)]
pub struct EigenOptions {
    /// Relative decrease of the quotient below which the descent may stop.
    pub tol: f64,
    /// Bound on the relative Euler–Lagrange residual, see [`EigenResult::residual`].
    pub residual_tol: f64,
    pub max_iters: usize,
    /// Extra seeded random positive starting fields; the lowest quotient wins.
    pub multi_starts: usize,
    pub seed: u64,
    /// Replaces the default start (indicator of `{g > 0}`).
    pub initial: Option<Field>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            tol: 1e-10,
            residual_tol: 1e-8,
            max_iters: 50_000,
            multi_starts: 0,
            seed: 0,
            initial: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenResult {
    pub lambda: f64,
    /// Nonnegative eigenfunction with `Σ g u^p μ = 1`.
    pub u: Field,
    pub iterations: usize,
    /// `‖∇Ê(u) - λ ∇M(u)‖∞ / (λ ‖∇M(u)‖∞)` where `M` is the weighted mass.
    pub residual: f64,
    pub normalization_defect: f64,
}

fn check_weight(assembly: &KernelAssembly, g: &Field) -> Result<()> {
    check_len(assembly.len(), g.len())?;
    if g.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidWeight("weight must be finite and nonnegative".into()));
    }
    if g.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidWeight("weight vanishes identically".into()));
    }
    Ok(())
}

/// `Ê(u) / Σ g |u|^p μ`.
pub fn rayleigh(assembly: &KernelAssembly, g: &Field, u: &Field) -> Result<f64> {
    let mass = weighted_mass(assembly.grid(), g, u, assembly.p())?;
    if !(mass > 0.0) {
        return Err(Error::InvalidWeight("u vanishes on the support of g".into()));
    }
    Ok(seminorm_p(assembly, u)? / mass)
}

/// `F(g, u) = 2 Σ g |u|^p μ - Ê(u)^2`, whose supremum over nonnegative `u` is `1/λ(g)^2`.
pub fn f_functional(assembly: &KernelAssembly, g: &Field, u: &Field) -> Result<f64> {
    let mass = weighted_mass(assembly.grid(), g, u, assembly.p())?;
    let e = seminorm_p(assembly, u)?;
    Ok(2.0 * mass - e * e)
}

/// `u / λ^{2/p}`, the maximizer of `F(g, ·)`.
pub fn tilde_u(result: &EigenResult, p: f64) -> Field {
    result.u.scaled(result.lambda.powf(-2.0 / p))
}

pub fn principal_eigen(assembly: &KernelAssembly, g: &Field, opts: &EigenOptions) -> Result<EigenResult> {
    check_weight(assembly, g)?;
    let n = g.len();
    let mut starts = vec![match &opts.initial {
        Some(u0) => {
            check_len(n, u0.len())?;
            u0.clone()
        }
        None => g.iter().map(|&v| if v > 0.0 { 1.0 } else { 0.0 }).collect(),
    }];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.multi_starts {
        starts.push((0..n).map(|_| rng.gen_range(0.05..1.0)).collect());
    }

    let mut best: Option<EigenResult> = None;
    let mut first_err = None;
    for start in &starts {
        match descend(assembly, g, start, opts) {
            Ok(r) => {
                if best.as_ref().is_none_or(|b| r.lambda < b.lambda) {
                    best = Some(r);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_err.expect("at least one start"))
}

/// Single descent run from `start` (no multi-start).
pub fn principal_eigen_from(
    assembly: &KernelAssembly,
    g: &Field,
    start: &Field,
    opts: &EigenOptions,
) -> Result<EigenResult> {
    check_weight(assembly, g)?;
    check_len(g.len(), start.len())?;
    descend(assembly, g, start, opts)
}

struct Point {
    u: Field,
    lambda: f64,
    grad: Field,
    residual: f64,
}

fn evaluate(assembly: &KernelAssembly, g: &Field, u: Field) -> Result<Point> {
    let p = assembly.p();
    let lambda = seminorm_p(assembly, &u)?;
    let ge = seminorm_grad(assembly, &u)?;
    let gm = weighted_mass_grad(assembly.grid(), g, &u, p)?;
    let grad: Field = ge.iter().zip(gm.iter()).map(|(a, b)| a - lambda * b).collect();
    let residual = grad.max_abs() / (lambda * gm.max_abs());
    Ok(Point { u, lambda, grad, residual })
}

/// Rescales `u` to unit weighted mass; `None` when the mass vanishes.
fn normalized(assembly: &KernelAssembly, g: &Field, u: Field) -> Result<Option<Field>> {
    let mass = weighted_mass(assembly.grid(), g, &u, assembly.p())?;
    if !(mass > 0.0) || !mass.is_finite() {
        return Ok(None);
    }
    Ok(Some(u.scaled(mass.powf(-1.0 / assembly.p()))))
}

fn descend(assembly: &KernelAssembly, g: &Field, start: &Field, opts: &EigenOptions) -> Result<EigenResult> {
    let Some(u0) = normalized(assembly, g, start.abs())? else {
        return Err(Error::InvalidWeight("starting field vanishes on the support of g".into()));
    };
    let mut cur = evaluate(assembly, g, u0)?;
    let mut step = 1.0;
    let mut rel_decrease = f64::INFINITY;

    for it in 0..opts.max_iters {
        if cur.residual <= opts.residual_tol && rel_decrease <= opts.tol {
            return Ok(finish(assembly, g, cur, it));
        }
        let gg = cur.grad.dot(&cur.grad);
        let mut t = step;
        let next = loop {
            let trial: Field = cur.u.iter().zip(cur.grad.iter()).map(|(u, r)| (u - t * r).abs()).collect();
            if let Some(v) = normalized(assembly, g, trial)? {
                let lv = seminorm_p(assembly, &v)?;
                if lv <= cur.lambda - 1e-4 * t * gg {
                    break Some(evaluate(assembly, g, v)?);
                }
                // Once λ is flat to rounding it cannot rank trial points, so a
                // shrinking gradient decides instead.
                if lv <= cur.lambda * (1.0 + 1e-14) {
                    let pt = evaluate(assembly, g, v)?;
                    if pt.grad.dot(&pt.grad) < gg {
                        break Some(pt);
                    }
                }
            }
            t *= 0.5;
            if t * cur.grad.max_abs() <= 1e-18 * cur.u.max_abs() {
                break None;
            }
        };
        let Some(new) = next else {
            if cur.residual <= opts.residual_tol {
                return Ok(finish(assembly, g, cur, it));
            }
            return Err(Error::NonConvergence {
                solver: "principal_eigen",
                iterations: it,
                residual: cur.residual,
                objective: cur.lambda,
            });
        };
        let s: Field = new.u.iter().zip(cur.u.iter()).map(|(a, b)| a - b).collect();
        let y: Field = new.grad.iter().zip(cur.grad.iter()).map(|(a, b)| a - b).collect();
        let sy = s.dot(&y);
        step = if sy > 0.0 { s.dot(&s) / sy } else { 2.0 * t };
        rel_decrease = (cur.lambda - new.lambda).abs() / new.lambda;
        cur = new;
    }
    if cur.residual <= opts.residual_tol && rel_decrease <= opts.tol {
        return Ok(finish(assembly, g, cur, opts.max_iters));
    }
    Err(Error::NonConvergence {
        solver: "principal_eigen",
        iterations: opts.max_iters,
        residual: cur.residual,
        objective: cur.lambda,
    })
}

fn finish(assembly: &KernelAssembly, g: &Field, pt: Point, iterations: usize) -> EigenResult {
    let mass = weighted_mass(assembly.grid(), g, &pt.u, assembly.p()).unwrap_or(f64::NAN);
    EigenResult {
        lambda: pt.lambda,
        u: pt.u,
        iterations,
        residual: pt.residual,
        normalization_defect: (mass - 1.0).abs(),
    }
}

/// Matrix `A` with `Ê(u) = uᵀ A u` at `p = 2`: `A_ii = 2(Σ_j W_ij + κ_i)`, `A_ij = -2 W_ij`.
pub fn p2_matrix(assembly: &KernelAssembly) -> DMatrix<f64> {
    let n = assembly.len();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        let row = assembly.w_row(i);
        let mut diag = assembly.kappa()[i];
        for j in 0..n {
            if j != i {
                a[(i, j)] = -2.0 * row[j];
                diag += row[j];
            }
        }
        a[(i, i)] = 2.0 * diag;
    }
    a
}

/// Smallest generalized eigenvalue of `(A, diag(g μ))` by a dense symmetric
/// eigensolve. Cells outside the support of `g` are eliminated through the
/// Schur complement. Only valid at `p = 2`.
pub fn p2_oracle(assembly: &KernelAssembly, g: &Field) -> Result<f64> {
    if assembly.p() != 2.0 {
        return Err(Error::InvalidKernel(format!("p2_oracle needs p = 2, got {}", assembly.p())));
    }
    check_weight(assembly, g)?;
    let a = p2_matrix(assembly);
    let support: Vec<usize> = (0..g.len()).filter(|&i| g[i] > 0.0).collect();
    let rest: Vec<usize> = (0..g.len()).filter(|&i| g[i] == 0.0).collect();
    let pick = |rows: &[usize], cols: &[usize]| DMatrix::from_fn(rows.len(), cols.len(), |r, c| a[(rows[r], cols[c])]);
    let mut schur = pick(&support, &support);
    if !rest.is_empty() {
        let ann = pick(&rest, &rest);
        let ans = pick(&rest, &support);
        let chol = ann
            .cholesky()
            .ok_or_else(|| Error::InvalidKernel("operator block is not positive definite".into()))?;
        let x = chol.solve(&ans);
        schur -= ans.transpose() * x;
    }
    let mu = assembly.grid().cell_measure();
    let scale: Vec<f64> = support.iter().map(|&i| 1.0 / (g[i] * mu).sqrt()).collect();
    let k = support.len();
    let b = DMatrix::from_fn(k, k, |r, c| {
        let v = scale[r] * schur[(r, c)] * scale[c];
        if r == c { v } else { 0.5 * (v + scale[c] * schur[(c, r)] * scale[r]) }
    });
    let eig = SymmetricEigen::new(b);
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}
