//! Discrete nonlocal p-energy and its exact gradient.
//!
//! `Ê(u) = Σ_{i≠j} |u_i - u_j|^p W_ij + 2 Σ_i |u_i|^p κ_i`, which is the
//! piecewise-constant restriction of the double integral over `R^N x R^N` with
//! `u = 0` outside the domain.

use crate::error::{check_len, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::kernel::KernelAssembly;

/// `|t|^p`, with the common integer exponents spelled out.
#[inline]
pub(crate) fn abs_pow(t: f64, p: f64) -> f64 {
    if p == 2.0 {
        t * t
    } else if p == 3.0 {
        t * t * t.abs()
    } else {
        t.abs().powf(p)
    }
}

/// `|t|^{p-2} t`, taken as zero at `t = 0`.
#[inline]
pub(crate) fn signed_pow(t: f64, p: f64) -> f64 {
    if p == 2.0 {
        t
    } else if p == 3.0 {
        t * t.abs()
    } else if t == 0.0 {
        0.0
    } else {
        t.signum() * t.abs().powf(p - 1.0)
    }
}

pub fn seminorm_p(assembly: &KernelAssembly, u: &Field) -> Result<f64> {
    let n = assembly.len();
    check_len(n, u.len())?;
    let p = assembly.p();
    let kappa = assembly.kappa();
    let mut pairs = 0.0;
    let mut exterior = 0.0;
    for i in 0..n {
        let row = assembly.w_row(i);
        let ui = u[i];
        let mut acc = 0.0;
        for j in (i + 1)..n {
            acc += abs_pow(ui - u[j], p) * row[j];
        }
        pairs += acc;
        exterior += abs_pow(ui, p) * kappa[i];
    }
    Ok(2.0 * pairs + 2.0 * exterior)
}

/// Exact gradient of [`seminorm_p`].
pub fn seminorm_grad(assembly: &KernelAssembly, u: &Field) -> Result<Field> {
    let n = assembly.len();
    check_len(n, u.len())?;
    let p = assembly.p();
    let kappa = assembly.kappa();
    let scale = 2.0 * p;
    let mut grad = vec![0.0; n];
    for i in 0..n {
        let row = assembly.w_row(i);
        let ui = u[i];
        let mut acc = 0.0;
        for j in (i + 1)..n {
            let t = signed_pow(ui - u[j], p) * row[j];
            acc += t;
            grad[j] -= t;
        }
        grad[i] += acc + signed_pow(ui, p) * kappa[i];
    }
    for g in &mut grad {
        *g *= scale;
    }
    Ok(Field::new(grad))
}

/// `Σ_i g_i |u_i|^p μ`.
pub fn weighted_mass(grid: &Grid, g: &Field, u: &Field, p: f64) -> Result<f64> {
    check_len(grid.len(), g.len())?;
    check_len(grid.len(), u.len())?;
    Ok(g.iter().zip(u.iter()).map(|(gi, ui)| gi * abs_pow(*ui, p)).sum::<f64>() * grid.cell_measure())
}

/// Gradient of [`weighted_mass`] in `u`: `p g_i |u_i|^{p-2} u_i μ`.
pub fn weighted_mass_grad(grid: &Grid, g: &Field, u: &Field, p: f64) -> Result<Field> {
    check_len(grid.len(), g.len())?;
    check_len(grid.len(), u.len())?;
    let mu = grid.cell_measure();
    Ok(g.iter().zip(u.iter()).map(|(gi, ui)| p * gi * signed_pow(*ui, p) * mu).collect())
}
