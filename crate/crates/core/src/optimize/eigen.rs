use crate::eigen::{principal_eigen, tilde_u, EigenOptions, EigenResult};
use crate::error::Result;
use crate::field::Field;
use crate::kernel::KernelAssembly;
use crate::rearrange::RearrangementClass;

use super::{ascend, AlternatingOptions, OptimizationTrace, StateSolver};

/// `Φ(g) = 1/λ(g)^2` with derivative field `2 ũ_g^p`.
pub struct EigenObjective<'a> {
    pub assembly: &'a KernelAssembly,
    pub options: EigenOptions,
}

impl StateSolver for EigenObjective<'_> {
    type State = EigenResult;

    fn solve(&self, g: &Field, warm: Option<&EigenResult>) -> Result<EigenResult> {
        let mut opts = self.options.clone();
        if let Some(prev) = warm {
            opts.initial = Some(prev.u.clone());
        }
        principal_eigen(self.assembly, g, &opts)
    }

    fn phi(&self, state: &EigenResult) -> f64 {
        1.0 / (state.lambda * state.lambda)
    }

    fn derivative_field(&self, state: &EigenResult) -> Field {
        derivative_direction_eigen(state, self.assembly.p())
    }

    fn state_field(&self, state: &EigenResult) -> Field {
        state.u.clone()
    }

    fn lambda(&self, state: &EigenResult) -> Option<f64> {
        Some(state.lambda)
    }

    fn diagnostics(&self, state: &EigenResult) -> (usize, f64) {
        (state.iterations, state.residual)
    }
}

/// `1/λ(g)^2`.
pub fn phi_eigen(assembly: &KernelAssembly, g: &Field, opts: &EigenOptions) -> Result<f64> {
    let r = principal_eigen(assembly, g, opts)?;
    Ok(1.0 / (r.lambda * r.lambda))
}

/// `w = 2 ũ^p`, so that `⟨Φ'(g), h - g⟩ = Σ (h_i - g_i) w_i μ`.
pub fn derivative_direction_eigen(result: &EigenResult, p: f64) -> Field {
    tilde_u(result, p).iter().map(|v| 2.0 * v.abs().powf(p)).collect()
}

/// Minimizes `λ` over the class by maximizing `1/λ^2`.
pub fn minimize_eigenvalue(
    assembly: &KernelAssembly,
    class: &RearrangementClass,
    opts: &AlternatingOptions,
    eigen: &EigenOptions,
) -> Result<OptimizationTrace> {
    let objective = EigenObjective { assembly, options: eigen.clone() };
    ascend(&objective, class, opts)
}
