use crate::dirichlet::{solve_dirichlet, ReactionSpec, SolveOptions, SolveResult};
use crate::error::Result;
use crate::field::Field;
use crate::kernel::KernelAssembly;
use crate::rearrange::RearrangementClass;

use super::{ascend, AlternatingOptions, OptimizationTrace, StateSolver};

/// `Φ(g) = E(g, u_g)` with derivative field `u_g`.
pub struct EnergyObjective<'a> {
    pub assembly: &'a KernelAssembly,
    pub reaction: &'a ReactionSpec,
    pub options: SolveOptions,
}

impl StateSolver for EnergyObjective<'_> {
    type State = SolveResult;

    fn solve(&self, g: &Field, warm: Option<&SolveResult>) -> Result<SolveResult> {
        let mut opts = self.options.clone();
        if let Some(prev) = warm {
            opts.initial = Some(prev.u.clone());
        }
        solve_dirichlet(self.assembly, g, self.reaction, &opts)
    }

    fn phi(&self, state: &SolveResult) -> f64 {
        state.energy
    }

    fn derivative_field(&self, state: &SolveResult) -> Field {
        derivative_direction_energy(state)
    }

    fn state_field(&self, state: &SolveResult) -> Field {
        state.u.clone()
    }

    fn diagnostics(&self, state: &SolveResult) -> (usize, f64) {
        (state.iterations, state.residual)
    }
}

/// `E(g, u_g)`, the maximal energy at `g`.
pub fn phi_energy(assembly: &KernelAssembly, reaction: &ReactionSpec, g: &Field, opts: &SolveOptions) -> Result<f64> {
    Ok(solve_dirichlet(assembly, g, reaction, opts)?.energy)
}

/// `w = u_g`.
pub fn derivative_direction_energy(result: &SolveResult) -> Field {
    result.u.clone()
}

pub fn maximize_energy(
    assembly: &KernelAssembly,
    class: &RearrangementClass,
    reaction: &ReactionSpec,
    opts: &AlternatingOptions,
    solve: &SolveOptions,
) -> Result<OptimizationTrace> {
    let objective = EnergyObjective { assembly, reaction, options: solve.clone() };
    ascend(&objective, class, opts)
}
