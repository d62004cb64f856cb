//! JSON run configuration for the command-line front end.

use serde::{Deserialize, Serialize};

use crate::dirichlet::{ReactionSpec, SolveOptions};
use crate::eigen::EigenOptions;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::kernel::{KernelSpec, Modulation};
use crate::optimize::AlternatingOptions;
use crate::rearrange::RearrangementClass;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// When present it must name the subcommand being run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    pub grid: GridConfig,
    pub kernel: KernelConfig,
    pub weight: WeightConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reaction: Option<ReactionConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub bounds: Vec<[f64; 2]>,
    pub cells_per_axis: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelConfig {
    PureFractional {
        p: f64,
        s: f64,
        #[serde(default = "one")]
        c: f64,
    },
    Modulated {
        p: f64,
        s: f64,
        c1: f64,
        c2: f64,
        modulation: ModulationConfig,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModulationConfig {
    Constant { value: f64 },
    Checkerboard { frequency: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightConfig {
    Values {
        values: Vec<f64>,
    },
    Binary {
        fraction: f64,
    },
    #[serde(alias = "linear-ramp")]
    LinearRamp {
        lo: f64,
        hi: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Constant(f64),
    Values(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReactionConfig {
    pub c: Coefficient,
    /// Required unless `c` vanishes identically.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    /// Relative quotient decrease for the eigensolver, `‖∇J‖∞` for the Dirichlet solver.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Euler–Lagrange residual bound of the eigensolver.
    pub residual_tol: f64,
    pub max_iters: usize,
    /// Extra random starts inside each eigensolve.
    pub multi_starts: usize,
    /// Improvement tolerance of the alternating scheme.
    pub outer_tol: f64,
    pub outer_max_iters: usize,
    pub restarts: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let eig = EigenOptions::default();
        let alt = AlternatingOptions::default();
        SolverConfig {
            tol: None,
            residual_tol: eig.residual_tol,
            max_iters: eig.max_iters,
            multi_starts: 0,
            outer_tol: alt.tol,
            outer_max_iters: alt.max_iters,
            restarts: alt.restarts,
            seed: None,
        }
    }
}

/// Everything a run needs, built from a validated configuration.
#[derive(Clone, Debug)]
pub struct Problem {
    pub grid: Grid,
    pub kernel: KernelSpec,
    pub class: RearrangementClass,
    pub reaction: ReactionSpec,
    pub eigen: EigenOptions,
    pub dirichlet: SolveOptions,
    pub alternating: AlternatingOptions,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every constraint and builds the problem, reporting all violations at once.
    pub fn build(&self) -> Result<Problem> {
        let mut errs = Vec::new();
        let mut finite = |what: &str, v: f64| {
            if !v.is_finite() {
                errs.push(format!("{what} must be finite"));
            }
        };
        for b in &self.grid.bounds {
            finite("grid.bounds", b[0]);
            finite("grid.bounds", b[1]);
        }
        let bounds: Vec<(f64, f64)> = self.grid.bounds.iter().map(|b| (b[0], b[1])).collect();
        let grid = Grid::new(self.grid.dim, &bounds, &self.grid.cells_per_axis)
            .map_err(|e| errs.push(e.to_string()))
            .ok();

        let kernel = self.kernel_spec(grid.as_ref()).map_err(|e| errs.push(e.to_string())).ok();
        if let Some(k) = &kernel {
            if k.ps() >= 1.0 {
                errs.push(format!("invalid kernel: ps = {} must be < 1", k.ps()));
            }
        }
        let p = match &self.kernel {
            KernelConfig::PureFractional { p, .. } | KernelConfig::Modulated { p, .. } => *p,
        };

        let class = grid.as_ref().and_then(|g| {
            let n = g.len();
            let built = match &self.weight {
                WeightConfig::Values { values } if values.len() != n => Err(Error::InvalidClass(format!(
                    "weight.values has {} entries, grid has {n} cells",
                    values.len()
                ))),
                WeightConfig::Values { values } => RearrangementClass::new(Field::new(values.clone())),
                WeightConfig::Binary { fraction } => RearrangementClass::binary(n, *fraction),
                WeightConfig::LinearRamp { lo, hi } => RearrangementClass::linear_ramp(n, *lo, *hi),
            };
            built.map_err(|e| errs.push(e.to_string())).ok()
        });

        let reaction = grid.as_ref().and_then(|g| {
            let n = g.len();
            let spec = match &self.reaction {
                None => ReactionSpec::zero(n),
                Some(r) => {
                    let c = match &r.c {
                        Coefficient::Constant(c) => Field::constant(n, *c),
                        Coefficient::Values(v) => Field::new(v.clone()),
                    };
                    let spec = ReactionSpec::new(c, r.q.unwrap_or(f64::NAN));
                    if !spec.is_zero() && r.q.is_none() {
                        errs.push("reaction.q is required when reaction.c is nonzero".into());
                        return None;
                    }
                    spec
                }
            };
            spec.validate(n, p).map_err(|e| errs.push(e.to_string())).ok().map(|_| spec)
        });

        let s = &self.solver;
        if let Some(t) = s.tol {
            if !(t > 0.0) || !t.is_finite() {
                errs.push(format!("solver.tol must be positive, got {t}"));
            }
        }
        for (name, v) in [("solver.residual_tol", s.residual_tol), ("solver.outer_tol", s.outer_tol)] {
            if !(v > 0.0) || !v.is_finite() {
                errs.push(format!("{name} must be positive, got {v}"));
            }
        }
        if s.max_iters == 0 || s.outer_max_iters == 0 {
            errs.push("solver.max_iters and solver.outer_max_iters must be at least 1".into());
        }
        if (s.restarts > 0 || s.multi_starts > 0) && s.seed.is_none() {
            errs.push("solver.seed is required when restarts or multi_starts is positive".into());
        }

        if !errs.is_empty() {
            return Err(Error::Config(errs));
        }
        let seed = s.seed.unwrap_or(0);
        let eigen_defaults = EigenOptions::default();
        let dirichlet_defaults = SolveOptions::default();
        Ok(Problem {
            grid: grid.expect("checked"),
            kernel: kernel.expect("checked"),
            class: class.expect("checked"),
            reaction: reaction.expect("checked"),
            eigen: EigenOptions {
                tol: s.tol.unwrap_or(eigen_defaults.tol),
                residual_tol: s.residual_tol,
                max_iters: s.max_iters,
                multi_starts: s.multi_starts,
                seed,
                initial: None,
            },
            dirichlet: SolveOptions {
                tol: s.tol.unwrap_or(dirichlet_defaults.tol),
                max_iters: s.max_iters,
                initial: None,
            },
            alternating: AlternatingOptions {
                tol: s.outer_tol,
                max_iters: s.outer_max_iters,
                restarts: s.restarts,
                seed,
            },
        })
    }

    fn kernel_spec(&self, grid: Option<&Grid>) -> Result<KernelSpec> {
        match &self.kernel {
            KernelConfig::PureFractional { p, s, c } => KernelSpec::pure_fractional(*p, *s, *c),
            KernelConfig::Modulated { p, s, c1, c2, modulation } => {
                let m = match modulation {
                    ModulationConfig::Constant { value } => Modulation::Constant(*value),
                    ModulationConfig::Checkerboard { frequency } => match grid {
                        Some(g) => Modulation::checkerboard(*frequency, g),
                        None => return Err(Error::InvalidKernel("checkerboard needs a valid grid".into())),
                    },
                };
                KernelSpec::modulated(*p, *s, *c1, *c2, m)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"{
        "grid": {"dim": 1, "bounds": [[0, 1]], "cells_per_axis": [8]},
        "kernel": {"family": "pure_fractional", "p": 2, "s": 0.4},
        "weight": {"generator": "binary", "fraction": 0.5},
        "solver": {"restarts": 2, "seed": 7}
    }"#;

    #[test]
    fn parses_and_builds() {
        let cfg = RunConfig::from_json(BASIC).unwrap();
        let prob = cfg.build().unwrap();
        assert_eq!(prob.grid.len(), 8);
        assert_eq!(prob.class.count(), 70);
        assert_eq!(prob.alternating.restarts, 2);
        assert_eq!(prob.alternating.seed, 7);
        assert!(prob.reaction.is_zero());
        let again = RunConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(again, cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = BASIC.replace("\"dim\": 1", "\"dim\": 1, \"spacing\": 2");
        assert!(matches!(RunConfig::from_json(&text), Err(Error::Config(_))));
        let text = BASIC.replace("\"s\": 0.4", "\"s\": 0.4, \"extra\": 1");
        assert!(RunConfig::from_json(&text).is_err());
    }

    #[test]
    fn every_violation_is_listed() {
        let text = r#"{
            "grid": {"dim": 1, "bounds": [[0, 1]], "cells_per_axis": [8]},
            "kernel": {"family": "pure_fractional", "p": 3, "s": 0.5},
            "weight": {"generator": "values", "values": [1, 0, 0]},
            "reaction": {"c": 1.0, "q": 4.0},
            "solver": {"restarts": 3}
        }"#;
        let cfg = RunConfig::from_json(text).unwrap();
        match cfg.build() {
            Err(Error::Config(v)) => {
                assert_eq!(v.len(), 4, "{v:?}");
                assert!(v.iter().any(|m| m.contains("seed")));
                assert!(v.iter().any(|m| m.contains("3 entries")));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reaction_and_modulation_variants() {
        let text = r#"{
            "grid": {"dim": 2, "bounds": [[0, 1], [0, 1]], "cells_per_axis": [4, 4]},
            "kernel": {"family": "modulated", "p": 2, "s": 0.3, "c1": 0.5, "c2": 1.5,
                       "modulation": {"preset": "checkerboard", "frequency": 2}},
            "weight": {"generator": "linear-ramp", "lo": 0, "hi": 1},
            "reaction": {"c": 0.5, "q": 1.5},
            "solver": {"restarts": 0}
        }"#;
        let prob = RunConfig::from_json(text).unwrap().build().unwrap();
        assert_eq!(prob.reaction.c0(), 0.5);
        assert_eq!(prob.class.len(), 16);
        let zero_c = text.replace(r#""c": 0.5, "q": 1.5"#, r#""c": 0"#);
        assert!(RunConfig::from_json(&zero_c).unwrap().build().unwrap().reaction.is_zero());
    }
}
