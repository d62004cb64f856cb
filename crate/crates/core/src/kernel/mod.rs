//! Admissible kernels and their cell-pair assembly.
//!
//! A kernel is `K(x, y) = m(x, y) |x - y|^{-(N + ps)}` with a symmetric
//! modulation `C1 <= m <= C2`. Assembly produces the pair weights
//! `W_ij = ∫_{C_i}∫_{C_j} K` and the exterior weights `κ_i = ∫_{C_i}∫_{Ω^c} K`
//! that encode the zero exterior condition.

mod cache;
mod closed_form;
mod cubature;

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{CellBox, Grid};

pub use cache::{assemble_cached, cache_key, read_cache, write_cache};

/// Symmetric modulation factor of a modulated kernel.
#[derive(Clone)]
pub enum Modulation {
    Constant(f64),
    /// `m(x, y) = mid + amp * φ(x) φ(y)` where `φ` is a product of cosines with
    /// `frequency` half-periods per axis across `domain`. Coordinates are clamped to
    /// `domain`, so `m` is constant along exterior rays once they leave it.
    Checkerboard { frequency: u32, domain: CellBox },
    Custom(Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>),
}

impl Modulation {
    pub fn checkerboard(frequency: u32, grid: &Grid) -> Self {
        Modulation::Checkerboard {
            frequency,
            domain: grid.domain_box(),
        }
    }

    fn value(&self, x: &[f64], y: &[f64], c1: f64, c2: f64) -> f64 {
        match self {
            Modulation::Constant(v) => *v,
            Modulation::Checkerboard { frequency, domain } => {
                let phi = |z: &[f64]| {
                    z.iter()
                        .zip(&domain.axes[..domain.dim])
                        .map(|(&zd, b)| {
                            let t = (zd.clamp(b.lo, b.hi) - b.lo) / b.len();
                            (std::f64::consts::PI * *frequency as f64 * t).cos()
                        })
                        .product::<f64>()
                };
                0.5 * (c1 + c2) + 0.5 * (c2 - c1) * phi(x) * phi(y)
            }
            Modulation::Custom(f) => f(x, y),
        }
    }
}

impl fmt::Debug for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulation::Constant(v) => write!(f, "Constant({v})"),
            Modulation::Checkerboard { frequency, .. } => write!(f, "Checkerboard({frequency})"),
            Modulation::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum KernelFamily {
    /// `K(x, y) = c |x - y|^{-(N + ps)}`.
    PureFractional { c: f64 },
    /// `K(x, y) = m(x, y) |x - y|^{-(N + ps)}` with `c1 <= m <= c2`.
    Modulated { c1: f64, c2: f64, modulation: Modulation },
}

#[derive(Clone, Debug)]
pub struct KernelSpec {
    pub p: f64,
    pub s: f64,
    pub family: KernelFamily,
}

impl KernelSpec {
    pub fn pure_fractional(p: f64, s: f64, c: f64) -> Result<Self> {
        let spec = KernelSpec {
            p,
            s,
            family: KernelFamily::PureFractional { c },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn modulated(p: f64, s: f64, c1: f64, c2: f64, modulation: Modulation) -> Result<Self> {
        let spec = KernelSpec {
            p,
            s,
            family: KernelFamily::Modulated { c1, c2, modulation },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn ps(&self) -> f64 {
        self.p * self.s
    }

    /// `(C1, C2)` bracketing `K(x, y) |x - y|^{N + ps}`.
    pub fn bounds(&self) -> (f64, f64) {
        match &self.family {
            KernelFamily::PureFractional { c } => (*c, *c),
            KernelFamily::Modulated { c1, c2, .. } => (*c1, *c2),
        }
    }

    /// Every violated parameter constraint, in a fixed order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.p.is_finite() && self.p > 1.0) {
            out.push(format!("p must be > 1, got {}", self.p));
        }
        if !(self.s > 0.0 && self.s < 1.0) {
            out.push(format!("s must lie in (0, 1), got {}", self.s));
        }
        match &self.family {
            KernelFamily::PureFractional { c } => {
                if !(c.is_finite() && *c > 0.0) {
                    out.push(format!("c must be positive, got {c}"));
                }
            }
            KernelFamily::Modulated { c1, c2, modulation } => {
                if !(c1.is_finite() && c2.is_finite() && *c1 > 0.0 && c1 <= c2) {
                    out.push(format!("need 0 < c1 <= c2, got c1={c1}, c2={c2}"));
                }
                if let Modulation::Constant(v) = modulation {
                    if !(v >= c1 && v <= c2) {
                        out.push(format!("constant modulation {v} outside [{c1}, {c2}]"));
                    }
                }
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidKernel(v.join("; ")))
        }
    }

    pub(crate) fn modulation_value(&self, x: &[f64], y: &[f64]) -> f64 {
        match &self.family {
            KernelFamily::PureFractional { c } => *c,
            KernelFamily::Modulated { c1, c2, modulation } => modulation.value(x, y, *c1, *c2),
        }
    }
}

/// Evaluates `K(x, y)`. The dimension is taken from the length of `x`.
pub fn eval_kernel(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let r2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    if r2 == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let beta = x.len() as f64 + spec.ps();
    Ok(spec.modulation_value(x, y) * r2.powf(-0.5 * beta))
}

/// Quadrature controls for the generic (modulated or 2D) assembly path.
#[derive(Clone, Debug, PartialEq)]
pub struct AssemblyOptions {
    /// Gauss points per axis on regular panels.
    pub gauss_order: usize,
    /// Gauss points in the angular variable of Duffy-transformed corners.
    pub duffy_order: usize,
    /// Gauss points per axis for the modulation average over overlap boxes and
    /// for outer integrals over a cell.
    pub inner_order: usize,
    /// Dyadic levels toward a singular endpoint before the product-rule sliver.
    pub radial_levels: usize,
    /// Maximum recursive subdivision depth for near-singular panels.
    pub max_depth: usize,
    /// Exterior truncation radius as a multiple of the domain diameter.
    pub truncation_factor: f64,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions {
            gauss_order: 8,
            duffy_order: 12,
            inner_order: 4,
            radial_levels: 40,
            max_depth: 60,
            truncation_factor: 10.0,
        }
    }
}

/// Dense pair weights and exterior weights on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelAssembly {
    grid: Grid,
    p: f64,
    s: f64,
    w: Vec<f64>,
    kappa: Vec<f64>,
}

impl KernelAssembly {
    /// Builds an assembly from precomputed weights, checking the structural invariants.
    pub fn from_parts(grid: Grid, p: f64, s: f64, w: Vec<f64>, kappa: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        crate::error::check_len(n * n, w.len())?;
        crate::error::check_len(n, kappa.len())?;
        for i in 0..n {
            if w[i * n + i] != 0.0 {
                return Err(Error::InvalidKernel(format!("W[{i},{i}] must be zero")));
            }
            for j in 0..i {
                if w[i * n + j] != w[j * n + i] || !(w[i * n + j] >= 0.0) {
                    return Err(Error::InvalidKernel(format!(
                        "W must be symmetric and nonnegative (pair {i},{j})"
                    )));
                }
            }
            if !(kappa[i] > 0.0 && kappa[i].is_finite()) {
                return Err(Error::InvalidKernel(format!("kappa[{i}] must be positive")));
            }
        }
        Ok(KernelAssembly { grid, p, s, w, kappa })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn w(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.len() + j]
    }

    pub fn w_row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.w[i * n..(i + 1) * n]
    }

    /// Row-major `n x n` pair weights.
    pub fn w_matrix(&self) -> &[f64] {
        &self.w
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }
}

/// Assembles `W` and `κ` with default quadrature options.
pub fn assemble(grid: &Grid, spec: &KernelSpec) -> Result<KernelAssembly> {
    assemble_with(grid, spec, &AssemblyOptions::default())
}

pub fn assemble_with(grid: &Grid, spec: &KernelSpec, opts: &AssemblyOptions) -> Result<KernelAssembly> {
    spec.validate()?;
    if spec.ps() >= 1.0 {
        return Err(Error::InvalidKernel(format!(
            "ps = {} must be < 1 for piecewise-constant fields",
            spec.ps()
        )));
    }
    if let KernelFamily::Modulated { c1, c2, modulation } = &spec.family {
        check_modulation(grid, modulation, *c1, *c2)?;
    }

    let n = grid.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();

    let (pair_values, kappa): (Vec<f64>, Vec<f64>) = match (&spec.family, grid.dim()) {
        (KernelFamily::PureFractional { c }, 1) => {
            let beta = 1.0 + spec.ps();
            let dom = grid.bounds()[0];
            let pv = pairs
                .par_iter()
                .map(|&(i, j)| c * closed_form::pair_1d(beta, grid.cell_box(i).axes[0], grid.cell_box(j).axes[0]))
                .collect();
            let kp = (0..n)
                .into_par_iter()
                .map(|i| c * closed_form::exterior_1d(beta, grid.cell_box(i).axes[0], dom))
                .collect();
            (pv, kp)
        }
        _ => {
            let integrator = cubature::PairIntegrator::new(grid, spec, opts);
            let pv = pairs
                .par_iter()
                .map(|&(i, j)| integrator.pair(&grid.cell_box(i), &grid.cell_box(j)))
                .collect::<Result<Vec<f64>>>()?;
            let kp = (0..n)
                .into_par_iter()
                .map(|i| integrator.exterior(&grid.cell_box(i)))
                .collect::<Result<Vec<f64>>>()?;
            (pv, kp)
        }
    };

    let mut w = vec![0.0; n * n];
    for (&(i, j), &v) in pairs.iter().zip(&pair_values) {
        w[i * n + j] = v;
        w[j * n + i] = v;
    }
    KernelAssembly::from_parts(grid.clone(), spec.p, spec.s, w, kappa)
}

/// Samples a modulation on cell centers and a few off-center points, checking
/// symmetry and the `[c1, c2]` bracket.
fn check_modulation(grid: &Grid, m: &Modulation, c1: f64, c2: f64) -> Result<()> {
    let n = grid.len();
    let step = (n / 16).max(1);
    let mut pts: Vec<Vec<f64>> = (0..n).step_by(step).map(|i| grid.center(i).to_vec()).collect();
    for i in (0..n).step_by(step) {
        let b = grid.cell_box(i);
        pts.push((0..grid.dim()).map(|d| b.axes[d].lo + 0.3 * b.axes[d].len()).collect());
    }
    let mut outside = grid.center(0).to_vec();
    outside[0] = grid.bounds()[0].lo - 0.5 * grid.diameter();
    pts.push(outside);
    for x in &pts {
        for y in &pts {
            let a = m.value(x, y, c1, c2);
            let b = m.value(y, x, c1, c2);
            if !a.is_finite() || (a - b).abs() > 1e-12 * a.abs().max(1.0) {
                return Err(Error::InvalidKernel(format!(
                    "modulation is not symmetric at {x:?}, {y:?}"
                )));
            }
            if a < c1 - 1e-12 || a > c2 + 1e-12 {
                return Err(Error::InvalidKernel(format!(
                    "modulation value {a} outside [{c1}, {c2}] at {x:?}, {y:?}"
                )));
            }
        }
    }
    Ok(())
}
