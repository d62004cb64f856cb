//! Generic cell-pair quadrature in the difference variable.
//!
//! For boxes `A`, `B` the pair integral is rewritten as
//! `∫ |z|^{-β} M(z) dz` with `M(z) = ∫_{A ∩ (B - z)} m(x, x + z) dx`.
//! `M` is piecewise smooth with kinks on the lines where box faces cross, so the
//! `z` domain is cut along those lines and along the coordinate axes. The only
//! singular point is `z = 0`, which then sits at a corner of a sub-panel and is
//! handled by a Duffy split with dyadic radial grading. The exterior `R^N \ Ω` is
//! tiled by boxes out to a truncation box; the far tail is integrated in polar
//! coordinates about each point, with the radial integral done in closed form.

use crate::error::{Error, Result};
use crate::grid::{CellBox, Grid, Interval};
use crate::quad::{graded_rule, GaussRule};

use super::{AssemblyOptions, KernelFamily, KernelSpec};

pub(crate) struct PairIntegrator<'a> {
    spec: &'a KernelSpec,
    dim: usize,
    beta: f64,
    ps: f64,
    domain: CellBox,
    truncation: CellBox,
    gauss: GaussRule,
    duffy: GaussRule,
    inner: GaussRule,
    tail: GaussRule,
    levels: usize,
    max_depth: usize,
}

impl<'a> PairIntegrator<'a> {
    pub(crate) fn new(grid: &Grid, spec: &'a KernelSpec, opts: &AssemblyOptions) -> Self {
        let dim = grid.dim();
        let ps = spec.ps();
        let domain = grid.domain_box();
        let r = opts.truncation_factor * grid.diameter();
        let mut truncation = domain;
        for d in 0..dim {
            truncation.axes[d] = Interval::new(domain.axes[d].lo - r, domain.axes[d].hi + r);
        }
        PairIntegrator {
            spec,
            dim,
            beta: dim as f64 + ps,
            ps,
            domain,
            truncation,
            gauss: GaussRule::legendre(opts.gauss_order),
            duffy: GaussRule::legendre(opts.duffy_order),
            inner: GaussRule::legendre(opts.inner_order),
            tail: GaussRule::legendre(16),
            levels: opts.radial_levels,
            max_depth: opts.max_depth,
        }
    }

    fn pure_constant(&self) -> Option<f64> {
        match &self.spec.family {
            KernelFamily::PureFractional { c } => Some(*c),
            KernelFamily::Modulated { .. } => None,
        }
    }

    /// `∫_A ∫_B K(x, y) dy dx` for boxes with disjoint interiors.
    pub(crate) fn pair(&self, a: &CellBox, b: &CellBox) -> Result<f64> {
        let mut cuts: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
        for d in 0..self.dim {
            cuts[d] = axis_cuts(a.axes[d], b.axes[d]);
        }
        let integrand = |z: [f64; 2]| self.overlap_weight(a, b, z) * norm(z, self.dim).powf(-self.beta);
        let mut total = 0.0;
        match self.dim {
            1 => {
                for seg in cuts[0].windows(2) {
                    total += self.segment(seg[0], seg[1], &|t| integrand([t, 0.0]));
                }
            }
            _ => {
                for sx in cuts[0].windows(2) {
                    for sy in cuts[1].windows(2) {
                        total += self.rect([sx[0], sy[0]], [sx[1], sy[1]], &integrand)?;
                    }
                }
            }
        }
        Ok(match self.pure_constant() {
            Some(c) => c * total,
            None => total,
        })
    }

    /// `∫_A ∫_{R^N \ Ω} K(x, y) dy dx` for a cell `A` inside the domain.
    pub(crate) fn exterior(&self, a: &CellBox) -> Result<f64> {
        let mut total = 0.0;
        for tile in exterior_tiles(&self.domain, &self.truncation) {
            total += self.pair(a, &tile)?;
        }
        let tail = self.far_tail(a);
        Ok(total
            + match self.pure_constant() {
                Some(c) => c * tail,
                None => tail,
            })
    }

    /// `M(z)`, with the constant of a pure kernel factored out.
    ///
    /// Overlap lengths are formed from the breakpoint offsets `a.hi - b.lo` and
    /// `b.hi - a.lo` so that they stay accurate relative to `z` as `z → 0`.
    fn overlap_weight(&self, a: &CellBox, b: &CellBox, z: [f64; 2]) -> f64 {
        let mut lo = [0.0; 2];
        let mut len = [0.0; 2];
        for d in 0..self.dim {
            let (ad, bd) = (a.axes[d], b.axes[d]);
            len[d] = ad
                .len()
                .min(bd.len())
                .min((ad.hi - bd.lo) + z[d])
                .min((bd.hi - ad.lo) - z[d]);
            if len[d] <= 0.0 {
                return 0.0;
            }
            lo[d] = ad.lo.max(bd.lo - z[d]);
        }
        let volume: f64 = len[..self.dim].iter().product();
        if self.pure_constant().is_some() {
            return volume;
        }
        let m = |x: &[f64]| {
            let y: Vec<f64> = x.iter().zip(&z).map(|(xi, zi)| xi + zi).collect();
            self.spec.modulation_value(x, &y)
        };
        // mean of m over the overlap box, times its volume
        let mean = match self.dim {
            1 => 0.5 * self.inner.integrate(-1.0, 1.0, |t| m(&[lo[0] + 0.5 * len[0] * (1.0 + t)])),
            _ => {
                let mut acc = 0.0;
                for (t0, w0) in self.inner.mapped(0.0, 1.0) {
                    for (t1, w1) in self.inner.mapped(0.0, 1.0) {
                        acc += w0 * w1 * m(&[lo[0] + len[0] * t0, lo[1] + len[1] * t1]);
                    }
                }
                acc
            }
        };
        mean * volume
    }

    fn segment(&self, z0: f64, z1: f64, f: &dyn Fn(f64) -> f64) -> f64 {
        graded_rule(z0, z1, 0.0, -self.ps, self.levels, &self.gauss)
            .into_iter()
            .map(|(z, w)| w * f(z))
            .sum()
    }

    fn rect(&self, lo: [f64; 2], hi: [f64; 2], f: &dyn Fn([f64; 2]) -> f64) -> Result<f64> {
        let x_at_origin = lo[0] == 0.0 || hi[0] == 0.0;
        let y_at_origin = lo[1] == 0.0 || hi[1] == 0.0;
        if x_at_origin && y_at_origin {
            let sx = if lo[0] == 0.0 { 1.0 } else { -1.0 };
            let sy = if lo[1] == 0.0 { 1.0 } else { -1.0 };
            self.corner(sx, sy, hi[0] - lo[0], hi[1] - lo[1], f)
        } else {
            self.adaptive(lo, hi, f, 0)
        }
    }

    /// Panel `[0, a] x [0, b]` reflected by `(sx, sy)`, singular at the origin corner.
    fn corner(&self, sx: f64, sy: f64, a: f64, b: f64, f: &dyn Fn([f64; 2]) -> f64) -> Result<f64> {
        let at = |u: f64, v: f64| [sx * u, sy * v];
        if b > 2.0 * a {
            let rest = self.adaptive_signed(at(0.0, a), at(a, b), f)?;
            return Ok(self.corner(sx, sy, a, a, f)? + rest);
        }
        if a > 2.0 * b {
            let rest = self.adaptive_signed(at(b, 0.0), at(a, b), f)?;
            return Ok(self.corner(sx, sy, b, b, f)? + rest);
        }
        // Duffy: split along the diagonal, z = r (1, t) and z = r (t, 1).
        let mut acc = 0.0;
        for (r, wr) in graded_rule(0.0, a, 0.0, -self.ps, self.levels, &self.gauss) {
            for (t, wt) in self.duffy.mapped(0.0, b / a) {
                acc += wr * wt * r * f(at(r, r * t));
            }
        }
        for (r, wr) in graded_rule(0.0, b, 0.0, -self.ps, self.levels, &self.gauss) {
            for (t, wt) in self.duffy.mapped(0.0, a / b) {
                acc += wr * wt * r * f(at(r * t, r));
            }
        }
        Ok(acc)
    }

    fn adaptive_signed(&self, p: [f64; 2], q: [f64; 2], f: &dyn Fn([f64; 2]) -> f64) -> Result<f64> {
        let lo = [p[0].min(q[0]), p[1].min(q[1])];
        let hi = [p[0].max(q[0]), p[1].max(q[1])];
        self.adaptive(lo, hi, f, 0)
    }

    /// Tensor Gauss once the panel is no larger than its distance to the origin,
    /// quadrisection otherwise.
    fn adaptive(&self, lo: [f64; 2], hi: [f64; 2], f: &dyn Fn([f64; 2]) -> f64, depth: usize) -> Result<f64> {
        let dist = {
            let dx = if lo[0] > 0.0 { lo[0] } else if hi[0] < 0.0 { -hi[0] } else { 0.0 };
            let dy = if lo[1] > 0.0 { lo[1] } else if hi[1] < 0.0 { -hi[1] } else { 0.0 };
            (dx * dx + dy * dy).sqrt()
        };
        let size = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        if size <= dist {
            let mut acc = 0.0;
            for (x, wx) in self.gauss.mapped(lo[0], hi[0]) {
                for (y, wy) in self.gauss.mapped(lo[1], hi[1]) {
                    acc += wx * wy * f([x, y]);
                }
            }
            return Ok(acc);
        }
        if dist == 0.0 || depth >= self.max_depth {
            return Err(Error::Quadrature(format!(
                "panel [{:e}, {:e}] x [{:e}, {:e}] not resolved at depth {depth}",
                lo[0], hi[0], lo[1], hi[1]
            )));
        }
        let mx = 0.5 * (lo[0] + hi[0]);
        let my = 0.5 * (lo[1] + hi[1]);
        let mut acc = 0.0;
        for (xl, xh) in [(lo[0], mx), (mx, hi[0])] {
            for (yl, yh) in [(lo[1], my), (my, hi[1])] {
                acc += self.adaptive([xl, yl], [xh, yh], f, depth + 1)?;
            }
        }
        Ok(acc)
    }

    /// Contribution of `y` outside the truncation box, with the constant of a pure
    /// kernel factored out. The modulation is frozen at the truncation boundary
    /// along each ray.
    fn far_tail(&self, a: &CellBox) -> f64 {
        let ps = self.ps;
        let t = &self.truncation;
        match self.dim {
            1 => {
                let (lo, hi) = (t.axes[0].lo, t.axes[0].hi);
                self.inner.integrate(a.axes[0].lo, a.axes[0].hi, |x| {
                    let right = self.tail_modulation(&[x], &[hi]) * (hi - x).powf(-ps);
                    let left = self.tail_modulation(&[x], &[lo]) * (x - lo).powf(-ps);
                    (right + left) / ps
                })
            }
            _ => {
                let mut acc = 0.0;
                for (x0, w0) in self.inner.mapped(a.axes[0].lo, a.axes[0].hi) {
                    for (x1, w1) in self.inner.mapped(a.axes[1].lo, a.axes[1].hi) {
                        acc += w0 * w1 * self.polar_tail([x0, x1]);
                    }
                }
                acc
            }
        }
    }

    fn tail_modulation(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.pure_constant() {
            Some(_) => 1.0,
            None => self.spec.modulation_value(x, y),
        }
    }

    /// `(1/ps) ∫_0^{2π} m(x, x + ρ_B e) ρ_B(θ)^{-ps} dθ` where `ρ_B` is the distance
    /// from `x` to the truncation box along direction `θ`.
    fn polar_tail(&self, x: [f64; 2]) -> f64 {
        let t = &self.truncation;
        let mut acc = 0.0;
        for normal in 0..2 {
            let tangent = 1 - normal;
            for side in [-1.0, 1.0] {
                let wall = if side > 0.0 { t.axes[normal].hi } else { t.axes[normal].lo };
                let d = (wall - x[normal]).abs();
                let phi_lo = (t.axes[tangent].lo - x[tangent]).atan2(d);
                let phi_hi = (t.axes[tangent].hi - x[tangent]).atan2(d);
                for (phi, w) in self.tail.mapped(phi_lo, phi_hi) {
                    let rho = d / phi.cos();
                    let mut y = [0.0; 2];
                    y[normal] = x[normal] + side * d;
                    y[tangent] = x[tangent] + rho * phi.sin();
                    acc += w * self.tail_modulation(&x, &y) * rho.powf(-self.ps);
                }
            }
        }
        acc / self.ps
    }
}

fn norm(z: [f64; 2], dim: usize) -> f64 {
    if dim == 1 {
        z[0].abs()
    } else {
        (z[0] * z[0] + z[1] * z[1]).sqrt()
    }
}

/// Sorted breakpoints of `z ↦ |A ∩ (B - z)|` on the support `[B.lo - A.hi, B.hi - A.lo]`,
/// plus `0` when it lies inside. Values within rounding of zero are snapped to zero.
fn axis_cuts(a: Interval, b: Interval) -> Vec<f64> {
    let lo = b.lo - a.hi;
    let hi = b.hi - a.lo;
    let scale = lo.abs().max(hi.abs());
    let snap = |v: f64| if v.abs() <= 1e-13 * scale { 0.0 } else { v };
    let mut cuts = vec![snap(lo), snap(hi)];
    for v in [b.lo - a.lo, b.hi - a.hi, 0.0] {
        let v = snap(v);
        if v > cuts[0] && v < cuts[1] {
            cuts.push(v);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= 1e-13 * scale);
    cuts
}

/// Boxes tiling `truncation \ domain`.
fn exterior_tiles(domain: &CellBox, truncation: &CellBox) -> Vec<CellBox> {
    let dim = domain.dim;
    let pieces = |d: usize| {
        [
            Interval::new(truncation.axes[d].lo, domain.axes[d].lo),
            domain.axes[d],
            Interval::new(domain.axes[d].hi, truncation.axes[d].hi),
        ]
    };
    let mut tiles = Vec::new();
    if dim == 1 {
        for (k, iv) in pieces(0).into_iter().enumerate() {
            if k != 1 {
                let mut axes = domain.axes;
                axes[0] = iv;
                tiles.push(CellBox { dim, axes });
            }
        }
    } else {
        for (kx, ix) in pieces(0).into_iter().enumerate() {
            for (ky, iy) in pieces(1).into_iter().enumerate() {
                if kx != 1 || ky != 1 {
                    tiles.push(CellBox { dim, axes: [ix, iy] });
                }
            }
        }
    }
    tiles
}
