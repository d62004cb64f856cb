//! Reference computations shared by the integration tests. Everything here is
//! written independently of the library's quadrature and solvers.

#![allow(dead_code)]

use fraclap::{assemble, Field, Grid, KernelAssembly, KernelSpec, RearrangementClass};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

/// Gauss–Legendre nodes and weights on `[0, 1]` by the Golub–Welsch eigenproblem.
pub fn gauss01(n: usize) -> Vec<(f64, f64)> {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut out: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (0.5 * (eig.eigenvalues[i] + 1.0), v0 * v0)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Composite Gauss rule on `[a, b]` with `panels` equal panels.
pub fn composite(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let base = gauss01(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for k in 0..panels {
        let lo = a + k as f64 * h;
        out.extend(base.iter().map(|(x, w)| (lo + h * x, h * w)));
    }
    out
}

/// `∫_0^h ∫_0^h (s + t)^{-β} dt ds` for `1 < β < 2`.
///
/// Duffy split along the diagonal, then `r = h w^q` with `q = 1/(2 - β)`
/// turns the radial factor `r^{1-β}` into a constant.
fn touching_square(beta: f64, h: f64) -> f64 {
    let q = 1.0 / (2.0 - beta);
    let rule = gauss01(40);
    let mut radial = 0.0;
    for (w, ww) in &rule {
        let r = h * w.powf(q);
        let dr = h * q * w.powf(q - 1.0);
        radial += ww * r.powf(1.0 - beta) * dr;
    }
    let mut angular = 0.0;
    for (v, wv) in &rule {
        angular += wv * (1.0 + v).powf(-beta);
    }
    2.0 * radial * angular
}

/// `∫_A ∫_B |x - y|^{-β} dy dx` for 1D intervals with disjoint interiors.
/// Touching intervals must have equal length.
pub fn pair_1d_oracle(beta: f64, a: (f64, f64), b: (f64, f64)) -> f64 {
    let (a, b) = if a.0 < b.0 { (a, b) } else { (b, a) };
    let gap = b.0 - a.1;
    if gap == 0.0 {
        let h = a.1 - a.0;
        assert!(((b.1 - b.0) - h).abs() <= 1e-15 * h, "touching cells must be equal");
        return touching_square(beta, h);
    }
    let xs = composite(a.0, a.1, 8, 20);
    let ys = composite(b.0, b.1, 8, 20);
    let mut acc = 0.0;
    for (x, wx) in &xs {
        for (y, wy) in &ys {
            acc += wx * wy * (y - x).powf(-beta);
        }
    }
    acc
}

/// `∫_A ∫_{R \ [lo, hi]} |x - y|^{-β} dy dx` for a cell `A ⊂ [lo, hi]`.
pub fn kappa_1d_oracle(beta: f64, cell: (f64, f64), domain: (f64, f64)) -> f64 {
    let right = half_line(beta, cell.1 - cell.0, domain.1 - cell.1);
    let left = half_line(beta, cell.1 - cell.0, cell.0 - domain.0);
    right + left
}

/// Exterior half line seen from a cell of length `len` whose near edge is at
/// distance `gap` from the boundary. The first stretch `[0, h]` beyond the
/// boundary (`h` = the gap, or the cell length for a boundary cell) is a pair
/// integral; beyond it the inner integral `∫_h^∞ (y - x)^{-β} dy` is taken in
/// closed form and the outer one by Gauss.
fn half_line(beta: f64, len: f64, gap: f64) -> f64 {
    let h = if gap > 0.0 { gap } else { len };
    // coordinates: cell = [-gap - len, -gap], boundary at 0
    let near = pair_1d_oracle(beta, (-gap - len, -gap), (0.0, h));
    let far: f64 = composite(-gap - len, -gap, 8, 20)
        .iter()
        .map(|(x, wx)| wx * (h - x).powf(1.0 - beta) / (beta - 1.0))
        .sum();
    near + far
}

pub fn line(n: usize, p: f64, s: f64) -> KernelAssembly {
    let grid = Grid::new(1, &[(0.0, 1.0)], &[n]).unwrap();
    assemble(&grid, &KernelSpec::pure_fractional(p, s, 1.0).unwrap()).unwrap()
}

pub fn random_field<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Field {
    (0..n).map(|_| rng.gen_range(lo..hi)).collect()
}

/// Central-difference gradient error relative to `‖grad‖∞`.
pub fn fd_gradient_error(f: impl Fn(&Field) -> f64, u: &Field, grad: &Field) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..u.len() {
        let h = 1e-5 * u[i].abs().max(1.0);
        let mut up = u.clone();
        let mut dn = u.clone();
        up[i] += h;
        dn[i] -= h;
        worst = worst.max(((f(&up) - f(&dn)) / (2.0 * h) - grad[i]).abs());
    }
    worst / grad.max_abs()
}

/// A member of the class distinct from `g`.
pub fn distinct_member<R: Rng>(rng: &mut R, class: &RearrangementClass, g: &Field) -> Field {
    loop {
        let h = class.random_member(rng);
        if &h != g {
            return h;
        }
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
