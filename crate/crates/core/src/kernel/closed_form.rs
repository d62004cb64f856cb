//! Exact double antiderivatives for the 1D pure fractional kernel.
//!
//! With `β = 1 + ps` and `G(t) = t^{2-β} / ((β-1)(2-β))`, `G'' = -t^{-β}`, so the
//! pair and exterior integrals reduce to signed sums of `G` at corner gaps.
//! `G(0) = 0` because `2 - β > 0`, which covers touching cells.

use crate::grid::Interval;

fn primitive(beta: f64, t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t.powf(2.0 - beta) / ((beta - 1.0) * (2.0 - beta))
    }
}

/// `∫_I ∫_J |x - y|^{-β} dy dx` for non-overlapping intervals (unit constant).
pub(crate) fn pair_1d(beta: f64, a: Interval, b: Interval) -> f64 {
    let (left, right) = if a.hi <= b.lo { (a, b) } else { (b, a) };
    let g = |t| primitive(beta, t);
    g(right.hi - left.hi) - g(right.hi - left.lo) - g(right.lo - left.hi) + g(right.lo - left.lo)
}

/// `∫_I ∫_{R \ Ω} |x - y|^{-β} dy dx` for a cell `I` inside `Ω = [lo, hi]`.
pub(crate) fn exterior_1d(beta: f64, cell: Interval, domain: Interval) -> f64 {
    let g = |t| primitive(beta, t);
    g(cell.hi - domain.lo) - g(cell.lo - domain.lo) + g(domain.hi - cell.lo) - g(domain.hi - cell.hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacent_halves() {
        // 2 G(1/2) - G(1) with β = 1.8
        let v = pair_1d(1.8, Interval::new(0.0, 0.5), Interval::new(0.5, 1.0));
        let g = |t: f64| t.powf(0.2) / (0.8 * 0.2);
        assert!((v - (2.0 * g(0.5) - g(1.0))).abs() < 1e-13);
        assert!(v > 0.0);
    }

    #[test]
    fn far_pair_approaches_midpoint_rule() {
        let h = 1e-3;
        let v = pair_1d(1.6, Interval::new(0.0, h), Interval::new(1.0, 1.0 + h));
        let approx = h * h * 1.0f64.powf(-1.6);
        assert!(((v - approx) / approx).abs() < 1e-5);
    }
}
