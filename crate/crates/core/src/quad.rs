//! One-dimensional quadrature building blocks.

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    /// `n`-point Gauss–Legendre rule (Newton iteration on the Legendre recurrence).
    pub fn legendre(n: usize) -> Self {
        assert!(n >= 1, "Gauss rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let d = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite rule for `∫_a^b f` when `f` has a point singularity at `sing`, located
/// at or outside the interval, and behaves like `|x - sing|^alpha` near it.
///
/// Panels grow geometrically away from the singularity so that each panel is no
/// longer than its distance to `sing`. When `sing` is an endpoint the grading stops
/// after `levels` dyadic panels and the innermost sliver is integrated with the
/// one-point product rule that is exact for `|x - sing|^alpha * (c0 + c1 |x - sing|)`.
pub fn graded_rule(
    a: f64,
    b: f64,
    sing: f64,
    alpha: f64,
    levels: usize,
    rule: &GaussRule,
) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    if b <= a {
        return out;
    }
    if sing > a && sing < b {
        out.extend(graded_rule(a, sing, sing, alpha, levels, rule));
        out.extend(graded_rule(sing, b, sing, alpha, levels, rule));
        return out;
    }
    // Work in offsets t = |x - sing| measured from the singular side.
    let (near, far, dir) = if sing <= a { (a, b, 1.0) } else { (b, a, -1.0) };
    let gap = (near - sing).abs();
    let len = (far - near).abs();
    let to_x = |t: f64| sing + dir * t;

    let push_panel = |t0: f64, t1: f64, out: &mut Vec<(f64, f64)>| {
        for (t, w) in rule.mapped(t0, t1) {
            out.push((to_x(t), w));
        }
    };

    if gap > 0.0 {
        let end = gap + len;
        let mut t0 = gap;
        while t0 < end {
            let t1 = (2.0 * t0).min(end);
            push_panel(t0, t1, &mut out);
            t0 = t1;
        }
    } else {
        assert!(alpha > -1.0, "endpoint singularity must be integrable");
        let mut t1 = len;
        for _ in 0..levels {
            let t0 = 0.5 * t1;
            push_panel(t0, t1, &mut out);
            t1 = t0;
        }
        let eps = t1;
        let node = eps * (1.0 + alpha) / (2.0 + alpha);
        let weight = eps.powf(1.0 + alpha) / (1.0 + alpha) / node.powf(alpha);
        out.push((to_x(node), weight));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_integrates_polynomials_exactly() {
        for n in [1, 2, 4, 8, 12, 16] {
            let rule = GaussRule::legendre(n);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14, "n={n}");
            for deg in 0..(2 * n) {
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                let got = rule.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
                assert!((got - exact).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn graded_rule_endpoint_singularity() {
        let rule = GaussRule::legendre(8);
        for alpha in [-0.9, -0.5, 0.3] {
            let pts = graded_rule(0.0, 2.0, 0.0, alpha, 40, &rule);
            let got: f64 = pts.iter().map(|(x, w)| w * x.powf(alpha) * (1.0 + x)).sum();
            let exact = 2f64.powf(alpha + 1.0) / (alpha + 1.0) + 2f64.powf(alpha + 2.0) / (alpha + 2.0);
            assert!(((got - exact) / exact).abs() < 1e-12, "alpha={alpha} got={got} exact={exact}");
        }
    }

    #[test]
    fn graded_rule_right_endpoint_and_outside() {
        let rule = GaussRule::legendre(8);
        let pts = graded_rule(-1.0, 0.0, 0.0, -0.5, 45, &rule);
        let got: f64 = pts.iter().map(|(x, w)| w * (-x).powf(-0.5)).sum();
        assert!((got - 2.0).abs() < 1e-12);

        // singularity just outside the interval
        let pts = graded_rule(1e-6, 1.0, 0.0, -1.5, 40, &rule);
        let got: f64 = pts.iter().map(|(x, w)| w * x.powf(-1.5)).sum();
        let exact = 2.0 * (1e-6f64.powf(-0.5) - 1.0);
        assert!(((got - exact) / exact).abs() < 1e-11);
    }
}
