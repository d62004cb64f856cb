//! Rearrangement classes on equal-measure cells.
//!
//! A rearrangement of `g0` is any field with the same distribution function;
//! on a uniform grid this is exactly a permutation of its cell values.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{check_len, Error, Result};
use crate::field::Field;

/// Per-entry tolerance of the membership test.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

pub const DEFAULT_ENUMERATION_CAP: u128 = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct RearrangementClass {
    generator: Field,
    sorted_values: Vec<f64>,
    bound: f64,
}

impl RearrangementClass {
    pub fn new(generator: Field) -> Result<Self> {
        if generator.is_empty() {
            return Err(Error::InvalidClass("generator is empty".into()));
        }
        if generator.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::InvalidClass("generator values must be finite and nonnegative".into()));
        }
        if generator.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidClass("generator vanishes identically".into()));
        }
        let mut sorted_values = generator.to_vec();
        sorted_values.sort_by(|a, b| b.total_cmp(a));
        let bound = sorted_values[0];
        Ok(RearrangementClass { generator, sorted_values, bound })
    }

    /// Indicator of the first `round(fraction * n)` cells.
    pub fn binary(n: usize, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::InvalidClass(format!("binary fraction {fraction} outside (0, 1]")));
        }
        let k = (fraction * n as f64).round() as usize;
        if k == 0 {
            return Err(Error::InvalidClass(format!("binary fraction {fraction} selects no cell out of {n}")));
        }
        Self::new((0..n).map(|i| if i < k { 1.0 } else { 0.0 }).collect())
    }

    /// Values spaced evenly from `lo` to `hi` over the cells.
    pub fn linear_ramp(n: usize, lo: f64, hi: f64) -> Result<Self> {
        if n < 2 || !(lo >= 0.0) || !(hi >= lo) {
            return Err(Error::InvalidClass(format!("linear ramp needs n >= 2 and 0 <= lo <= hi, got n={n}, lo={lo}, hi={hi}")));
        }
        Self::new((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
    }

    pub fn generator(&self) -> &Field {
        &self.generator
    }

    /// Generator values in nonincreasing order.
    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted_values
    }

    /// Essential supremum `M` of the class.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.generator.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generator.is_empty()
    }

    pub fn contains(&self, g: &Field) -> bool {
        if g.len() != self.len() {
            return false;
        }
        let mut s = g.to_vec();
        s.sort_by(|a, b| b.total_cmp(a));
        s.iter().zip(&self.sorted_values).all(|(a, b)| (a - b).abs() <= MEMBERSHIP_TOL)
    }

    pub fn random_member<R: Rng + ?Sized>(&self, rng: &mut R) -> Field {
        let mut v = self.generator.to_vec();
        v.shuffle(rng);
        Field::new(v)
    }

    /// Number of distinct rearrangements (multinomial coefficient), saturating at `u128::MAX`.
    pub fn count(&self) -> u128 {
        let mut total: u128 = 1;
        let mut placed: u128 = 0;
        let mut i = 0;
        while i < self.sorted_values.len() {
            let mut j = i;
            while j < self.sorted_values.len() && self.sorted_values[j] == self.sorted_values[i] {
                j += 1;
            }
            // multiply by C(placed + m, m) one factor at a time; each partial product is an integer
            for k in 1..=(j - i) as u128 {
                placed += 1;
                match total.checked_mul(placed) {
                    Some(t) => total = t / k,
                    None => return u128::MAX,
                }
            }
            i = j;
        }
        total
    }

    /// All distinct rearrangements in lexicographic order of their values.
    pub fn enumerate(&self, cap: u128) -> Result<Permutations> {
        let count = self.count();
        if count > cap {
            return Err(Error::EnumerationCap { count, cap });
        }
        let mut first = self.sorted_values.clone();
        first.reverse();
        Ok(Permutations { next: Some(first) })
    }
}

/// Single-consumer iterator over multiset permutations.
#[derive(Debug)]
pub struct Permutations {
    next: Option<Vec<f64>>,
}

impl Iterator for Permutations {
    type Item = Field;

    fn next(&mut self) -> Option<Field> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(Field::new(current))
    }
}

fn next_permutation(v: &mut [f64]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Class member maximizing `Σ g_i w_i`: the largest values go to the largest
/// entries of `w`, ties in `w` resolved by ascending cell index.
pub fn maximize_linear(class: &RearrangementClass, w: &Field) -> Result<Field> {
    check_len(class.len(), w.len())?;
    if !w.is_finite() {
        return Err(Error::InvalidWeight("linearization field is not finite".into()));
    }
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]));
    let mut g = vec![0.0; w.len()];
    for (rank, &i) in order.iter().enumerate() {
        g[i] = class.sorted_values[rank];
    }
    Ok(Field::new(g))
}

/// `Σ g_i w_i μ`.
pub fn linear_objective(g: &Field, w: &Field, cell_measure: f64) -> f64 {
    g.dot(w) * cell_measure
}

/// True iff `g_i >= g_j - tol` whenever `w_i - w_j > tol`, i.e. `g` never
/// decreases along increasing `w`.
pub fn is_comonotone(g: &Field, w: &Field, tol: f64) -> bool {
    if g.len() != w.len() {
        return false;
    }
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[a].total_cmp(&w[b]));
    // sweep in increasing w, tracking the max of g over cells strictly below w_i - tol
    let mut lower = 0;
    let mut prefix_max = f64::NEG_INFINITY;
    for &i in &order {
        while lower < order.len() && w[i] - w[order[lower]] > tol {
            prefix_max = prefix_max.max(g[order[lower]]);
            lower += 1;
        }
        if g[i] < prefix_max - tol {
            return false;
        }
    }
    true
}

/// Finite convex combination of class members.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosureElement {
    pub members: Vec<Field>,
    pub theta: Vec<f64>,
    pub values: Field,
    /// Set when the combination is not itself a class member.
    pub strict: bool,
}

pub fn mixture(class: &RearrangementClass, members: &[Field], theta: &[f64]) -> Result<ClosureElement> {
    if members.is_empty() || members.len() != theta.len() {
        return Err(Error::OffSimplex(format!("{} members with {} weights", members.len(), theta.len())));
    }
    if theta.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) {
        return Err(Error::OffSimplex("negative or non-finite weight".into()));
    }
    let sum: f64 = theta.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::OffSimplex(format!("weights sum to {sum}")));
    }
    for m in members {
        if !class.contains(m) {
            return Err(Error::InvalidClass("mixture member is not a rearrangement of the generator".into()));
        }
    }
    let values: Field = (0..class.len())
        .map(|i| members.iter().zip(theta).map(|(m, t)| t * m[i]).sum())
        .collect();
    let strict = !class.contains(&values);
    Ok(ClosureElement { members: members.to_vec(), theta: theta.to_vec(), values, strict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn class(v: &[f64]) -> RearrangementClass {
        RearrangementClass::new(Field::new(v.to_vec())).unwrap()
    }

    #[test]
    fn maximize_linear_pairs_by_sorting() {
        let c = class(&[0.0, 1.0, 1.0]);
        let g = maximize_linear(&c, &Field::new(vec![3.0, 1.0, 2.0])).unwrap();
        assert_eq!(g.values(), &[1.0, 0.0, 1.0]);
    }

    #[test]
    fn constant_w_uses_index_order() {
        let c = class(&[0.0, 2.0, 1.0, 0.5]);
        let g = maximize_linear(&c, &Field::constant(4, 7.0)).unwrap();
        assert_eq!(g.values(), &[2.0, 1.0, 0.5, 0.0]);
    }

    #[test]
    fn brute_force_n6() {
        let c = class(&[1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let w: Field = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let g = maximize_linear(&c, &w).unwrap();
            let members: Vec<Field> = c.enumerate(DEFAULT_ENUMERATION_CAP).unwrap().collect();
            assert_eq!(members.len(), 20);
            let best = members.iter().map(|m| m.dot(&w)).fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(g.dot(&w), best);
        }
    }

    #[test]
    fn comonotone_examples() {
        let w = Field::new(vec![0.1, 0.2, 0.3, 0.4]);
        assert!(is_comonotone(&Field::new(vec![0.0, 0.0, 1.0, 1.0]), &w, 1e-12));
        assert!(!is_comonotone(&Field::new(vec![1.0, 0.0, 0.0, 1.0]), &w, 1e-12));
        // ties in w impose nothing
        assert!(is_comonotone(&Field::new(vec![1.0, 0.0]), &Field::new(vec![0.5, 0.5]), 1e-12));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(class(&[1.0, 0.0, 0.0]).enumerate(100).unwrap().count(), 3);
        assert_eq!(class(&[1.0, 1.0, 0.0, 0.0]).enumerate(100).unwrap().count(), 6);
        let distinct: Vec<f64> = (1..=8).map(|v| v as f64).collect();
        let c = class(&distinct);
        assert_eq!(c.count(), 40320);
        assert_eq!(c.enumerate(DEFAULT_ENUMERATION_CAP).unwrap().count(), 40320);
        assert_eq!(class(&[1.0; 5]).enumerate(1).unwrap().count(), 1);
    }

    #[test]
    fn enumeration_cap_reports_count() {
        let c = class(&(1..=10).map(|v| v as f64).collect::<Vec<_>>());
        match c.enumerate(DEFAULT_ENUMERATION_CAP) {
            Err(Error::EnumerationCap { count, cap }) => {
                assert_eq!(count, 3_628_800);
                assert_eq!(cap, DEFAULT_ENUMERATION_CAP);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn enumeration_members_are_distinct() {
        let c = class(&[2.0, 1.0, 1.0, 0.0, 0.0]);
        let all: Vec<Vec<f64>> = c.enumerate(1000).unwrap().map(Field::into_vec).collect();
        assert_eq!(all.len() as u128, c.count());
        assert_eq!(all.len(), 30);
        for (i, a) in all.iter().enumerate() {
            assert!(c.contains(&Field::new(a.clone())));
            assert!(all[i + 1..].iter().all(|b| b != a));
        }
    }

    #[test]
    fn mixture_examples() {
        let c = class(&[0.0, 1.0]);
        let a = Field::new(vec![1.0, 0.0]);
        let b = Field::new(vec![0.0, 1.0]);
        let single = mixture(&c, &[a.clone()], &[1.0]).unwrap();
        assert_eq!(single.values, a);
        assert!(!single.strict);
        let avg = mixture(&c, &[a.clone(), b.clone()], &[0.5, 0.5]).unwrap();
        assert_eq!(avg.values.values(), &[0.5, 0.5]);
        assert!(avg.strict);
        assert!(matches!(mixture(&c, &[a.clone(), b.clone()], &[0.7, 0.7]), Err(Error::OffSimplex(_))));
        assert!(matches!(mixture(&c, &[a, b], &[1.5, -0.5]), Err(Error::OffSimplex(_))));
    }

    #[test]
    fn invalid_generators() {
        assert!(RearrangementClass::new(Field::zeros(3)).is_err());
        assert!(RearrangementClass::new(Field::new(vec![1.0, -1.0])).is_err());
        assert!(RearrangementClass::binary(10, 0.0).is_err());
        assert_eq!(RearrangementClass::binary(8, 0.5).unwrap().count(), 70);
        let ramp = RearrangementClass::linear_ramp(5, 0.0, 1.0).unwrap();
        assert_eq!(ramp.sorted_values(), &[1.0, 0.75, 0.5, 0.25, 0.0]);
    }

    fn arb_case() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (2usize..9).prop_flat_map(|n| {
            (
                prop::collection::vec(prop::sample::select(vec![0.0, 0.5, 1.0, 2.0]), n),
                prop::collection::vec(-3i32..3, n).prop_map(|v| v.into_iter().map(f64::from).collect()),
            )
        })
    }

    proptest! {
        #[test]
        fn maximizer_is_optimal_member_and_comonotone((gen, w) in arb_case()) {
            prop_assume!(gen.iter().any(|&v| v > 0.0));
            let c = RearrangementClass::new(Field::new(gen)).unwrap();
            let w = Field::new(w);
            let g = maximize_linear(&c, &w).unwrap();
            prop_assert!(c.contains(&g));
            prop_assert!(is_comonotone(&g, &w, 1e-12));
            for t in c.sorted_values() {
                let above = |f: &[f64]| f.iter().filter(|&&v| v > *t).count();
                prop_assert_eq!(above(&g), above(c.generator()));
            }
            let best = g.dot(&w);
            for m in c.enumerate(DEFAULT_ENUMERATION_CAP).unwrap() {
                prop_assert!(m.dot(&w) <= best);
            }
        }

        #[test]
        fn maximizer_dominates_mixtures((gen, w) in arb_case(), seed in 0u64..1000) {
            prop_assume!(gen.iter().any(|&v| v > 0.0));
            let c = RearrangementClass::new(Field::new(gen)).unwrap();
            let w = Field::new(w);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let members: Vec<Field> = (0..3).map(|_| c.random_member(&mut rng)).collect();
            let raw: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..1.0) + 1e-3).collect();
            let s: f64 = raw.iter().sum();
            let mut theta: Vec<f64> = raw.iter().map(|t| t / s).collect();
            theta[2] = 1.0 - theta[0] - theta[1];
            let m = mixture(&c, &members, &theta).unwrap();
            let g = maximize_linear(&c, &w).unwrap();
            let combo: f64 = members.iter().zip(&theta).map(|(f, t)| t * f.dot(&w)).sum();
            prop_assert!((m.values.dot(&w) - combo).abs() <= 1e-12 * (1.0 + combo.abs()));
            prop_assert!(g.dot(&w) >= m.values.dot(&w) - 1e-12);
        }
    }
}
