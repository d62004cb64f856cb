mod common;

use common::*;
use fraclap::dirichlet::{ReactionSpec, SolveOptions};
use fraclap::eigen::{principal_eigen, EigenOptions};
use fraclap::optimize::{maximize_energy, minimize_eigenvalue, phi_eigen, AlternatingOptions, Termination};
use fraclap::rearrange::{is_comonotone, maximize_linear};
use fraclap::{Field, RearrangementClass};

#[test]
fn singleton_class_is_a_fixed_point() {
    let a = line(12, 2.0, 0.4);
    let class = RearrangementClass::new(Field::constant(12, 0.7)).unwrap();
    let t = minimize_eigenvalue(&a, &class, &AlternatingOptions { restarts: 0, ..Default::default() }, &EigenOptions::default())
        .unwrap();
    assert_eq!(t.terminated_by, Termination::FixedPoint);
    let direct = principal_eigen(&a, &Field::constant(12, 0.7), &EigenOptions::default()).unwrap();
    assert!(rel(t.best().lambda.unwrap(), direct.lambda) < 1e-10);
}

#[test]
fn eigen_trace_is_monotone_for_every_restart_seed() {
    let a = line(48, 3.0, 0.3);
    let class = RearrangementClass::linear_ramp(48, 0.0, 1.0).unwrap();
    for seed in 0..3 {
        let opts = AlternatingOptions { restarts: 2, seed, ..Default::default() };
        let t = minimize_eigenvalue(&a, &class, &opts, &EigenOptions::default()).unwrap();
        let phis: Vec<f64> = t.iterations.iter().map(|r| r.phi).collect();
        assert!(phis.windows(2).all(|w| w[1] >= w[0]), "{phis:?}");
        let best = t.best();
        assert!(class.contains(&best.g));
        assert!(t.failed_restarts.is_empty());
        // the final weight is the linear maximizer for its own derivative field
        assert_eq!(maximize_linear(&class, &t.w).unwrap(), best.g);
    }
}

#[test]
fn optimum_beats_generator_and_random_members() {
    use rand::SeedableRng;
    let a = line(32, 2.0, 0.4);
    let class = RearrangementClass::binary(32, 0.25).unwrap();
    let t = minimize_eigenvalue(&a, &class, &AlternatingOptions { seed: 1, ..Default::default() }, &EigenOptions::default())
        .unwrap();
    let best = t.best().phi;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    for _ in 0..30 {
        let g = class.random_member(&mut rng);
        assert!(phi_eigen(&a, &g, &EigenOptions::default()).unwrap() <= best * (1.0 + 1e-12));
    }
}

#[test]
fn energy_optimum_is_comonotone_with_state() {
    let a = line(40, 3.0, 0.3);
    let class = RearrangementClass::linear_ramp(40, 0.0, 2.0).unwrap();
    let reaction = ReactionSpec::constant(40, 0.5, 2.0);
    let opts = AlternatingOptions { restarts: 2, seed: 4, ..Default::default() };
    let t = maximize_energy(&a, &class, &reaction, &opts, &SolveOptions::default()).unwrap();
    assert!(is_comonotone(&t.best().g, &t.u, 1e-9));
    assert!(t.best().lambda.is_none());
    let phis: Vec<f64> = t.iterations.iter().map(|r| r.phi).collect();
    assert!(phis.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn trace_csv_layout() {
    let a = line(8, 2.0, 0.4);
    let class = RearrangementClass::binary(8, 0.5).unwrap();
    let t = minimize_eigenvalue(&a, &class, &AlternatingOptions { restarts: 0, ..Default::default() }, &EigenOptions::default())
        .unwrap();
    let mut buf = Vec::new();
    t.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,lambda,phi,eigen_iterations,eigen_residual"));
    assert_eq!(lines.count(), t.iterations.len());
}
