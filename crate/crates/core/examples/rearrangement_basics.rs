//! Rearrangement classes: membership, the sorting maximizer, comonotonicity,
//! enumeration and convex mixtures.

use fraclap::rearrange::{is_comonotone, linear_objective, maximize_linear, mixture, DEFAULT_ENUMERATION_CAP};
use fraclap::{Field, RearrangementClass};

fn main() -> fraclap::Result<()> {
    let class = RearrangementClass::new(Field::new(vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0]))?;
    let w = Field::new(vec![0.3, -1.0, 2.0, 0.7, 0.0, 1.1]);

    let best = maximize_linear(&class, &w)?;
    println!("maximizer of sum g w: {:?}", best.values());
    println!("comonotone with w: {}", is_comonotone(&best, &w, 1e-12));

    let members: Vec<Field> = class.enumerate(DEFAULT_ENUMERATION_CAP)?.collect();
    let brute = members.iter().map(|g| linear_objective(g, &w, 1.0)).fold(f64::NEG_INFINITY, f64::max);
    println!("{} members, brute-force max {brute}, sorting gives {}", members.len(), linear_objective(&best, &w, 1.0));

    let m = mixture(&class, &members[..2], &[0.5, 0.5])?;
    println!("mixture {:?} is strictly inside the closure: {}", m.values.values(), m.strict);

    let big = RearrangementClass::linear_ramp(12, 0.0, 1.0)?;
    match big.enumerate(DEFAULT_ENUMERATION_CAP) {
        Ok(_) => println!("enumerable"),
        Err(e) => println!("ramp on 12 cells: {e}"),
    }
    Ok(())
}
