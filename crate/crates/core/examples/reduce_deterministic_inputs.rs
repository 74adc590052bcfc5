// Strips a deterministic input and a zero-probability outcome from Alice,
// then restores them from the relabelling record.

use bellctx::mapping::{embed_bell, reduce_tau};
use bellctx::model::{deterministic, pr_box, BellCorrelation, BellScenario};
use bellctx::Rational;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // Alice has three inputs: the PR box on x = 1, 2 with an unused third
    // outcome, and a third input whose outcome is always 2.
    let s = BellScenario::new(vec![3, 3, 2], vec![2, 2])?;
    let pr = pr_box();
    let p = BellCorrelation::from_fn(s.clone(), |a, b, x, y| match x {
        1 | 2 if a <= 2 => pr.get(a, b, x, y).clone(),
        3 if a == 2 => Rational::frac(1, 2),
        _ => Rational::zero(),
    })?;

    let (reduced, record) = reduce_tau(&p)?;
    println!("A = {:?} -> {:?}", record.original_a, record.reduced_a);
    println!("removed inputs: {:?}", record.removed_inputs);
    if reduced != pr {
        return Err("reduction should leave exactly the PR box".into());
    }
    if embed_bell(&reduced, &record)? != p {
        return Err("embedding did not restore the original correlation".into());
    }

    // A product of deterministic strategies has nothing left after reduction.
    let d = deterministic(&BellScenario::new(vec![2, 2], vec![2])?, &[1, 2], &[1])?;
    println!("deterministic input reduces to nothing: {}", reduce_tau(&d).is_err());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
