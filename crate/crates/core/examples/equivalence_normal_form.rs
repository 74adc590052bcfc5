// Cancels the shared part of both sides of a preparation equivalence.

use bellctx::mapping::{single_equivalence_normal_form, NormalForm};
use bellctx::model::io::equivalence_to_value;
use bellctx::model::{PrepLabel, PreparationEquivalence};
use bellctx::Rational;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let side = |terms: &[(usize, i64, i64)]| {
        terms
            .iter()
            .map(|&(n, a, b)| (PrepLabel::Plain(n), Rational::frac(a, b)))
            .collect()
    };
    let eq = PreparationEquivalence::new(
        side(&[(1, 1, 2), (2, 1, 2)]),
        side(&[(1, 1, 3), (3, 1, 3), (4, 1, 3)]),
    )?;
    let NormalForm::Reduced(nf) = single_equivalence_normal_form(&eq) else {
        return Err("equivalence should not be vacuous".into());
    };
    println!("{}", equivalence_to_value(&eq));
    println!("{}", equivalence_to_value(&nf));

    let expected = PreparationEquivalence::new(
        side(&[(1, 1, 4), (2, 3, 4)]),
        side(&[(3, 1, 2), (4, 1, 2)]),
    )?;
    if nf != expected {
        return Err("unexpected normal form".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
