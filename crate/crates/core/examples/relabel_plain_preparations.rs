// A scenario written with plain labels is recognised as the image of a Bell
// correlation once its decompositions are read as Alice's inputs.

use bellctx::mapping::{ctx_to_bell, relabel_as_outcomes};
use bellctx::model::{check_no_signalling, CtxBehaviour, CtxScenario, PrepLabel, PreparationEquivalence};
use bellctx::Rational;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mix = |terms: &[(usize, i64, i64)]| {
        terms
            .iter()
            .map(|&(n, a, b)| (PrepLabel::Plain(n), Rational::frac(a, b)))
            .collect()
    };
    // Five preparations in three decompositions of one hypothetical preparation.
    let d1 = mix(&[(1, 1, 2), (2, 1, 4), (3, 1, 4)]);
    let d2 = mix(&[(4, 1, 3), (5, 2, 3)]);
    let eqs = vec![PreparationEquivalence::new(d1, d2)?];
    let s = CtxScenario::new((1..=5).map(PrepLabel::Plain).collect(), vec![2], eqs, None)?;
    // Bob's response: the averages of both decompositions agree at 1/2.
    let rows = [(1, 2), (1, 4), (3, 4), (1, 2), (1, 2)];
    let q = CtxBehaviour::from_fn(s, |l, _, b| {
        let PrepLabel::Plain(n) = *l else { unreachable!() };
        let (num, den) = rows[n - 1];
        let first = Rational::frac(num, den);
        if b == 1 { first } else { Rational::one() - first }
    })?;

    let (relabelled, names) = relabel_as_outcomes(&q)?;
    for (new, old) in &names {
        println!("{old} -> {new}");
    }
    let p = ctx_to_bell(&relabelled, &[3, 2])?;
    println!("no-signalling: {}", check_no_signalling(&p).no_signalling);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
