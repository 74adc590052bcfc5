// A contextual behaviour that becomes non-contextual once its repeated
// preparations are cloned.

use bellctx::fixtures;
use bellctx::geometry::{check_noncontextual, verify_noncontextual, Budget, NcVerdict};
use bellctx::mapping::embed_repeated_preparations;
use bellctx::Rational;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let budget = Budget::default();
    let q = fixtures::q_c();
    let verdict = check_noncontextual(&q, &budget)?;
    let NcVerdict::Contextual { inequality, violation } = &verdict else {
        return Err("q_c should be contextual".into());
    };
    println!("violation {violation}, constant {}", inequality.constant);
    if *violation != Rational::frac(1, 40) {
        return Err("unexpected violation".into());
    }

    let embedded = embed_repeated_preparations(&q)?.behaviour;
    let verdict = check_noncontextual(&embedded, &budget)?;
    println!("after cloning: member = {}", verdict.is_member());
    let report = verify_noncontextual(&embedded, &verdict, &budget)?;
    println!("model verified: {} {:?}", report.valid(), report.checks);

    let reference = NcVerdict::NonContextual(fixtures::q_c_prime_model());
    let report = verify_noncontextual(&embedded, &reference, &budget)?;
    println!("reference model verified: {}", report.valid());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
