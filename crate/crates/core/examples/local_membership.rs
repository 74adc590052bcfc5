// Local-polytope membership with certificates, for a local mixture and for
// the PR box.

use bellctx::geometry::io::{emit, local_verdict_to_value};
use bellctx::geometry::{check_local, verify_local, Budget, LocalVerdict};
use bellctx::model::{deterministic, pr_box, BellScenario};
use bellctx::Rational;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let budget = Budget::default();
    let s = BellScenario::new(vec![2, 2], vec![2, 2])?;
    let d1 = deterministic(&s, &[1, 2], &[1, 1])?;
    let d2 = deterministic(&s, &[2, 2], &[1, 2])?;
    let mixture = d1.mix(&d2, &Rational::frac(1, 3))?;

    let verdict = check_local(&mixture, &budget)?;
    println!("mixture local: {}", verdict.is_member());
    println!("{}", emit(&local_verdict_to_value(&verdict)));

    let pr = pr_box();
    let verdict = check_local(&pr, &budget)?;
    if let LocalVerdict::Nonlocal { inequality, violation } = &verdict {
        println!("PR box violates an inequality with constant {} by {violation}", inequality.constant);
    }
    let report = verify_local(&pr, &verdict, &budget)?;
    println!("certificate valid: {}, checks {:?}", report.valid(), report.checks);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
