// Writes a non-contextuality certificate, reads it back, and shows that a
// tampered copy is rejected with a located defect.

use bellctx::fixtures;
use bellctx::geometry::io::{emit, nc_verdict_from_value, nc_verdict_to_value};
use bellctx::geometry::{check_noncontextual, verify_noncontextual, Budget};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let budget = Budget::default();
    let q = fixtures::q_c();
    let verdict = check_noncontextual(&q, &budget)?;
    let text = emit(&nc_verdict_to_value(q.scenario(), &verdict));
    println!("{text}");

    let parsed = nc_verdict_from_value(&serde_json::from_str(&text)?, q.scenario())?;
    println!("re-verified: {}", verify_noncontextual(&q, &parsed, &budget)?.valid());

    let tampered = text.replace("\"violation\": \"1/40\"", "\"violation\": \"1/20\"");
    let parsed = nc_verdict_from_value(&serde_json::from_str(&tampered)?, q.scenario())?;
    let report = verify_noncontextual(&q, &parsed, &budget)?;
    println!("tampered copy valid: {}; defects {:?}", report.valid(), report.defects);
    if report.valid() {
        return Err("tampered certificate was accepted".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
