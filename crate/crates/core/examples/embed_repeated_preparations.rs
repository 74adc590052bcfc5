// Rewrites three decompositions that share preparations into a scenario
// where every preparation appears once, cloning the shared ones.

use bellctx::fixtures;
use bellctx::mapping::embed_repeated_preparations;
use bellctx::model::io::equivalence_to_value;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let q = fixtures::q_c();
    let e = embed_repeated_preparations(&q)?;
    for (clone, original) in &e.clones {
        println!("P{clone} copies P{original}");
    }
    for eq in e.behaviour.scenario().equivalences() {
        println!("{}", equivalence_to_value(eq));
    }
    if e.behaviour != fixtures::q_c_prime() {
        return Err("embedding differs from the reference behaviour".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
