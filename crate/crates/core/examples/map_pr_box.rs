// Maps the PR box to a prepare-and-measure behaviour and back.

use bellctx::mapping::{bell_to_ctx, ctx_to_bell};
use bellctx::model::io::emit_behaviour;
use bellctx::model::pr_box;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = pr_box();
    let mapped = bell_to_ctx(&p)?;
    println!("index_A = {:?}", mapped.index_a);
    println!("{}", emit_behaviour(&mapped.behaviour));

    let back = ctx_to_bell(&mapped.behaviour, &mapped.index_a)?;
    if back != p {
        return Err("unmapping did not reproduce the PR box".into());
    }
    println!("round trip reproduces the PR box exactly");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
