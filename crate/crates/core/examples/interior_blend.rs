// Mixes a correlation with the product of its Alice marginal and uniform Bob.

use bellctx::geometry::{check_local, Budget};
use bellctx::mapping::{interior_blend, interior_point};
use bellctx::model::pr_box;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = pr_box();
    println!("interior point: {:?}", interior_point(&p)?.table());
    for n in 1..=5 {
        let blended = interior_blend(&p, n)?;
        let local = check_local(&blended, &Budget::default())?.is_member();
        println!("n = {n}: local = {local}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
