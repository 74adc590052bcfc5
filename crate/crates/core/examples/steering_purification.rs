// Bob's assemblage from the Tsirelson realisation, then a purification and
// POVMs for Alice that steer Bob to the same assemblage.

use bellctx::quantum::{
    assemblage_from_bell, chsh_value, hjw_construct, realisation_to_tables, tsirelson_realisation,
    verify_steering, TOLERANCE,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let r = tsirelson_realisation();
    let source = realisation_to_tables(&r, TOLERANCE)?;
    println!("CHSH = {:.10}", chsh_value(&source).unwrap_or(f64::NAN));

    let (asm, _) = assemblage_from_bell(&r, TOLERANCE)?;
    let h = hjw_construct(&asm, TOLERANCE)?;
    let res = verify_steering(&h, &asm)?;
    println!("rank {}, residuals {res:?}", h.r);

    let rebuilt = realisation_to_tables(&h.with_bob(r.n.clone()), TOLERANCE)?;
    let diff = rebuilt.max_difference(&source);
    println!("largest table difference {diff:e}");
    if diff > 1e-9 {
        return Err("rebuilt correlation differs".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
