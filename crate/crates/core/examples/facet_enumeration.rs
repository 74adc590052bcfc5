// Facets of the non-contextual polytope of a five-preparation scenario.

use bellctx::fixtures;
use bellctx::geometry::{nc_polytope, Budget};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let s = fixtures::scenario_h();
    let poly = nc_polytope(&s, &Budget::default())?;
    let positivity = poly.positivity_facets(&s);
    println!(
        "{} vertices, {} facets ({} positivity), dimension {}",
        poly.vertices.len(),
        poly.facets.len(),
        positivity.len(),
        poly.dimension
    );
    let names = poly.coordinate_names(&s);
    for (i, f) in poly.facets.iter().enumerate().filter(|(i, _)| !positivity.contains(i)).take(5) {
        let terms: Vec<String> = f
            .coefficients
            .iter()
            .zip(&names)
            .filter(|(c, _)| c.sign() != num_bigint::Sign::NoSign)
            .map(|(c, n)| format!("{c}*{n}"))
            .collect();
        println!("facet {i}: {} + {} >= 0", f.constant, terms.join(" + "));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
