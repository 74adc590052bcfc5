// Deterministic vertices of a non-contextual polytope, and the same vertex
// set recovered from its facets.

use bellctx::fixtures;
use bellctx::geometry::polytope::vertices_from_facets;
use bellctx::geometry::{nc_polytope, nc_vertices, Budget};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let budget = Budget::default();
    let s = fixtures::scenario_h();
    let tables = nc_vertices(&s, &budget)?;
    println!("{} vertex tables of length {}", tables.len(), s.table_len());

    let poly = nc_polytope(&s, &budget)?;
    let recovered = vertices_from_facets(&poly, &budget)?;
    println!("recovered {} vertices from {} facets", recovered.len(), poly.facets.len());
    if recovered != poly.vertices {
        return Err("facet description does not reproduce the vertices".into());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
