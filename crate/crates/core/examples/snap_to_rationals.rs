// Hands a quantum table to the exact modules by snapping to simple rationals.

use bellctx::quantum::{
    binary_povm, real_matrix, realisation_to_tables, snap, snap_correlation, CVector,
    QuantumBellRealisation, TOLERANCE,
};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("0.1 + 0.2 snaps to {:?}", snap(0.1 + 0.2, 1_000_000, 1e-9));

    // Singlet with both parties measuring Z: perfectly anticorrelated.
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let c = |v: f64| bellctx::quantum::c(v, 0.0);
    let psi = CVector::from_vec(vec![c(0.0), c(s), c(-s), c(0.0)]);
    let z = real_matrix(2, &[1.0, 0.0, 0.0, -1.0]);
    let r = QuantumBellRealisation::from_pure(&psi, 2, 2, vec![binary_povm(&z)], vec![binary_povm(&z)]);
    let tables = realisation_to_tables(&r, TOLERANCE)?;
    let p = snap_correlation(&tables, 1_000_000, TOLERANCE).ok_or("table should snap")?;
    println!("{:?}", p.table().iter().map(ToString::to_string).collect::<Vec<_>>());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
