use crate::model::BellScenario;

use super::{kron, QuantumBellRealisation, QuantumError};

/// A correlation table in floating point, laid out like `BellCorrelation`.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatCorrelation {
    pub scenario: BellScenario,
    pub table: Vec<f64>,
}

impl FloatCorrelation {
    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.table[self.scenario.index(a, b, x, y)]
    }

    /// Largest entrywise difference; infinite when the scenarios differ.
    pub fn max_difference(&self, other: &FloatCorrelation) -> f64 {
        if self.scenario != other.scenario {
            return f64::INFINITY;
        }
        self.table
            .iter()
            .zip(&other.table)
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max)
    }
}

/// p(a,b|x,y) = Tr((M^x_a ⊗ N^y_b) ρ).
pub fn realisation_to_tables(
    r: &QuantumBellRealisation,
    tol: f64,
) -> Result<FloatCorrelation, QuantumError> {
    r.validate(tol)?;
    let scenario = BellScenario::new(
        r.m.iter().map(Vec::len).collect(),
        r.n.iter().map(Vec::len).collect(),
    )
    .map_err(|e| QuantumError::InvalidRealisation(e.to_string()))?;
    let table = scenario
        .cells()
        .map(|(a, b, x, y)| (kron(&r.m[x - 1][a - 1], &r.n[y - 1][b - 1]) * &r.rho).trace().re)
        .collect();
    Ok(FloatCorrelation { scenario, table })
}

/// |E11 + E12 + E21 − E22| for a two-outcome, two-input table.
pub fn chsh_value(p: &FloatCorrelation) -> Option<f64> {
    let s = &p.scenario;
    if s.outcomes_a() != [2, 2] || s.outcomes_b() != [2, 2] {
        return None;
    }
    let e = |x, y| {
        p.get(1, 1, x, y) + p.get(2, 2, x, y) - p.get(1, 2, x, y) - p.get(2, 1, x, y)
    };
    Some((e(1, 1) + e(1, 2) + e(2, 1) - e(2, 2)).abs())
}
