use crate::model::{marginals, BellCorrelation, ModelError};
use crate::rational::Rational;

use super::MappingError;

/// p^int(a,b|x,y) = p_A(a|x) / B_y: Alice's marginal with Bob uniform.
pub fn interior_point(p: &BellCorrelation) -> Result<BellCorrelation, MappingError> {
    let m = marginals(p);
    if !m.alice_well_defined {
        return Err(MappingError::SignallingInput(
            crate::model::check_no_signalling(p).max_residual,
        ));
    }
    let s = p.scenario();
    let q = BellCorrelation::from_fn(s.clone(), |a, _, x, y| {
        m.alice(a, x) * Rational::frac(1, s.outcomes_b()[y - 1] as i64)
    })?;
    Ok(q)
}

/// pⁿ = (1/n)·p^int + (1 − 1/n)·p. Requires every p_A(a|x) > 0.
pub fn interior_blend(p: &BellCorrelation, n: u64) -> Result<BellCorrelation, MappingError> {
    if n == 0 {
        return Err(MappingError::ZeroBlend);
    }
    let m = marginals(p);
    for (i, row) in m.alice.iter().enumerate() {
        if let Some(j) = row.iter().position(Rational::is_zero) {
            return Err(MappingError::ZeroMarginal { a: j + 1, x: i + 1 });
        }
    }
    let interior = interior_point(p)?;
    let w = Rational::from_parts(1.into(), n.into()).map_err(ModelError::from)?;
    Ok(interior.mix(p, &w)?)
}
