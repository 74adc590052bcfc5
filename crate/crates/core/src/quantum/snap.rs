use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::model::BellCorrelation;
use crate::rational::Rational;

use super::tables::FloatCorrelation;

/// The simplest rational (smallest denominator) within `tol` of `x`, if its
/// denominator is at most `max_den`.
pub fn snap(x: f64, max_den: u64, tol: f64) -> Option<Rational> {
    if !x.is_finite() || !tol.is_finite() || tol < 0.0 || max_den == 0 {
        return None;
    }
    let lo = BigRational::from_float(x - tol)?;
    let hi = BigRational::from_float(x + tol)?;
    let r = simplest_between(&lo, &hi);
    if r.denom() > &BigInt::from(max_den) {
        return None;
    }
    Some(Rational::from_big(r))
}

/// Simplest rational in the closed interval [lo, hi], lo ≤ hi.
fn simplest_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    if lo.is_positive() {
        simplest_positive(lo, hi)
    } else if hi.is_negative() {
        -simplest_positive(&-hi, &-lo)
    } else {
        BigRational::zero()
    }
}

fn simplest_positive(lo: &BigRational, hi: &BigRational) -> BigRational {
    let c = lo.ceil();
    if &c <= hi {
        return c;
    }
    // No integer inside: lo and hi share the integer part n.
    let n = lo.floor();
    let inner = simplest_positive(&(hi - &n).recip(), &(lo - &n).recip());
    n + inner.recip()
}

/// Snaps every entry; `None` if any entry fails.
pub fn snap_table(values: &[f64], max_den: u64, tol: f64) -> Option<Vec<Rational>> {
    values.iter().map(|&v| snap(v, max_den, tol)).collect()
}

/// Exact correlation from a float table, when every entry snaps and the
/// snapped table is normalised and nonnegative.
pub fn snap_correlation(
    p: &FloatCorrelation,
    max_den: u64,
    tol: f64,
) -> Option<BellCorrelation> {
    let table = snap_table(&p.table, max_den, tol)?;
    BellCorrelation::new(p.scenario.clone(), table).ok()
}
