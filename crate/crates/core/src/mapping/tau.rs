use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{check_no_signalling, marginals, BellCorrelation, BellScenario};
use crate::rational::Rational;

use super::MappingError;

/// Bookkeeping that lets [`embed_bell`] undo [`reduce_tau`].
///
/// Reduced input `x′` is original input `kept_inputs[x′-1]`. For each kept
/// input, `outcome_permutations[x′-1][a′-1]` is the original outcome placed at
/// reduced position `a′`; positions beyond `reduced_a[x′-1]` hold the
/// zero-marginal outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelabellingRecord {
    pub original_a: Vec<usize>,
    pub reduced_a: Vec<usize>,
    pub outcomes_b: Vec<usize>,
    pub kept_inputs: Vec<usize>,
    /// Removed input x ↦ the outcome Alice obtains with certainty.
    pub removed_inputs: BTreeMap<usize, usize>,
    pub outcome_permutations: Vec<Vec<usize>>,
}

impl RelabellingRecord {
    pub fn identity(scenario: &BellScenario) -> Self {
        let a = scenario.outcomes_a().to_vec();
        RelabellingRecord {
            outcome_permutations: a.iter().map(|&n| (1..=n).collect()).collect(),
            kept_inputs: (1..=a.len()).collect(),
            reduced_a: a.clone(),
            original_a: a,
            outcomes_b: scenario.outcomes_b().to_vec(),
            removed_inputs: BTreeMap::new(),
        }
    }

    /// Embedding of the scenario with Alice outcomes `reduced_a` into a larger
    /// one with `target_a`: inputs keep their index, new outcomes get
    /// probability zero, and each extra input yields outcome 1 with certainty.
    pub fn padding(
        reduced_a: &[usize],
        target_a: &[usize],
        outcomes_b: &[usize],
    ) -> Result<Self, MappingError> {
        if target_a.len() < reduced_a.len() {
            return Err(MappingError::ShapeMismatch(format!(
                "target has {} inputs, fewer than {}",
                target_a.len(),
                reduced_a.len()
            )));
        }
        if let Some(x) = (0..reduced_a.len()).find(|&i| target_a[i] < reduced_a[i]) {
            return Err(MappingError::IndexTooSmall {
                x: x + 1,
                given: target_a[x],
                needed: reduced_a[x],
            });
        }
        Ok(RelabellingRecord {
            original_a: target_a.to_vec(),
            reduced_a: reduced_a.to_vec(),
            outcomes_b: outcomes_b.to_vec(),
            kept_inputs: (1..=reduced_a.len()).collect(),
            removed_inputs: (reduced_a.len() + 1..=target_a.len()).map(|x| (x, 1)).collect(),
            outcome_permutations: target_a[..reduced_a.len()]
                .iter()
                .map(|&n| (1..=n).collect())
                .collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.removed_inputs.is_empty()
            && self.original_a == self.reduced_a
            && self
                .outcome_permutations
                .iter()
                .all(|perm| perm.iter().enumerate().all(|(i, &a)| a == i + 1))
    }

    /// True when every input was removed, so no reduced correlation exists.
    pub fn is_fully_deterministic(&self) -> bool {
        self.kept_inputs.is_empty()
    }
}

/// τ: removes deterministic Alice inputs and zero-probability outcomes.
///
/// Surviving outcomes keep their relative order.
pub fn reduce_tau(p: &BellCorrelation) -> Result<(BellCorrelation, RelabellingRecord), MappingError> {
    let ns = check_no_signalling(p);
    if !ns.no_signalling {
        return Err(MappingError::SignallingInput(ns.max_residual));
    }
    let s = p.scenario();
    let m = marginals(p);
    let mut record = RelabellingRecord {
        original_a: s.outcomes_a().to_vec(),
        reduced_a: Vec::new(),
        outcomes_b: s.outcomes_b().to_vec(),
        kept_inputs: Vec::new(),
        removed_inputs: BTreeMap::new(),
        outcome_permutations: Vec::new(),
    };
    for (i, support) in m.alice_support().into_iter().enumerate() {
        let x = i + 1;
        if support.len() == 1 {
            record.removed_inputs.insert(x, support[0]);
            continue;
        }
        let mut perm = support.clone();
        perm.extend((1..=s.outcomes_a()[i]).filter(|a| !support.contains(a)));
        record.kept_inputs.push(x);
        record.reduced_a.push(support.len());
        record.outcome_permutations.push(perm);
    }
    if record.is_fully_deterministic() {
        return Err(MappingError::FullyDeterministic(Box::new(record)));
    }
    let reduced = BellScenario::new(record.reduced_a.clone(), s.outcomes_b().to_vec())?;
    let q = BellCorrelation::from_fn(reduced, |a, b, x, y| {
        p.get(record.outcome_permutations[x - 1][a - 1], b, record.kept_inputs[x - 1], y)
            .clone()
    })?;
    Ok((q, record))
}

/// Inverse of [`reduce_tau`] relative to `record`.
///
/// A restored deterministic input with certain outcome `c` gets
/// p(c,b|x,y) = p_B(b|y), read off the reduced correlation.
pub fn embed_bell(
    reduced: &BellCorrelation,
    record: &RelabellingRecord,
) -> Result<BellCorrelation, MappingError> {
    let s = reduced.scenario();
    if s.outcomes_a() != record.reduced_a.as_slice() || s.outcomes_b() != record.outcomes_b.as_slice()
    {
        return Err(MappingError::ShapeMismatch(format!(
            "correlation has A = {:?}, B = {:?}; record expects A = {:?}, B = {:?}",
            s.outcomes_a(),
            s.outcomes_b(),
            record.reduced_a,
            record.outcomes_b
        )));
    }
    let ns = check_no_signalling(reduced);
    if !ns.no_signalling {
        return Err(MappingError::SignallingInput(ns.max_residual));
    }
    let bob = marginals(reduced).bob;
    // original input x ↦ (reduced input, original outcome ↦ reduced outcome)
    let mut kept: BTreeMap<usize, (usize, BTreeMap<usize, usize>)> = BTreeMap::new();
    for (i, (&x, perm)) in record
        .kept_inputs
        .iter()
        .zip(&record.outcome_permutations)
        .enumerate()
    {
        let inverse = perm
            .iter()
            .take(record.reduced_a[i])
            .enumerate()
            .map(|(j, &a)| (a, j + 1))
            .collect();
        kept.insert(x, (i + 1, inverse));
    }
    let full = BellScenario::new(record.original_a.clone(), record.outcomes_b.clone())?;
    let p = BellCorrelation::from_fn(full, |a, b, x, y| {
        if let Some(&c) = record.removed_inputs.get(&x) {
            return if a == c { bob[y - 1][b - 1].clone() } else { Rational::zero() };
        }
        let (xr, inverse) = &kept[&x];
        match inverse.get(&a) {
            Some(&ar) => reduced.get(ar, b, *xr, y).clone(),
            None => Rational::zero(),
        }
    })?;
    Ok(p)
}
