use std::collections::{BTreeMap, BTreeSet};

use crate::model::{CtxBehaviour, CtxScenario, Mixture, PrepLabel, PreparationEquivalence};
use crate::rational::Rational;

use super::MappingError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalForm {
    /// Both sides have disjoint supports and sum to one.
    Reduced(PreparationEquivalence),
    /// The two sides were identical; the equivalence constrains nothing.
    Vacuous,
}

/// Subtracts the shared part min(α_l, β_l) of every label from both sides and
/// rescales by the remaining mass.
pub fn single_equivalence_normal_form(eq: &PreparationEquivalence) -> NormalForm {
    let decompositions = [eq.lhs().clone(), eq.rhs().clone()];
    match strip_common(&decompositions) {
        None => NormalForm::Vacuous,
        Some((mut sides, _)) => {
            let rhs = sides.pop().expect("two sides");
            let lhs = sides.pop().expect("two sides");
            NormalForm::Reduced(
                PreparationEquivalence::new(lhs, rhs).expect("renormalised sides are valid"),
            )
        }
    }
}

/// Removes Σ_l min_k c_k(l)·P_l from every decomposition and renormalises.
/// Returns `None` when nothing is left, i.e. all decompositions coincide.
fn strip_common(decompositions: &[Mixture]) -> Option<(Vec<Mixture>, Rational)> {
    let labels: BTreeSet<PrepLabel> = decompositions.iter().flat_map(|d| d.keys().copied()).collect();
    let zero = Rational::zero();
    let common: BTreeMap<PrepLabel, Rational> = labels
        .iter()
        .map(|l| {
            let min = decompositions
                .iter()
                .map(|d| d.get(l).unwrap_or(&zero))
                .min()
                .expect("at least one decomposition")
                .clone();
            (*l, min)
        })
        .collect();
    let mass = Rational::one() - common.values().sum::<Rational>();
    if mass.is_zero() {
        return None;
    }
    let scale = mass.recip().expect("nonzero mass");
    let out = decompositions
        .iter()
        .map(|d| {
            d.iter()
                .filter_map(|(l, c)| {
                    let rest = c - &common[l];
                    (!rest.is_zero()).then(|| (*l, rest * &scale))
                })
                .collect()
        })
        .collect();
    Some((out, mass))
}

/// Result of [`embed_repeated_preparations`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepeatedPrepEmbedding {
    /// Behaviour in the enlarged scenario, whose equivalences are anchored at
    /// the first decomposition and use every label at most once.
    pub behaviour: CtxBehaviour,
    /// Clone label ↦ the original preparation it copies.
    pub clones: BTreeMap<PrepLabel, PrepLabel>,
    /// The decompositions after subtraction and cloning, in order.
    pub decompositions: Vec<Mixture>,
}

/// Rewrites equivalences that decompose one hypothetical preparation in
/// several ways into NS form: the per-label minimum across decompositions is
/// removed, then labels still shared by several decompositions are cloned.
///
/// The first decomposition keeps the original label. Clones are numbered
/// from one past max(largest plain label, number of preparations), in
/// decomposition order and then label order.
pub fn embed_repeated_preparations(
    q: &CtxBehaviour,
) -> Result<RepeatedPrepEmbedding, MappingError> {
    let s = q.scenario();
    let mut decompositions: Vec<Mixture> = Vec::new();
    let mut edges = Vec::new();
    for eq in s.equivalences() {
        let mut idx = |m: &Mixture| match decompositions.iter().position(|d| d == m) {
            Some(i) => i,
            None => {
                decompositions.push(m.clone());
                decompositions.len() - 1
            }
        };
        let i = idx(eq.lhs());
        let j = idx(eq.rhs());
        edges.push((i, j));
    }
    if !chained(decompositions.len(), &edges) {
        return Err(MappingError::NotOneHypotheticalForm(
            "equivalences split into unrelated groups".into(),
        ));
    }
    let stripped = if decompositions.len() < 2 {
        Vec::new()
    } else {
        match strip_common(&decompositions) {
            Some((d, _)) => d,
            None => Vec::new(),
        }
    };

    let mut next = s
        .preps()
        .iter()
        .map(|l| match l {
            PrepLabel::Plain(n) => *n,
            PrepLabel::Outcome { .. } => 0,
        })
        .max()
        .unwrap_or(0)
        .max(s.num_preps())
        + 1;
    let mut used = BTreeSet::new();
    let mut clones = BTreeMap::new();
    let mut renamed: Vec<Mixture> = Vec::new();
    for d in &stripped {
        let mut out = Mixture::new();
        for (l, c) in d {
            let label = if used.insert(*l) {
                *l
            } else {
                let fresh = PrepLabel::Plain(next);
                next += 1;
                clones.insert(fresh, *l);
                fresh
            };
            out.insert(label, c.clone());
        }
        renamed.push(out);
    }

    let equivalences = match renamed.split_first() {
        Some((first, rest)) => rest
            .iter()
            .map(|d| PreparationEquivalence::new(first.clone(), d.clone()))
            .collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    let mut preps = s.preps().to_vec();
    preps.extend(clones.keys().copied());
    let scenario = CtxScenario::new(preps, s.outcomes_b().to_vec(), equivalences, None)?;
    let behaviour = CtxBehaviour::from_fn(scenario, |l, y, b| {
        let source = clones.get(l).unwrap_or(l);
        q.get(source, y, b).expect("source label exists").clone()
    })?;
    Ok(RepeatedPrepEmbedding {
        behaviour,
        clones,
        decompositions: renamed,
    })
}

fn chained(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 0 {
        return true;
    }
    let mut reached = vec![false; n];
    reached[0] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for &(i, j) in edges {
            if reached[i] != reached[j] {
                reached[i] = true;
                reached[j] = true;
                changed = true;
            }
        }
    }
    reached.into_iter().all(|r| r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::equivalence_residual;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    fn p(n: usize) -> PrepLabel {
        PrepLabel::Plain(n)
    }

    fn mix(terms: &[(usize, Rational)]) -> Mixture {
        terms.iter().map(|(n, c)| (p(*n), c.clone())).collect()
    }

    #[test]
    fn shared_label_is_subtracted() {
        let eq = PreparationEquivalence::new(
            mix(&[(1, r(1, 2)), (2, r(1, 2))]),
            mix(&[(1, r(1, 3)), (3, r(1, 3)), (4, r(1, 3))]),
        )
        .unwrap();
        let expected = PreparationEquivalence::new(
            mix(&[(1, r(1, 4)), (2, r(3, 4))]),
            mix(&[(3, r(1, 2)), (4, r(1, 2))]),
        )
        .unwrap();
        assert_eq!(single_equivalence_normal_form(&eq), NormalForm::Reduced(expected));
    }

    #[test]
    fn disjoint_equivalence_is_fixed() {
        let eq = PreparationEquivalence::new(
            mix(&[(1, r(1, 4)), (2, r(3, 4))]),
            mix(&[(3, r(1, 2)), (4, r(1, 2))]),
        )
        .unwrap();
        assert_eq!(single_equivalence_normal_form(&eq), NormalForm::Reduced(eq));
    }

    #[test]
    fn identical_sides_are_vacuous() {
        let side = mix(&[(1, r(1, 2)), (2, r(1, 2))]);
        let eq = PreparationEquivalence::new(side.clone(), side).unwrap();
        assert_eq!(single_equivalence_normal_form(&eq), NormalForm::Vacuous);
    }

    #[test]
    fn one_hypothetical_preparation_is_embedded() {
        let q = fixtures::q_c();
        let e = embed_repeated_preparations(&q).unwrap();
        assert_eq!(e.clones, BTreeMap::from([(p(6), p(1)), (p(7), p(3))]));
        assert_eq!(
            e.decompositions,
            vec![
                mix(&[(1, r(3, 8)), (2, r(5, 8))]),
                mix(&[(3, r(5, 12)), (4, r(5, 12)), (6, r(1, 6))]),
                mix(&[(5, r(1, 2)), (7, r(1, 2))]),
            ]
        );
        assert_eq!(e.behaviour, fixtures::q_c_prime());
        assert!(equivalence_residual(&e.behaviour).unwrap().iter().all(Rational::is_zero));
    }

    #[test]
    fn ns_form_is_a_fixed_point() {
        let q = fixtures::q_c_prime();
        let e = embed_repeated_preparations(&q).unwrap();
        assert!(e.clones.is_empty());
        assert_eq!(e.behaviour, q);
    }

    #[test]
    fn disconnected_equivalences_rejected() {
        let eqs = vec![
            PreparationEquivalence::new(mix(&[(1, r(1, 1))]), mix(&[(2, r(1, 1))])).unwrap(),
            PreparationEquivalence::new(mix(&[(3, r(1, 1))]), mix(&[(4, r(1, 1))])).unwrap(),
        ];
        let s = CtxScenario::new((1..=4).map(p).collect(), vec![2], eqs, None).unwrap();
        let q = CtxBehaviour::from_fn(s, |_, _, _| r(1, 2)).unwrap();
        assert!(matches!(
            embed_repeated_preparations(&q),
            Err(MappingError::NotOneHypotheticalForm(_))
        ));
    }

    fn weights(n: usize) -> impl Strategy<Value = Vec<i64>> {
        prop::collection::vec(0i64..4, n).prop_filter("nonzero", |w| w.iter().any(|&v| v > 0))
    }

    proptest! {
        // The difference lhs − rhs only gets rescaled by 1/mass, so residuals do too.
        #[test]
        fn normal_form_rescales_residual(
            wl in weights(4), wr in weights(4),
            rows in prop::collection::vec(0i64..=6, 4),
        ) {
            let to_mix = |w: &[i64]| -> Mixture {
                let t: i64 = w.iter().sum();
                w.iter().enumerate().filter(|(_, &v)| v > 0)
                    .map(|(i, &v)| (p(i + 1), r(v, t))).collect()
            };
            let eq = PreparationEquivalence::new(to_mix(&wl), to_mix(&wr)).unwrap();
            let s = CtxScenario::new((1..=4).map(p).collect(), vec![2], vec![eq.clone()], None).unwrap();
            let q = CtxBehaviour::from_fn(s.clone(), |l, _, b| {
                let PrepLabel::Plain(n) = *l else { unreachable!() };
                let v = r(rows[n - 1], 6);
                if b == 1 { v } else { Rational::one() - v }
            }).unwrap();
            let before = equivalence_residual(&q).unwrap()[0].clone();
            match single_equivalence_normal_form(&eq) {
                NormalForm::Vacuous => prop_assert!(before.is_zero()),
                NormalForm::Reduced(nf) => {
                    for l in nf.lhs().keys() {
                        prop_assert!(!nf.rhs().contains_key(l));
                    }
                    let s2 = CtxScenario::new((1..=4).map(p).collect(), vec![2], vec![nf], None).unwrap();
                    let after = equivalence_residual(&q.with_scenario(s2).unwrap()).unwrap()[0].clone();
                    prop_assert_eq!(before.is_zero(), after.is_zero());
                    prop_assert!(after >= before);
                }
            }
        }
    }
}
