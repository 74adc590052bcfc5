use std::collections::{BTreeMap, BTreeSet};

use crate::model::{
    canonical_ns_equivalence, check_no_signalling, marginals, BellCorrelation, BellScenario,
    CtxBehaviour, CtxScenario, Mixture, PrepLabel, PreparationEquivalence,
};
use crate::rational::Rational;

use super::MappingError;

/// Output of the forward map: the behaviour (its scenario carries NS(p_A))
/// together with the Bell-side index tuple **A**.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappedBehaviour {
    pub behaviour: CtxBehaviour,
    pub index_a: Vec<usize>,
}

impl MappedBehaviour {
    /// Accepts a behaviour whose scenario already carries `index_A`.
    pub fn from_behaviour(behaviour: CtxBehaviour) -> Result<Self, MappingError> {
        let index_a = behaviour
            .scenario()
            .index_a()
            .ok_or_else(|| MappingError::ShapeMismatch("behaviour has no index_A".into()))?
            .to_vec();
        Ok(MappedBehaviour { behaviour, index_a })
    }
}

/// Λ: q(b|[a|x],y) = p(a,b|x,y) / p_A(a|x) on the preparations with p_A(a|x) > 0.
pub fn bell_to_ctx(p: &BellCorrelation) -> Result<MappedBehaviour, MappingError> {
    let ns = check_no_signalling(p);
    if !ns.no_signalling {
        return Err(MappingError::SignallingInput(ns.max_residual));
    }
    let m = marginals(p);
    let s = p.scenario();
    let preps: Vec<PrepLabel> = m
        .alice_support()
        .iter()
        .enumerate()
        .flat_map(|(i, sup)| sup.iter().map(move |&a| PrepLabel::outcome(a, i + 1)))
        .collect();
    let equivalences = canonical_ns_equivalence(&m.alice)?;
    let index_a = s.outcomes_a().to_vec();
    let scenario = CtxScenario::new(
        preps,
        s.outcomes_b().to_vec(),
        equivalences,
        Some(index_a.clone()),
    )?;
    let behaviour = CtxBehaviour::from_fn(scenario, |label, y, b| match *label {
        PrepLabel::Outcome { a, x } => p
            .get(a, b, x, y)
            .checked_div(m.alice(a, x))
            .expect("support preparations have positive marginal"),
        PrepLabel::Plain(_) => unreachable!("forward map only creates composite labels"),
    })?;
    Ok(MappedBehaviour { behaviour, index_a })
}

/// Recovers the decompositions of an NS-form scenario as `(x, Σ_a p̂_A(a|x) P[a|x])`,
/// sorted by `x`.
///
/// The equivalences may be any connected set of pairwise relations between
/// the decompositions; every preparation must occur in exactly one
/// decomposition and every decomposition must use labels of a single input.
pub fn ns_decompositions(scenario: &CtxScenario) -> Result<Vec<(usize, Mixture)>, MappingError> {
    let mut decompositions: Vec<Mixture> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let position = |ds: &mut Vec<Mixture>, m: &Mixture| -> usize {
        match ds.iter().position(|d| d == m) {
            Some(i) => i,
            None => {
                ds.push(m.clone());
                ds.len() - 1
            }
        }
    };
    for eq in scenario.equivalences() {
        let i = position(&mut decompositions, eq.lhs());
        let j = position(&mut decompositions, eq.rhs());
        edges.push((i, j));
    }
    if decompositions.is_empty() {
        // A single input with no equivalence: only recoverable when Z = 1.
        return match scenario.preps() {
            [only] => {
                let PrepLabel::Outcome { x, .. } = *only else {
                    return Err(MappingError::NotNSForm(
                        "plain preparation labels must be relabelled as [a|x] first".into(),
                    ));
                };
                Ok(vec![(x, Mixture::from([(*only, Rational::one())]))])
            }
            _ => Err(MappingError::NotNSForm(
                "no equivalences: the single decomposition's weights are not recorded".into(),
            )),
        };
    }
    let mut seen = BTreeSet::new();
    for d in &decompositions {
        for l in d.keys() {
            if !seen.insert(*l) {
                return Err(MappingError::NotNSForm(format!(
                    "preparation [{l}] appears in more than one decomposition"
                )));
            }
        }
    }
    if let Some(l) = scenario.preps().iter().find(|l| !seen.contains(l)) {
        return Err(MappingError::NotNSForm(format!(
            "preparation [{l}] appears in no decomposition"
        )));
    }
    if !connected(decompositions.len(), &edges) {
        return Err(MappingError::NotNSForm(
            "equivalences do not chain all decompositions together".into(),
        ));
    }
    let mut out = BTreeMap::new();
    for d in decompositions {
        let inputs: BTreeSet<usize> = d
            .keys()
            .map(|l| match l {
                PrepLabel::Outcome { x, .. } => Ok(*x),
                PrepLabel::Plain(_) => Err(MappingError::NotNSForm(
                    "plain preparation labels must be relabelled as [a|x] first".into(),
                )),
            })
            .collect::<Result<_, _>>()?;
        if inputs.len() != 1 {
            return Err(MappingError::NotNSForm(
                "a decomposition mixes labels of different inputs".into(),
            ));
        }
        let x = *inputs.iter().next().expect("non-empty");
        if out.insert(x, d).is_some() {
            return Err(MappingError::NotNSForm(format!(
                "two decompositions use input x = {x}"
            )));
        }
    }
    Ok(out.into_iter().collect())
}

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    let root = find(&mut parent, 0);
    (0..n).all(|i| find(&mut parent, i) == root)
}

/// Λ⁻¹: p(a,b|x,y) = p̂_A(a|x)·q(b|[a|x],y) on Â_x and zero elsewhere,
/// in the Bell scenario (**A**, **B**, X, Y) with X = |**A**|.
pub fn ctx_to_bell(q: &CtxBehaviour, index_a: &[usize]) -> Result<BellCorrelation, MappingError> {
    let s = q.scenario();
    let decompositions = ns_decompositions(s)?;
    let inputs = index_a.len();
    let by_input: BTreeMap<usize, &Mixture> = decompositions.iter().map(|(x, d)| (*x, d)).collect();
    for x in 1..=inputs {
        let d = by_input.get(&x).ok_or_else(|| {
            MappingError::ShapeMismatch(format!("no decomposition for input x = {x}"))
        })?;
        let needed = d
            .keys()
            .map(|l| match l {
                PrepLabel::Outcome { a, .. } => *a,
                PrepLabel::Plain(_) => 0,
            })
            .max()
            .unwrap_or(0);
        if index_a[x - 1] < needed {
            return Err(MappingError::IndexTooSmall {
                x,
                given: index_a[x - 1],
                needed,
            });
        }
    }
    if let Some(&x) = by_input.keys().find(|&&x| x > inputs) {
        return Err(MappingError::ShapeMismatch(format!(
            "decomposition for input x = {x} but index_A has length {inputs}"
        )));
    }
    let scenario = BellScenario::new(index_a.to_vec(), s.outcomes_b().to_vec())?;
    let p = BellCorrelation::from_fn(scenario, |a, b, x, y| {
        let label = PrepLabel::outcome(a, x);
        match by_input[&x].get(&label) {
            Some(weight) => weight * q.get(&label, y, b).expect("label is a preparation"),
            None => Rational::zero(),
        }
    })?;
    Ok(p)
}

/// Relabels an NS-form scenario with plain labels into composite `[a|x]`
/// labels: decomposition `k` (in chain order) becomes input `x = k`, and its
/// preparations get outcomes `1, 2, …` in label order. Returns the relabelled
/// behaviour and the map from new to old labels.
pub fn relabel_as_outcomes(
    q: &CtxBehaviour,
) -> Result<(CtxBehaviour, BTreeMap<PrepLabel, PrepLabel>), MappingError> {
    let s = q.scenario();
    let mut order: Vec<Mixture> = Vec::new();
    for eq in s.equivalences() {
        for side in [eq.lhs(), eq.rhs()] {
            if !order.contains(side) {
                order.push(side.clone());
            }
        }
    }
    if order.is_empty() {
        order.push(s.preps().iter().map(|l| (*l, Rational::zero())).collect());
    }
    let mut rename = BTreeMap::new();
    for (k, d) in order.iter().enumerate() {
        for (i, l) in d.keys().enumerate() {
            if rename.insert(*l, PrepLabel::outcome(i + 1, k + 1)).is_some() {
                return Err(MappingError::NotNSForm(format!(
                    "preparation [{l}] appears in more than one decomposition"
                )));
            }
        }
    }
    if let Some(l) = s.preps().iter().find(|l| !rename.contains_key(l)) {
        return Err(MappingError::NotNSForm(format!(
            "preparation [{l}] appears in no decomposition"
        )));
    }
    let map_mixture =
        |m: &Mixture| -> Mixture { m.iter().map(|(l, c)| (rename[l], c.clone())).collect() };
    let equivalences = s
        .equivalences()
        .iter()
        .map(|eq| PreparationEquivalence::new(map_mixture(eq.lhs()), map_mixture(eq.rhs())))
        .collect::<Result<Vec<_>, _>>()?;
    let scenario = CtxScenario::new(
        rename.values().copied().collect(),
        s.outcomes_b().to_vec(),
        equivalences,
        None,
    )?;
    let back: BTreeMap<PrepLabel, PrepLabel> = rename.iter().map(|(o, n)| (*n, *o)).collect();
    let relabelled = CtxBehaviour::from_fn(scenario, |l, y, b| {
        q.get(&back[l], y, b).expect("renamed from an existing label").clone()
    })?;
    Ok((relabelled, back))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{deterministic, equivalence_residual, pr_box};

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn pr_box_maps_to_deterministic_behaviour() {
        let m = bell_to_ctx(&pr_box()).unwrap();
        let q = &m.behaviour;
        assert_eq!(q.scenario().num_preps(), 4);
        assert_eq!(m.index_a, vec![2, 2]);
        for x in 1..=2 {
            for a in 1..=2 {
                for y in 1..=2 {
                    for b in 1..=2 {
                        let expect = ((a - 1) ^ ((x - 1) * (y - 1))) == b - 1;
                        let v = q.get(&PrepLabel::outcome(a, x), y, b).unwrap();
                        assert_eq!(*v, if expect { Rational::one() } else { Rational::zero() });
                    }
                }
            }
        }
        assert!(equivalence_residual(q).unwrap().iter().all(Rational::is_zero));
    }

    #[test]
    fn uniform_maps_to_uniform() {
        let s = BellScenario::new(vec![2, 2], vec![2, 2]).unwrap();
        let p = BellCorrelation::from_fn(s, |_, _, _, _| r(1, 4)).unwrap();
        let q = bell_to_ctx(&p).unwrap().behaviour;
        assert!(q.table().iter().all(|v| *v == r(1, 2)));
        assert_eq!(ctx_to_bell(&q, &[2, 2]).unwrap(), p);
    }

    #[test]
    fn zero_marginal_preparation_is_dropped() {
        // ½·V[(2,1),(1,1)] + ½·V[(2,2),(1,2)]: Alice never outputs 1 on x = 1.
        let s = BellScenario::new(vec![2, 2], vec![2, 2]).unwrap();
        let v1 = deterministic(&s, &[2, 1], &[1, 1]).unwrap();
        let v2 = deterministic(&s, &[2, 2], &[1, 2]).unwrap();
        let p = v1.mix(&v2, &r(1, 2)).unwrap();
        let m = bell_to_ctx(&p).unwrap();
        let q = &m.behaviour;
        assert!(q.get(&PrepLabel::outcome(1, 1), 1, 1).is_none());
        assert_eq!(q.scenario().num_preps(), 3);
        // [2|1]: p_A = 1, so q = p(2,b|1,y): y=2 gives b = 1 or 2 with weight 1/2.
        assert_eq!(*q.get(&PrepLabel::outcome(2, 1), 2, 1).unwrap(), r(1, 2));
        assert_eq!(*q.get(&PrepLabel::outcome(2, 1), 1, 1).unwrap(), Rational::one());
        // [1|2] only occurs with v1, where Bob is (1,1).
        assert_eq!(*q.get(&PrepLabel::outcome(1, 2), 2, 1).unwrap(), Rational::one());
        assert_eq!(ctx_to_bell(q, &m.index_a).unwrap(), p);
    }

    #[test]
    fn single_input_round_trips() {
        let s = BellScenario::new(vec![3], vec![2]).unwrap();
        let t = [(1, 6), (1, 6), (1, 4), (1, 4), (0, 1), (1, 6)];
        let p = BellCorrelation::new(s, t.iter().map(|&(n, d)| Rational::frac(n, d)).collect()).unwrap();
        let m = bell_to_ctx(&p).unwrap();
        assert_eq!(m.behaviour.scenario().num_preps(), 3);
        assert_eq!(ctx_to_bell(&m.behaviour, &m.index_a).unwrap(), p);
    }

    #[test]
    fn signalling_input_rejected() {
        let s = BellScenario::new(vec![2], vec![1, 1]).unwrap();
        let p = BellCorrelation::from_fn(s, |a, _, _, y| {
            if a == y {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .unwrap();
        assert!(matches!(bell_to_ctx(&p), Err(MappingError::SignallingInput(_))));
    }

    fn five_prep_behaviour(labels: [PrepLabel; 5]) -> CtxBehaviour {
        let d1 = Mixture::from([(labels[0], r(1, 2)), (labels[1], r(1, 2))]);
        let d2 = Mixture::from([(labels[2], r(1, 4)), (labels[3], r(3, 4))]);
        let d3 = Mixture::from([(labels[4], r(1, 1))]);
        let eqs = vec![
            PreparationEquivalence::new(d1.clone(), d2).unwrap(),
            PreparationEquivalence::new(d1, d3).unwrap(),
        ];
        let s = CtxScenario::new(labels.to_vec(), vec![2, 2], eqs, None).unwrap();
        // Every preparation has the same statistics, so all equivalences hold.
        CtxBehaviour::from_fn(s, |_, y, b| if y == b { r(2, 3) } else { r(1, 3) }).unwrap()
    }

    #[test]
    fn relabelled_five_preparation_example() {
        // Q1 = P[2|1], Q2 = P[5|1], Q3 = P[1|2], Q4 = P[2|2], Q5 = P[2|3], A = (5,3,2).
        let q = five_prep_behaviour([
            PrepLabel::outcome(2, 1),
            PrepLabel::outcome(5, 1),
            PrepLabel::outcome(1, 2),
            PrepLabel::outcome(2, 2),
            PrepLabel::outcome(2, 3),
        ]);
        let p = ctx_to_bell(&q, &[5, 3, 2]).unwrap();
        let m = marginals(&p);
        assert_eq!(*m.alice(1, 2), r(1, 4));
        assert_eq!(*m.alice(1, 1), Rational::zero());
        assert_eq!(*m.alice(2, 3), Rational::one());
        assert!(check_no_signalling(&p).no_signalling);
        assert!(matches!(
            ctx_to_bell(&q, &[4, 3, 2]),
            Err(MappingError::IndexTooSmall { x: 1, given: 4, needed: 5 })
        ));
    }

    #[test]
    fn plain_labels_relabel_to_simplest_bell_scenario() {
        let q = five_prep_behaviour([1, 2, 3, 4, 5].map(PrepLabel::Plain));
        assert!(matches!(ctx_to_bell(&q, &[2, 2, 1]), Err(MappingError::NotNSForm(_))));
        let (relabelled, back) = relabel_as_outcomes(&q).unwrap();
        assert_eq!(back[&PrepLabel::outcome(2, 2)], PrepLabel::Plain(4));
        let p = ctx_to_bell(&relabelled, &[2, 2, 1]).unwrap();
        assert_eq!(*marginals(&p).alice(2, 2), r(3, 4));
    }

    #[test]
    fn reused_label_is_not_ns_form() {
        let d1 = Mixture::from([(PrepLabel::outcome(1, 1), r(1, 2)), (PrepLabel::outcome(2, 1), r(1, 2))]);
        let d2 = Mixture::from([(PrepLabel::outcome(1, 1), r(1, 3)), (PrepLabel::outcome(1, 2), r(2, 3))]);
        let s = CtxScenario::new(
            vec![PrepLabel::outcome(1, 1), PrepLabel::outcome(2, 1), PrepLabel::outcome(1, 2)],
            vec![2],
            vec![PreparationEquivalence::new(d1, d2).unwrap()],
            None,
        )
        .unwrap();
        let q = CtxBehaviour::from_fn(s, |_, _, _| r(1, 2)).unwrap();
        assert!(matches!(ctx_to_bell(&q, &[2, 1]), Err(MappingError::NotNSForm(_))));
    }
}
