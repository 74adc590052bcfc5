//! Prepare-and-measure contextuality scenarios and behaviours.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::rational::Rational;

use super::{ModelError, TableViolation};

/// A preparation label.
///
/// Mapped scenarios use composite labels `[a|x]`; free-standing scenarios
/// may use plain indices `P_n`. Composite labels order by `(x, a)`, plain
/// labels numerically, and composite labels sort before plain ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrepLabel {
    Outcome { a: usize, x: usize },
    Plain(usize),
}

impl PrepLabel {
    fn key(&self) -> (u8, usize, usize) {
        match *self {
            PrepLabel::Outcome { a, x } => (0, x, a),
            PrepLabel::Plain(n) => (1, n, 0),
        }
    }

    pub fn outcome(a: usize, x: usize) -> Self {
        PrepLabel::Outcome { a, x }
    }
}

impl Ord for PrepLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for PrepLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrepLabel::Outcome { a, x } => write!(f, "{a}|{x}"),
            PrepLabel::Plain(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for PrepLabel {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::Format(format!("bad preparation label {s:?}"));
        let positive = |t: &str| -> Result<usize, ModelError> {
            match t.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(bad()),
            }
        };
        match s.split_once('|') {
            Some((a, x)) => Ok(PrepLabel::Outcome {
                a: positive(a)?,
                x: positive(x)?,
            }),
            None => Ok(PrepLabel::Plain(positive(s)?)),
        }
    }
}

/// A probabilistic mixture of preparations; zero coefficients are never stored.
pub type Mixture = BTreeMap<PrepLabel, Rational>;

/// Validates a mixture: nonnegative coefficients summing to one, zeros dropped.
pub fn normalised_mixture(raw: Mixture) -> Result<Mixture, ModelError> {
    let mut out = Mixture::new();
    let mut total = Rational::zero();
    for (label, c) in raw {
        if c.is_negative() {
            return Err(ModelError::InvalidEquivalence(format!(
                "negative coefficient {c} on P[{label}]"
            )));
        }
        total += &c;
        if c.is_positive() {
            out.insert(label, c);
        }
    }
    if !total.is_one() {
        return Err(ModelError::InvalidEquivalence(format!(
            "coefficients sum to {total}, not 1"
        )));
    }
    Ok(out)
}

/// Σ lhs ≃ Σ rhs, each side a probability distribution over preparations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PreparationEquivalence {
    lhs: Mixture,
    rhs: Mixture,
}

impl PreparationEquivalence {
    pub fn new(lhs: Mixture, rhs: Mixture) -> Result<Self, ModelError> {
        Ok(PreparationEquivalence {
            lhs: normalised_mixture(lhs)?,
            rhs: normalised_mixture(rhs)?,
        })
    }

    pub fn lhs(&self) -> &Mixture {
        &self.lhs
    }

    pub fn rhs(&self) -> &Mixture {
        &self.rhs
    }

    pub fn labels(&self) -> impl Iterator<Item = &PrepLabel> {
        self.lhs.keys().chain(self.rhs.keys())
    }
}

impl fmt::Display for PreparationEquivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |m: &Mixture| {
            m.iter()
                .map(|(l, c)| format!("{c}·P[{l}]"))
                .collect::<Vec<_>>()
                .join(" + ")
        };
        write!(f, "{} ≃ {}", side(&self.lhs), side(&self.rhs))
    }
}

/// (Z, Y, B, OE_P, ∅) plus an optional Bell-side index tuple **A**.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CtxScenario {
    preps: Vec<PrepLabel>,
    outcomes_b: Vec<usize>,
    equivalences: Vec<PreparationEquivalence>,
    index_a: Option<Vec<usize>>,
}

impl CtxScenario {
    /// Preparations are sorted into canonical label order.
    pub fn new(
        preps: Vec<PrepLabel>,
        outcomes_b: Vec<usize>,
        equivalences: Vec<PreparationEquivalence>,
        index_a: Option<Vec<usize>>,
    ) -> Result<Self, ModelError> {
        if preps.is_empty() {
            return Err(ModelError::InvalidScenario("no preparations".into()));
        }
        if outcomes_b.is_empty() || outcomes_b.contains(&0) {
            return Err(ModelError::InvalidScenario(
                "need at least one measurement, each with at least one outcome".into(),
            ));
        }
        let set: BTreeSet<PrepLabel> = preps.iter().copied().collect();
        if set.len() != preps.len() {
            return Err(ModelError::InvalidScenario("duplicate preparation label".into()));
        }
        for eq in &equivalences {
            if let Some(l) = eq.labels().find(|l| !set.contains(l)) {
                return Err(ModelError::UnknownLabel(l.to_string()));
            }
        }
        if let Some(idx) = &index_a {
            if idx.contains(&0) {
                return Err(ModelError::InvalidScenario("index_A entries must be positive".into()));
            }
            for l in &set {
                if let PrepLabel::Outcome { a, x } = *l {
                    if x > idx.len() || a > idx[x - 1] {
                        return Err(ModelError::InvalidScenario(format!(
                            "label [{l}] exceeds index_A {idx:?}"
                        )));
                    }
                }
            }
        }
        Ok(CtxScenario {
            preps: set.into_iter().collect(),
            outcomes_b,
            equivalences,
            index_a,
        })
    }

    pub fn preps(&self) -> &[PrepLabel] {
        &self.preps
    }

    /// Z, the number of preparations.
    pub fn num_preps(&self) -> usize {
        self.preps.len()
    }

    pub fn num_measurements(&self) -> usize {
        self.outcomes_b.len()
    }

    pub fn outcomes_b(&self) -> &[usize] {
        &self.outcomes_b
    }

    pub fn equivalences(&self) -> &[PreparationEquivalence] {
        &self.equivalences
    }

    pub fn index_a(&self) -> Option<&[usize]> {
        self.index_a.as_deref()
    }

    pub fn with_index_a(mut self, index_a: Option<Vec<usize>>) -> Result<Self, ModelError> {
        self.index_a = index_a;
        Self::new(self.preps, self.outcomes_b, self.equivalences, self.index_a)
    }

    pub fn prep_position(&self, label: &PrepLabel) -> Option<usize> {
        self.preps.binary_search(label).ok()
    }

    /// Number of behaviour entries, Z·‖B‖.
    pub fn table_len(&self) -> usize {
        self.preps.len() * self.outcomes_b.iter().sum::<usize>()
    }

    /// Flat index of q(b|prep,y) where `prep` is a position in [`Self::preps`].
    pub fn index(&self, prep: usize, y: usize, b: usize) -> usize {
        let per_prep: usize = self.outcomes_b.iter().sum();
        let before_y: usize = self.outcomes_b[..y - 1].iter().sum();
        prep * per_prep + before_y + (b - 1)
    }

    /// All coordinates `(prep position, y, b)` in table order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        (0..self.preps.len()).flat_map(move |z| {
            (1..=self.outcomes_b.len())
                .flat_map(move |y| (1..=self.outcomes_b[y - 1]).map(move |b| (z, y, b)))
        })
    }

    /// Human-readable coordinate name `q(b|prep,y)`.
    pub fn coordinate_name(&self, prep: usize, y: usize, b: usize) -> String {
        format!("q({b}|{},{y})", self.preps[prep])
    }
}

/// A validated behaviour q(b|prep,y).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CtxBehaviour {
    scenario: CtxScenario,
    table: Vec<Rational>,
}

impl CtxBehaviour {
    /// Validates a dense table in [`CtxScenario::cells`] order.
    pub fn new(scenario: CtxScenario, table: Vec<Rational>) -> Result<Self, ModelError> {
        if table.len() != scenario.table_len() {
            return Err(ModelError::MalformedTable(format!(
                "expected {} entries, got {}",
                scenario.table_len(),
                table.len()
            )));
        }
        let mut violations = Vec::new();
        for ((z, y, b), v) in scenario.cells().zip(&table) {
            if v.is_negative() {
                violations.push(TableViolation::NegativeEntry {
                    cell: format!("{},{y},{b}", scenario.preps[z]),
                    value: v.clone(),
                });
            }
        }
        for z in 0..scenario.num_preps() {
            for y in 1..=scenario.num_measurements() {
                let sum: Rational = (1..=scenario.outcomes_b[y - 1])
                    .map(|b| &table[scenario.index(z, y, b)])
                    .sum();
                if !sum.is_one() {
                    violations.push(TableViolation::SumNotOne {
                        context: format!("prep={},y={y}", scenario.preps[z]),
                        sum,
                    });
                }
            }
        }
        if !violations.is_empty() {
            return Err(ModelError::Normalisation(violations));
        }
        Ok(CtxBehaviour { scenario, table })
    }

    /// Builds a table from `f(label, y, b)`, then validates it.
    pub fn from_fn<F>(scenario: CtxScenario, mut f: F) -> Result<Self, ModelError>
    where
        F: FnMut(&PrepLabel, usize, usize) -> Rational,
    {
        let table = scenario
            .cells()
            .map(|(z, y, b)| f(&scenario.preps[z], y, b))
            .collect();
        Self::new(scenario, table)
    }

    pub fn scenario(&self) -> &CtxScenario {
        &self.scenario
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    pub fn get(&self, label: &PrepLabel, y: usize, b: usize) -> Option<&Rational> {
        let z = self.scenario.prep_position(label)?;
        Some(&self.table[self.scenario.index(z, y, b)])
    }

    pub fn at(&self, prep: usize, y: usize, b: usize) -> &Rational {
        &self.table[self.scenario.index(prep, y, b)]
    }

    /// Same table under a different (compatible) scenario description.
    pub fn with_scenario(&self, scenario: CtxScenario) -> Result<Self, ModelError> {
        if scenario.preps != self.scenario.preps || scenario.outcomes_b != self.scenario.outcomes_b
        {
            return Err(ModelError::InvalidScenario(
                "replacement scenario has a different shape".into(),
            ));
        }
        Ok(CtxBehaviour {
            scenario,
            table: self.table.clone(),
        })
    }
}

/// Σ_label coeff·q(b|label,y).
fn mixture_value(q: &CtxBehaviour, m: &Mixture, y: usize, b: usize) -> Result<Rational, ModelError> {
    m.iter()
        .map(|(l, c)| {
            q.get(l, y, b)
                .map(|v| c * v)
                .ok_or_else(|| ModelError::UnknownLabel(l.to_string()))
        })
        .sum()
}

/// Per equivalence, max over (b, y) of |Σ α q − Σ β q|.
///
/// All zero exactly when `q` lies in the contextual set of its scenario.
pub fn equivalence_residual(q: &CtxBehaviour) -> Result<Vec<Rational>, ModelError> {
    let s = q.scenario();
    s.equivalences()
        .iter()
        .map(|eq| {
            let mut worst = Rational::zero();
            for y in 1..=s.num_measurements() {
                for b in 1..=s.outcomes_b()[y - 1] {
                    let d = (mixture_value(q, eq.lhs(), y, b)? - mixture_value(q, eq.rhs(), y, b)?)
                        .abs();
                    if d > worst {
                        worst = d;
                    }
                }
            }
            Ok(worst)
        })
        .collect()
}

/// The decomposition Σ_a p_A(a|x)·P[a|x] of one input, zero coefficients omitted.
pub fn ns_decomposition(x: usize, dist: &[Rational]) -> Mixture {
    dist.iter()
        .enumerate()
        .filter(|(_, p)| p.is_positive())
        .map(|(i, p)| (PrepLabel::outcome(i + 1, x), p.clone()))
        .collect()
}

/// NS(p_A) as X−1 pairwise equivalences anchored at x = 1.
///
/// `alice[x-1][a-1]` = p_A(a|x). A single input gives the reflexive
/// equivalence of its decomposition with itself, which records p_A.
pub fn canonical_ns_equivalence(
    alice: &[Vec<Rational>],
) -> Result<Vec<PreparationEquivalence>, ModelError> {
    let decompositions: Vec<Mixture> = alice
        .iter()
        .enumerate()
        .map(|(i, d)| ns_decomposition(i + 1, d))
        .collect();
    let Some((first, rest)) = decompositions.split_first() else {
        return Ok(Vec::new());
    };
    if rest.is_empty() {
        return Ok(vec![PreparationEquivalence::new(first.clone(), first.clone())?]);
    }
    rest.iter()
        .map(|d| PreparationEquivalence::new(first.clone(), d.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::frac(n, d)
    }

    #[test]
    fn label_order_is_by_input_then_outcome() {
        let mut v = vec![
            PrepLabel::outcome(2, 1),
            PrepLabel::outcome(1, 2),
            PrepLabel::Plain(3),
            PrepLabel::outcome(1, 1),
        ];
        v.sort();
        assert_eq!(
            v,
            vec![
                PrepLabel::outcome(1, 1),
                PrepLabel::outcome(2, 1),
                PrepLabel::outcome(1, 2),
                PrepLabel::Plain(3)
            ]
        );
        assert_eq!("2|3".parse::<PrepLabel>().unwrap(), PrepLabel::outcome(2, 3));
        assert_eq!("7".parse::<PrepLabel>().unwrap(), PrepLabel::Plain(7));
        assert!("0|1".parse::<PrepLabel>().is_err());
    }

    #[test]
    fn uniform_marginals_give_single_equivalence() {
        let eqs = canonical_ns_equivalence(&[vec![r(1, 2), r(1, 2)], vec![r(1, 2), r(1, 2)]]).unwrap();
        assert_eq!(eqs.len(), 1);
        assert_eq!(eqs[0].lhs().len(), 2);
        assert_eq!(eqs[0].lhs()[&PrepLabel::outcome(1, 1)], r(1, 2));
        assert_eq!(eqs[0].rhs()[&PrepLabel::outcome(2, 2)], r(1, 2));
    }

    #[test]
    fn five_preparation_chain() {
        // ½P[1|1] + ½P[2|1] ≃ ¼P[1|2] + ¾P[2|2] ≃ P[1|3], with A = (2,2,1).
        let eqs = canonical_ns_equivalence(&[
            vec![r(1, 2), r(1, 2)],
            vec![r(1, 4), r(3, 4)],
            vec![r(1, 1)],
        ])
        .unwrap();
        assert_eq!(eqs.len(), 2);
        assert_eq!(eqs[0].lhs(), eqs[1].lhs());
        assert_eq!(eqs[0].rhs()[&PrepLabel::outcome(1, 2)], r(1, 4));
        assert_eq!(eqs[0].rhs()[&PrepLabel::outcome(2, 2)], r(3, 4));
        assert_eq!(eqs[1].rhs().len(), 1);
        assert_eq!(eqs[1].rhs()[&PrepLabel::outcome(1, 3)], r(1, 1));
    }

    #[test]
    fn zero_coefficient_preparation_omitted() {
        let eqs = canonical_ns_equivalence(&[vec![r(0, 1), r(1, 1)], vec![r(1, 2), r(1, 2)]]).unwrap();
        assert!(!eqs[0].lhs().contains_key(&PrepLabel::outcome(1, 1)));
        assert_eq!(eqs[0].lhs()[&PrepLabel::outcome(2, 1)], r(1, 1));
    }

    #[test]
    fn single_input_gives_reflexive_equivalence() {
        let eqs = canonical_ns_equivalence(&[vec![r(1, 3), r(2, 3)]]).unwrap();
        assert_eq!(eqs.len(), 1);
        assert_eq!(eqs[0].lhs(), eqs[0].rhs());
        assert_eq!(eqs[0].lhs()[&PrepLabel::outcome(2, 1)], r(2, 3));
    }

    #[test]
    fn equivalence_rejects_bad_distributions() {
        let mut lhs = Mixture::new();
        lhs.insert(PrepLabel::Plain(1), r(1, 2));
        let mut rhs = Mixture::new();
        rhs.insert(PrepLabel::Plain(2), r(1, 1));
        assert!(PreparationEquivalence::new(lhs.clone(), rhs.clone()).is_err());
        lhs.insert(PrepLabel::Plain(3), r(1, 2));
        assert!(PreparationEquivalence::new(lhs, rhs).is_ok());
    }

    #[test]
    fn residual_detects_perturbation() {
        let mut lhs = Mixture::new();
        lhs.insert(PrepLabel::Plain(1), r(1, 2));
        lhs.insert(PrepLabel::Plain(2), r(1, 2));
        let mut rhs = Mixture::new();
        rhs.insert(PrepLabel::Plain(3), r(1, 1));
        let eq = PreparationEquivalence::new(lhs, rhs).unwrap();
        let s = CtxScenario::new(
            (1..=3).map(PrepLabel::Plain).collect(),
            vec![2],
            vec![eq],
            None,
        )
        .unwrap();
        let q = CtxBehaviour::from_fn(s.clone(), |_, _, _| r(1, 2)).unwrap();
        assert_eq!(equivalence_residual(&q).unwrap(), vec![Rational::zero()]);
        // Shift 1/100 on preparation 1 (weight 1/2) → residual 1/200.
        let q2 = CtxBehaviour::from_fn(s, |l, _, b| match (l, b) {
            (PrepLabel::Plain(1), 1) => r(51, 100),
            (PrepLabel::Plain(1), 2) => r(49, 100),
            _ => r(1, 2),
        })
        .unwrap();
        assert_eq!(equivalence_residual(&q2).unwrap(), vec![r(1, 200)]);
    }

    #[test]
    fn scenario_rejects_unknown_label_and_small_index() {
        let mut lhs = Mixture::new();
        lhs.insert(PrepLabel::Plain(9), r(1, 1));
        let eq = PreparationEquivalence::new(lhs.clone(), lhs).unwrap();
        assert!(matches!(
            CtxScenario::new(vec![PrepLabel::Plain(1)], vec![2], vec![eq], None),
            Err(ModelError::UnknownLabel(_))
        ));
        assert!(CtxScenario::new(vec![PrepLabel::outcome(3, 1)], vec![2], vec![], Some(vec![2])).is_err());
    }
}
