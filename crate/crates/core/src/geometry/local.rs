use crate::model::{deterministic, BellCorrelation, BellScenario};
use crate::rational::{to_coprime_integers, Rational};

use super::lp::{dot, lp_feasibility, LinearSystem, LpOutcome};
use super::{check_budget, mixed_radix, Budget, GeometryError};

/// A deterministic local strategy: Alice answers `alice[x-1]` on input x,
/// Bob answers `bob[y-1]` on input y.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct LocalStrategy {
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

/// All deterministic strategies, ordered lexicographically by (alice, bob).
pub fn local_strategies(
    s: &BellScenario,
    budget: &Budget,
) -> Result<Vec<LocalStrategy>, GeometryError> {
    let mut radices = s.outcomes_a().to_vec();
    radices.extend_from_slice(s.outcomes_b());
    check_budget("local vertex enumeration", &radices, budget.vertices)?;
    let x = s.inputs_x();
    Ok(mixed_radix(&radices)
        .into_iter()
        .map(|t| LocalStrategy {
            alice: t[..x].to_vec(),
            bob: t[x..].to_vec(),
        })
        .collect())
}

pub fn local_vertices(
    s: &BellScenario,
    budget: &Budget,
) -> Result<Vec<BellCorrelation>, GeometryError> {
    local_strategies(s, budget)?
        .iter()
        .map(|st| Ok(deterministic(s, &st.alice, &st.bob)?))
        .collect()
}

/// constant + Σ coefficients[cell]·p(cell) ≥ 0, coefficients in table layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BellInequality {
    pub scenario: BellScenario,
    pub coefficients: Vec<Rational>,
    pub constant: Rational,
}

impl BellInequality {
    pub fn evaluate(&self, p: &BellCorrelation) -> Rational {
        &self.constant + dot(&self.coefficients, p.table())
    }

    /// Scales by a positive factor to coprime integers.
    pub fn canonical(&self) -> BellInequality {
        let mut all = vec![self.constant.clone()];
        all.extend(self.coefficients.iter().cloned());
        let ints = to_coprime_integers(&all);
        let mut it = ints.into_iter().map(Rational::from_bigint);
        BellInequality {
            scenario: self.scenario.clone(),
            constant: it.next().expect("constant"),
            coefficients: it.collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalVerdict {
    /// Convex weights over deterministic strategies, zero weights omitted.
    Local(Vec<(LocalStrategy, Rational)>),
    /// An inequality valid on every local point, tight on at least one
    /// vertex, with `violation` = −value(p) > 0.
    Nonlocal {
        inequality: BellInequality,
        violation: Rational,
    },
}

impl LocalVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, LocalVerdict::Local(_))
    }
}

pub fn check_local(p: &BellCorrelation, budget: &Budget) -> Result<LocalVerdict, GeometryError> {
    let s = p.scenario();
    let strategies = local_strategies(s, budget)?;
    let vertices: Vec<BellCorrelation> = strategies
        .iter()
        .map(|st| deterministic(s, &st.alice, &st.bob))
        .collect::<Result<_, _>>()?;
    let cells = s.table_len();
    let mut a: Vec<Vec<Rational>> = (0..cells)
        .map(|c| vertices.iter().map(|v| v.table()[c].clone()).collect())
        .collect();
    a.push(vec![Rational::one(); vertices.len()]);
    let mut b = p.table().to_vec();
    b.push(Rational::one());
    match lp_feasibility(&LinearSystem::new(a, b)) {
        LpOutcome::Feasible(w) => Ok(LocalVerdict::Local(
            strategies
                .into_iter()
                .zip(w)
                .filter(|(_, w)| !w.is_zero())
                .collect(),
        )),
        LpOutcome::Infeasible(y) => {
            let coefficients = y[..cells].to_vec();
            let lowest = vertices
                .iter()
                .map(|v| dot(&coefficients, v.table()))
                .min()
                .expect("at least one vertex");
            let inequality = BellInequality {
                scenario: s.clone(),
                coefficients,
                constant: -lowest,
            }
            .canonical();
            let violation = -inequality.evaluate(p);
            if !violation.is_positive() {
                return Err(GeometryError::Internal(
                    "Farkas certificate does not separate the point".into(),
                ));
            }
            Ok(LocalVerdict::Nonlocal {
                inequality,
                violation,
            })
        }
    }
}
