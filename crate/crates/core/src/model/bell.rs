//! Bell scenarios, correlation tables, marginals and the no-signalling check.

use std::collections::BTreeMap;

use crate::rational::Rational;

use super::{ModelError, TableViolation};

/// Shape of a bipartite Bell scenario: outcome counts per input on each side.
///
/// Inputs and outcomes are 1-based everywhere in the public API.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BellScenario {
    outcomes_a: Vec<usize>,
    outcomes_b: Vec<usize>,
    // Start of each (x, y) block inside the flat table.
    offsets: Vec<usize>,
    len: usize,
}

impl BellScenario {
    pub fn new(outcomes_a: Vec<usize>, outcomes_b: Vec<usize>) -> Result<Self, ModelError> {
        if outcomes_a.is_empty() || outcomes_b.is_empty() {
            return Err(ModelError::InvalidScenario(
                "both parties need at least one input".into(),
            ));
        }
        if outcomes_a.iter().chain(&outcomes_b).any(|&n| n == 0) {
            return Err(ModelError::InvalidScenario(
                "every input needs at least one outcome".into(),
            ));
        }
        let mut offsets = Vec::with_capacity(outcomes_a.len() * outcomes_b.len());
        let mut len = 0;
        for &ax in &outcomes_a {
            for &by in &outcomes_b {
                offsets.push(len);
                len += ax * by;
            }
        }
        Ok(BellScenario {
            outcomes_a,
            outcomes_b,
            offsets,
            len,
        })
    }

    pub fn outcomes_a(&self) -> &[usize] {
        &self.outcomes_a
    }

    pub fn outcomes_b(&self) -> &[usize] {
        &self.outcomes_b
    }

    pub fn inputs_x(&self) -> usize {
        self.outcomes_a.len()
    }

    pub fn inputs_y(&self) -> usize {
        self.outcomes_b.len()
    }

    /// ‖A‖ = Σ_x A_x
    pub fn norm_a(&self) -> usize {
        self.outcomes_a.iter().sum()
    }

    /// ‖B‖ = Σ_y B_y
    pub fn norm_b(&self) -> usize {
        self.outcomes_b.iter().sum()
    }

    /// Number of table cells, Σ_{x,y} A_x·B_y.
    pub fn table_len(&self) -> usize {
        self.len
    }

    /// Flat index of cell (a, b | x, y); all arguments 1-based.
    pub fn index(&self, a: usize, b: usize, x: usize, y: usize) -> usize {
        debug_assert!(self.contains(a, b, x, y), "cell ({a},{b}|{x},{y}) out of range");
        let by = self.outcomes_b[y - 1];
        self.offsets[(x - 1) * self.outcomes_b.len() + (y - 1)] + (a - 1) * by + (b - 1)
    }

    pub fn contains(&self, a: usize, b: usize, x: usize, y: usize) -> bool {
        (1..=self.inputs_x()).contains(&x)
            && (1..=self.inputs_y()).contains(&y)
            && (1..=self.outcomes_a[x - 1]).contains(&a)
            && (1..=self.outcomes_b[y - 1]).contains(&b)
    }

    /// All cells `(a, b, x, y)` in table order (x, then y, then a, then b).
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, usize, usize)> + '_ {
        (1..=self.inputs_x()).flat_map(move |x| {
            (1..=self.inputs_y()).flat_map(move |y| {
                (1..=self.outcomes_a[x - 1])
                    .flat_map(move |a| (1..=self.outcomes_b[y - 1]).map(move |b| (a, b, x, y)))
            })
        })
    }
}

/// A validated correlation p(a,b|x,y): nonnegative, total, normalised per (x, y).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BellCorrelation {
    scenario: BellScenario,
    table: Vec<Rational>,
}

impl BellCorrelation {
    /// Validates a dense table given in [`BellScenario::cells`] order.
    pub fn new(scenario: BellScenario, table: Vec<Rational>) -> Result<Self, ModelError> {
        if table.len() != scenario.table_len() {
            return Err(ModelError::MalformedTable(format!(
                "expected {} cells, got {}",
                scenario.table_len(),
                table.len()
            )));
        }
        let mut violations = Vec::new();
        for (cell, value) in scenario.cells().zip(&table) {
            if value.is_negative() {
                let (a, b, x, y) = cell;
                violations.push(TableViolation::NegativeEntry {
                    cell: format!("{a},{b},{x},{y}"),
                    value: value.clone(),
                });
            }
        }
        for x in 1..=scenario.inputs_x() {
            for y in 1..=scenario.inputs_y() {
                let sum: Rational = (1..=scenario.outcomes_a[x - 1])
                    .flat_map(|a| (1..=scenario.outcomes_b[y - 1]).map(move |b| (a, b)))
                    .map(|(a, b)| &table[scenario.index(a, b, x, y)])
                    .sum();
                if !sum.is_one() {
                    violations.push(TableViolation::SumNotOne {
                        context: format!("x={x},y={y}"),
                        sum,
                    });
                }
            }
        }
        if !violations.is_empty() {
            return Err(ModelError::Normalisation(violations));
        }
        Ok(BellCorrelation { scenario, table })
    }

    /// Builds a table by evaluating `f(a, b, x, y)` on every cell, then validates it.
    pub fn from_fn<F>(scenario: BellScenario, mut f: F) -> Result<Self, ModelError>
    where
        F: FnMut(usize, usize, usize, usize) -> Rational,
    {
        let table = scenario.cells().map(|(a, b, x, y)| f(a, b, x, y)).collect();
        Self::new(scenario, table)
    }

    pub fn scenario(&self) -> &BellScenario {
        &self.scenario
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> &Rational {
        &self.table[self.scenario.index(a, b, x, y)]
    }

    /// Σ_b p(a,b|x,y)
    pub fn alice_sum(&self, a: usize, x: usize, y: usize) -> Rational {
        (1..=self.scenario.outcomes_b[y - 1])
            .map(|b| self.get(a, b, x, y))
            .sum()
    }

    /// Σ_a p(a,b|x,y)
    pub fn bob_sum(&self, b: usize, x: usize, y: usize) -> Rational {
        (1..=self.scenario.outcomes_a[x - 1])
            .map(|a| self.get(a, b, x, y))
            .sum()
    }

    /// Affine combination `w·self + (1 − w)·other` on the same scenario.
    pub fn mix(&self, other: &BellCorrelation, w: &Rational) -> Result<Self, ModelError> {
        if self.scenario != other.scenario {
            return Err(ModelError::InvalidScenario(
                "cannot mix correlations from different scenarios".into(),
            ));
        }
        let rest = Rational::one() - w;
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(p, q)| w * p + &rest * q)
            .collect();
        Self::new(self.scenario.clone(), table)
    }
}

/// Validates a sparse table keyed by `(a, b, x, y)`.
///
/// Missing cells are reported, never treated as zero.
pub fn validate_correlation(
    raw: &BTreeMap<(usize, usize, usize, usize), Rational>,
    scenario: &BellScenario,
) -> Result<BellCorrelation, ModelError> {
    if let Some(&(a, b, x, y)) = raw.keys().find(|&&(a, b, x, y)| !scenario.contains(a, b, x, y)) {
        return Err(ModelError::MalformedTable(format!(
            "cell ({a},{b}|{x},{y}) is outside the scenario"
        )));
    }
    let mut missing = Vec::new();
    let mut table = Vec::with_capacity(scenario.table_len());
    for cell in scenario.cells() {
        match raw.get(&cell) {
            Some(v) => table.push(v.clone()),
            None => {
                let (a, b, x, y) = cell;
                missing.push(TableViolation::MissingCell(format!("{a},{b},{x},{y}")));
                table.push(Rational::zero());
            }
        }
    }
    if !missing.is_empty() {
        return Err(ModelError::Normalisation(missing));
    }
    BellCorrelation::new(scenario.clone(), table)
}

/// One-sided marginal distributions, each with a flag saying whether it is
/// independent of the other party's input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marginals {
    /// `alice[x-1][a-1]` = p_A(a|x), read off at y = 1.
    pub alice: Vec<Vec<Rational>>,
    /// `bob[y-1][b-1]` = p_B(b|y), read off at x = 1.
    pub bob: Vec<Vec<Rational>>,
    pub alice_well_defined: bool,
    pub bob_well_defined: bool,
}

impl Marginals {
    pub fn alice(&self, a: usize, x: usize) -> &Rational {
        &self.alice[x - 1][a - 1]
    }

    pub fn bob(&self, b: usize, y: usize) -> &Rational {
        &self.bob[y - 1][b - 1]
    }

    /// Sets Â_x = {a : p_A(a|x) > 0}, one per input.
    pub fn alice_support(&self) -> Vec<Vec<usize>> {
        self.alice
            .iter()
            .map(|dist| {
                dist.iter()
                    .enumerate()
                    .filter(|(_, p)| p.is_positive())
                    .map(|(i, _)| i + 1)
                    .collect()
            })
            .collect()
    }
}

pub fn marginals(c: &BellCorrelation) -> Marginals {
    let s = c.scenario();
    let alice: Vec<Vec<Rational>> = (1..=s.inputs_x())
        .map(|x| (1..=s.outcomes_a()[x - 1]).map(|a| c.alice_sum(a, x, 1)).collect())
        .collect();
    let bob: Vec<Vec<Rational>> = (1..=s.inputs_y())
        .map(|y| (1..=s.outcomes_b()[y - 1]).map(|b| c.bob_sum(b, 1, y)).collect())
        .collect();
    let alice_well_defined = (1..=s.inputs_x()).all(|x| {
        (2..=s.inputs_y())
            .all(|y| (1..=s.outcomes_a()[x - 1]).all(|a| c.alice_sum(a, x, y) == alice[x - 1][a - 1]))
    });
    let bob_well_defined = (1..=s.inputs_y()).all(|y| {
        (2..=s.inputs_x())
            .all(|x| (1..=s.outcomes_b()[y - 1]).all(|b| c.bob_sum(b, x, y) == bob[y - 1][b - 1]))
    });
    Marginals {
        alice,
        bob,
        alice_well_defined,
        bob_well_defined,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoSignallingReport {
    pub no_signalling: bool,
    /// Largest |Σ_b p(a,b|x,y) − Σ_b p(a,b|x,y')| or |Σ_a p(a,b|x,y) − Σ_a p(a,b|x',y)|.
    pub max_residual: Rational,
}

pub fn check_no_signalling(c: &BellCorrelation) -> NoSignallingReport {
    let s = c.scenario();
    let mut worst = Rational::zero();
    let mut spread = |values: Vec<Rational>| {
        let lo = values.iter().min().cloned().unwrap_or_else(Rational::zero);
        let hi = values.iter().max().cloned().unwrap_or_else(Rational::zero);
        let d = hi - lo;
        if d > worst {
            worst = d;
        }
    };
    for x in 1..=s.inputs_x() {
        for a in 1..=s.outcomes_a()[x - 1] {
            spread((1..=s.inputs_y()).map(|y| c.alice_sum(a, x, y)).collect());
        }
    }
    for y in 1..=s.inputs_y() {
        for b in 1..=s.outcomes_b()[y - 1] {
            spread((1..=s.inputs_x()).map(|x| c.bob_sum(b, x, y)).collect());
        }
    }
    NoSignallingReport {
        no_signalling: worst.is_zero(),
        max_residual: worst,
    }
}

/// The PR box on (2,2,2,2): p(a,b|x,y) = 1/2 iff (a−1)⊕(b−1) = (x−1)(y−1).
pub fn pr_box() -> BellCorrelation {
    let s = BellScenario::new(vec![2, 2], vec![2, 2]).expect("static scenario");
    BellCorrelation::from_fn(s, |a, b, x, y| {
        if ((a - 1) ^ (b - 1)) == (x - 1) * (y - 1) {
            Rational::frac(1, 2)
        } else {
            Rational::zero()
        }
    })
    .expect("PR box is normalised")
}

/// The deterministic product correlation p(a,b|x,y) = [a = alice[x]]·[b = bob[y]].
pub fn deterministic(
    scenario: &BellScenario,
    alice: &[usize],
    bob: &[usize],
) -> Result<BellCorrelation, ModelError> {
    if alice.len() != scenario.inputs_x() || bob.len() != scenario.inputs_y() {
        return Err(ModelError::MalformedTable(
            "strategy length does not match the number of inputs".into(),
        ));
    }
    BellCorrelation::from_fn(scenario.clone(), |a, b, x, y| {
        if alice[x - 1] == a && bob[y - 1] == b {
            Rational::one()
        } else {
            Rational::zero()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2222() -> BellScenario {
        BellScenario::new(vec![2, 2], vec![2, 2]).unwrap()
    }

    #[test]
    fn scenario_norms_and_layout() {
        let s = BellScenario::new(vec![2, 2, 1], vec![2, 3]).unwrap();
        assert_eq!(s.norm_a(), 5);
        assert_eq!(s.norm_b(), 5);
        assert_eq!(s.table_len(), 25);
        let idx: Vec<usize> = s.cells().map(|(a, b, x, y)| s.index(a, b, x, y)).collect();
        assert_eq!(idx, (0..25).collect::<Vec<_>>());
        assert!(BellScenario::new(vec![2, 0], vec![2]).is_err());
    }

    #[test]
    fn uniform_table_is_valid() {
        let p = BellCorrelation::from_fn(s2222(), |_, _, _, _| Rational::frac(1, 4));
        assert!(p.is_ok());
    }

    #[test]
    fn over_unit_entry_reports_offending_input_pair() {
        let err = BellCorrelation::from_fn(s2222(), |a, b, x, y| {
            if (a, b, x, y) == (1, 1, 1, 1) {
                Rational::frac(3, 2)
            } else {
                Rational::frac(1, 4)
            }
        })
        .unwrap_err();
        match err {
            ModelError::Normalisation(v) => {
                assert_eq!(v.len(), 1);
                assert!(matches!(&v[0], TableViolation::SumNotOne { context, .. } if context == "x=1,y=1"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn missing_cell_is_not_zero() {
        let s = s2222();
        let mut raw = BTreeMap::new();
        for cell in s.cells() {
            raw.insert(cell, Rational::frac(1, 4));
        }
        raw.remove(&(2, 2, 2, 2));
        match validate_correlation(&raw, &s).unwrap_err() {
            ModelError::Normalisation(v) => {
                assert_eq!(v, vec![TableViolation::MissingCell("2,2,2,2".into())])
            }
            other => panic!("unexpected {other:?}"),
        }
        raw.insert((3, 1, 1, 1), Rational::zero());
        assert!(matches!(
            validate_correlation(&raw, &s),
            Err(ModelError::MalformedTable(_))
        ));
    }

    #[test]
    fn pr_box_marginals_and_no_signalling() {
        let pr = pr_box();
        let m = marginals(&pr);
        assert!(m.alice_well_defined && m.bob_well_defined);
        assert!(m.alice.iter().flatten().all(|v| *v == Rational::frac(1, 2)));
        assert!(m.bob.iter().flatten().all(|v| *v == Rational::frac(1, 2)));
        let ns = check_no_signalling(&pr);
        assert!(ns.no_signalling);
        assert!(ns.max_residual.is_zero());
    }

    #[test]
    fn deterministic_point_is_no_signalling() {
        let v = deterministic(&s2222(), &[2, 1], &[1, 2]).unwrap();
        assert!(check_no_signalling(&v).no_signalling);
    }

    #[test]
    fn product_marginals_recovered() {
        let u = [[Rational::frac(1, 3), Rational::frac(2, 3)], [Rational::frac(1, 5), Rational::frac(4, 5)]];
        let v = [[Rational::frac(1, 2), Rational::frac(1, 2)], [Rational::frac(3, 7), Rational::frac(4, 7)]];
        let p = BellCorrelation::from_fn(s2222(), |a, b, x, y| &u[x - 1][a - 1] * &v[y - 1][b - 1]).unwrap();
        let m = marginals(&p);
        for x in 0..2 {
            assert_eq!(m.alice[x], u[x].to_vec());
            assert_eq!(m.bob[x], v[x].to_vec());
        }
    }

    #[test]
    fn signalling_table_flags_alice() {
        // Alice outputs Bob's input: p(a,b|x,y) = [a=y]·1/B_y with one-outcome Bob inputs.
        let s = BellScenario::new(vec![2], vec![1, 1]).unwrap();
        let p = BellCorrelation::from_fn(s, |a, _, _, y| {
            if a == y {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .unwrap();
        let m = marginals(&p);
        // y=1 slice gives (1, 0); y=2 slice gives (0, 1).
        assert_eq!(m.alice[0], vec![Rational::one(), Rational::zero()]);
        assert!(!m.alice_well_defined);
        assert!(m.bob_well_defined);
        let ns = check_no_signalling(&p);
        assert!(!ns.no_signalling);
        assert_eq!(ns.max_residual, Rational::one());
    }

    #[test]
    fn perturbed_alice_marginal_residual() {
        // Move 1/10 between b-outcomes and a-outcomes at (x,y)=(1,2) only.
        let p = BellCorrelation::from_fn(s2222(), |a, b, x, y| {
            let base = Rational::frac(1, 4);
            if (x, y) == (1, 2) {
                match (a, b) {
                    (1, 1) => base + Rational::frac(1, 10),
                    (2, 1) => base - Rational::frac(1, 10),
                    _ => base,
                }
            } else {
                base
            }
        })
        .unwrap();
        let ns = check_no_signalling(&p);
        assert!(!ns.no_signalling);
        assert_eq!(ns.max_residual, Rational::frac(1, 10));
        assert!(!marginals(&p).alice_well_defined);
    }
}
