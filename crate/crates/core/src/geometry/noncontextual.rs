use crate::model::{CtxBehaviour, CtxScenario};
use crate::rational::{to_coprime_integers, Rational};

use super::lp::{dot, lp_feasibility, LinearSystem, LpOutcome};
use super::polytope::{nc_polytope, nc_vertices};
use super::{check_budget, mixed_radix, Budget, GeometryError};

/// Deterministic response assignments λ, with λ[y-1] the outcome of
/// measurement y, in lexicographic order.
pub fn response_function_atlas(
    s: &CtxScenario,
    budget: &Budget,
) -> Result<Vec<Vec<usize>>, GeometryError> {
    check_budget("response-function atlas", s.outcomes_b(), budget.atlas)?;
    Ok(mixed_radix(s.outcomes_b()))
}

/// A finite ontic model: `mu[z][l]` is the weight preparation `z` (scenario
/// order) gives to assignment `atlas[l]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OnticModel {
    pub atlas: Vec<Vec<usize>>,
    pub mu: Vec<Vec<Rational>>,
}

impl OnticModel {
    /// q(b|z,y) = Σ_λ [λ(y) = b]·μ_z(λ), in table layout.
    pub fn behaviour_table(&self, s: &CtxScenario) -> Vec<Rational> {
        s.cells()
            .map(|(z, y, b)| {
                self.atlas
                    .iter()
                    .zip(&self.mu[z])
                    .filter(|(lam, _)| lam[y - 1] == b)
                    .map(|(_, w)| w.clone())
                    .sum()
            })
            .collect()
    }
}

/// constant + Σ coefficients[cell]·q(cell) ≥ 0, coefficients in table layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtxInequality {
    pub coefficients: Vec<Rational>,
    pub constant: Rational,
}

impl CtxInequality {
    pub fn evaluate_table(&self, table: &[Rational]) -> Rational {
        &self.constant + dot(&self.coefficients, table)
    }

    pub fn evaluate(&self, q: &CtxBehaviour) -> Rational {
        self.evaluate_table(q.table())
    }

    pub fn canonical(&self) -> CtxInequality {
        let mut all = vec![self.constant.clone()];
        all.extend(self.coefficients.iter().cloned());
        let mut it = to_coprime_integers(&all).into_iter().map(Rational::from_bigint);
        CtxInequality {
            constant: it.next().expect("constant"),
            coefficients: it.collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NcVerdict {
    NonContextual(OnticModel),
    /// `violation` = −value(q) > 0 for an inequality valid on the whole
    /// non-contextual set.
    Contextual {
        inequality: CtxInequality,
        violation: Rational,
    },
}

impl NcVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, NcVerdict::NonContextual(_))
    }
}

/// The μ-feasibility system. Variables are μ[z][l] at `z * L + l`; rows are
/// normalisations (one per preparation), then equivalence rows (one per
/// equivalence and λ), then data rows in table order.
pub(crate) struct MuSystem {
    pub atlas: Vec<Vec<usize>>,
    pub rows: Vec<Vec<Rational>>,
    pub num_structural: usize,
}

pub(crate) fn mu_system(s: &CtxScenario, budget: &Budget) -> Result<MuSystem, GeometryError> {
    let atlas = response_function_atlas(s, budget)?;
    let l = atlas.len();
    let n = s.num_preps() * l;
    let mut rows = Vec::new();
    for z in 0..s.num_preps() {
        let mut row = vec![Rational::zero(); n];
        for k in 0..l {
            row[z * l + k] = Rational::one();
        }
        rows.push(row);
    }
    for eq in s.equivalences() {
        for k in 0..l {
            let mut row = vec![Rational::zero(); n];
            for (label, c) in eq.lhs() {
                let z = s.prep_position(label).expect("validated label");
                row[z * l + k] += c;
            }
            for (label, c) in eq.rhs() {
                let z = s.prep_position(label).expect("validated label");
                row[z * l + k] -= c;
            }
            rows.push(row);
        }
    }
    let num_structural = rows.len();
    for (z, y, b) in s.cells() {
        let mut row = vec![Rational::zero(); n];
        for (k, lam) in atlas.iter().enumerate() {
            if lam[y - 1] == b {
                row[z * l + k] = Rational::one();
            }
        }
        rows.push(row);
    }
    Ok(MuSystem {
        atlas,
        rows,
        num_structural,
    })
}

/// Decides membership of `q` in the non-contextual set of its scenario.
///
/// A separating inequality is first read off the Farkas certificate. When
/// the polytope's facets fit in the budget, the returned inequality is the
/// facet most violated by `q` (ties broken by canonical facet order);
/// otherwise the certificate is shifted to be tight on the polytope when its
/// vertices fit, and returned as is when they do not.
pub fn check_noncontextual(q: &CtxBehaviour, budget: &Budget) -> Result<NcVerdict, GeometryError> {
    let s = q.scenario();
    let sys = mu_system(s, budget)?;
    let l = sys.atlas.len();
    let mut b = vec![Rational::zero(); sys.num_structural];
    for v in b.iter_mut().take(s.num_preps()) {
        *v = Rational::one();
    }
    b.extend(q.table().iter().cloned());
    let lp = LinearSystem::new(sys.rows.clone(), b);
    let y = match lp_feasibility(&lp) {
        LpOutcome::Feasible(x) => {
            let mu = x.chunks(l).map(<[Rational]>::to_vec).collect();
            return Ok(NcVerdict::NonContextual(OnticModel {
                atlas: sys.atlas,
                mu,
            }));
        }
        LpOutcome::Infeasible(y) => y,
    };
    let constant: Rational = y[..s.num_preps()].iter().sum();
    let coefficients = y[sys.num_structural..].to_vec();
    let mut inequality = CtxInequality {
        coefficients,
        constant,
    }
    .canonical();

    if let Ok(poly) = nc_polytope(s, budget) {
        let best = poly
            .facets
            .iter()
            .map(|f| f.to_inequality(&poly, s))
            .map(|ineq| (ineq.evaluate(q), ineq))
            .filter(|(v, _)| v.is_negative())
            .min_by(|a, b| a.0.cmp(&b.0));
        if let Some((_, facet)) = best {
            inequality = facet;
        }
    } else if let Ok(vertices) = nc_vertices(s, budget) {
        let lowest = vertices
            .iter()
            .map(|v| dot(&inequality.coefficients, v))
            .min()
            .expect("non-empty polytope");
        inequality.constant = -lowest;
        inequality = inequality.canonical();
    }
    let violation = -inequality.evaluate(q);
    if !violation.is_positive() {
        return Err(GeometryError::Internal(
            "separating inequality does not cut off the behaviour".into(),
        ));
    }
    Ok(NcVerdict::Contextual {
        inequality,
        violation,
    })
}
