//! Solver-independent re-checking of membership verdicts.

use std::collections::BTreeMap;

use crate::model::{deterministic, BellCorrelation, CtxBehaviour};
use crate::rational::Rational;

use super::local::{local_vertices, LocalVerdict};
use super::noncontextual::{NcVerdict, OnticModel};
use super::polytope::nc_vertices;
use super::{Budget, GeometryError};

/// Outcome of a certificate check: how many constraints of each kind were
/// verified, and a description of every one that failed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CertificateReport {
    pub checks: BTreeMap<String, usize>,
    pub defects: Vec<String>,
}

impl CertificateReport {
    pub fn valid(&self) -> bool {
        self.defects.is_empty()
    }

    fn pass(&mut self, kind: &str) {
        *self.checks.entry(kind.to_string()).or_default() += 1;
    }

    fn check(&mut self, kind: &str, ok: bool, defect: impl FnOnce() -> String) {
        if ok {
            self.pass(kind);
        } else {
            self.defects.push(defect());
        }
    }

    pub fn count(&self, kind: &str) -> usize {
        self.checks.get(kind).copied().unwrap_or(0)
    }
}

pub fn verify_local(
    p: &BellCorrelation,
    verdict: &LocalVerdict,
    budget: &Budget,
) -> Result<CertificateReport, GeometryError> {
    let s = p.scenario();
    let mut report = CertificateReport::default();
    match verdict {
        LocalVerdict::Local(weights) => {
            let mut sum = vec![Rational::zero(); s.table_len()];
            let mut total = Rational::zero();
            for (k, (st, w)) in weights.iter().enumerate() {
                report.check("nonnegativity", !w.is_negative(), || {
                    format!("weight {k} is negative ({w})")
                });
                total += w;
                match deterministic(s, &st.alice, &st.bob) {
                    Ok(v) => {
                        for (acc, e) in sum.iter_mut().zip(v.table()) {
                            if !e.is_zero() {
                                *acc += w * e;
                            }
                        }
                    }
                    Err(_) => report
                        .defects
                        .push(format!("strategy {k} does not fit the scenario")),
                }
            }
            report.check("normalisation", total.is_one(), || {
                format!("weights sum to {total}, not 1")
            });
            for ((a, b, x, y), (got, want)) in s.cells().zip(sum.iter().zip(p.table())) {
                report.check("data", got == want, || {
                    format!("p({a},{b}|{x},{y}): model gives {got}, table has {want}")
                });
            }
        }
        LocalVerdict::Nonlocal {
            inequality,
            violation,
        } => {
            if inequality.scenario != *s || inequality.coefficients.len() != s.table_len() {
                report.defects.push("inequality is for a different scenario".into());
                return Ok(report);
            }
            for (k, v) in local_vertices(s, budget)?.iter().enumerate() {
                let value = inequality.evaluate(v);
                report.check("vertex", !value.is_negative(), || {
                    format!("inequality fails on local vertex {k} (value {value})")
                });
            }
            let value = inequality.evaluate(p);
            report.check("violation", -&value == *violation && violation.is_positive(), || {
                format!("claimed violation {violation}, actual value {value}")
            });
        }
    }
    Ok(report)
}

fn verify_model(q: &CtxBehaviour, model: &OnticModel, report: &mut CertificateReport) {
    let s = q.scenario();
    let bs = s.outcomes_b();
    for (k, lam) in model.atlas.iter().enumerate() {
        let fits = lam.len() == bs.len() && lam.iter().zip(bs).all(|(&o, &b)| (1..=b).contains(&o));
        report.check("atlas", fits, || format!("assignment {k} does not fit the scenario"));
    }
    if model.mu.len() != s.num_preps() || model.mu.iter().any(|m| m.len() != model.atlas.len()) {
        report.defects.push("measure table has the wrong shape".into());
        return;
    }
    for (z, row) in model.mu.iter().enumerate() {
        let label = s.preps()[z];
        for (k, w) in row.iter().enumerate() {
            report.check("nonnegativity", !w.is_negative(), || {
                format!("mu[{label}][{}] = {w} is negative", k + 1)
            });
        }
        let total: Rational = row.iter().sum();
        report.check("normalisation", total.is_one(), || {
            format!("mu[{label}] sums to {total}")
        });
    }
    let side = |m: &crate::model::Mixture, k: usize| -> Rational {
        m.iter()
            .map(|(l, c)| c * &model.mu[s.prep_position(l).expect("validated")][k])
            .sum()
    };
    for (e, eq) in s.equivalences().iter().enumerate() {
        for k in 0..model.atlas.len() {
            let (lhs, rhs) = (side(eq.lhs(), k), side(eq.rhs(), k));
            report.check("equivalence", lhs == rhs, || {
                format!("equivalence {} at assignment {}: {lhs} vs {rhs}", e + 1, k + 1)
            });
        }
    }
    let table = model.behaviour_table(s);
    for ((z, y, b), (got, want)) in s.cells().zip(table.iter().zip(q.table())) {
        if b == bs[y - 1] {
            continue;
        }
        report.check("data", got == want, || {
            format!("{}: model gives {got}, behaviour has {want}", s.coordinate_name(z, y, b))
        });
    }
}

pub fn verify_noncontextual(
    q: &CtxBehaviour,
    verdict: &NcVerdict,
    budget: &Budget,
) -> Result<CertificateReport, GeometryError> {
    let mut report = CertificateReport::default();
    match verdict {
        NcVerdict::NonContextual(model) => verify_model(q, model, &mut report),
        NcVerdict::Contextual {
            inequality,
            violation,
        } => {
            let s = q.scenario();
            if inequality.coefficients.len() != s.table_len() {
                report.defects.push("inequality is for a different scenario".into());
                return Ok(report);
            }
            for (k, v) in nc_vertices(s, budget)?.iter().enumerate() {
                let value = inequality.evaluate_table(v);
                report.check("vertex", !value.is_negative(), || {
                    format!("inequality fails on non-contextual vertex {k} (value {value})")
                });
            }
            let value = inequality.evaluate(q);
            report.check("violation", -&value == *violation && violation.is_positive(), || {
                format!("claimed violation {violation}, actual value {value}")
            });
        }
    }
    Ok(report)
}
