//! Exact membership tests for the local and non-contextual polytopes, and
//! vertex/facet enumeration by double description.

pub mod certificate;
pub mod dd;
pub mod io;
pub mod linalg;
pub mod local;
pub mod lp;
pub mod noncontextual;
pub mod polytope;

use thiserror::Error;

use crate::model::ModelError;

pub use certificate::{verify_local, verify_noncontextual, CertificateReport};
pub use local::{
    check_local, local_strategies, local_vertices, BellInequality, LocalStrategy, LocalVerdict,
};
pub use lp::{lp_feasibility, lp_minimise, LinearSystem, LpOptimum, LpOutcome};
pub use noncontextual::{
    check_noncontextual, response_function_atlas, CtxInequality, NcVerdict, OnticModel,
};
pub use polytope::{nc_polytope, nc_vertices, Facet, Polytope};

/// Enumeration limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Maximum number of deterministic response assignments.
    pub atlas: usize,
    /// Maximum number of vertices (or intermediate rays) held at once.
    pub vertices: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            atlas: 4096,
            vertices: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("{what} needs {needed} items, above the budget of {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: String,
        limit: usize,
    },
    #[error("internal geometry error: {0}")]
    Internal(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// All tuples (d_1, …, d_k) with 1 ≤ d_i ≤ radices[i], last entry fastest.
pub(crate) fn mixed_radix(radices: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(radices.len())];
    for &r in radices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=r).map(move |d| {
                    let mut t = prefix.clone();
                    t.push(d);
                    t
                })
            })
            .collect();
    }
    out
}

/// Product of `radices`, or `None` when it overflows.
pub(crate) fn product(radices: &[usize]) -> Option<usize> {
    radices.iter().try_fold(1usize, |acc, &r| acc.checked_mul(r))
}

pub(crate) fn check_budget(
    what: &'static str,
    radices: &[usize],
    limit: usize,
) -> Result<(), GeometryError> {
    match product(radices) {
        Some(n) if n <= limit => Ok(()),
        other => Err(GeometryError::BudgetExceeded {
            what,
            needed: other.map_or_else(|| "more than usize::MAX".to_string(), |n| n.to_string()),
            limit,
        }),
    }
}
