//! Validated data model: Bell scenarios and correlations, contextuality
//! scenarios, preparation equivalences and behaviours.

mod bell;
mod ctx;
pub mod io;

use thiserror::Error;

use crate::rational::{Rational, RationalError};

pub use bell::{
    check_no_signalling, deterministic, marginals, pr_box, validate_correlation, BellCorrelation,
    BellScenario, Marginals, NoSignallingReport,
};
pub use ctx::{
    canonical_ns_equivalence, equivalence_residual, normalised_mixture, ns_decomposition,
    CtxBehaviour, CtxScenario, Mixture, PrepLabel, PreparationEquivalence,
};

/// One violated table constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableViolation {
    MissingCell(String),
    NegativeEntry { cell: String, value: Rational },
    SumNotOne { context: String, sum: Rational },
}

impl std::fmt::Display for TableViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TableViolation::MissingCell(c) => write!(f, "missing cell {c}"),
            TableViolation::NegativeEntry { cell, value } => {
                write!(f, "negative entry {value} at {cell}")
            }
            TableViolation::SumNotOne { context, sum } => {
                write!(f, "entries at {context} sum to {sum}")
            }
        }
    }
}

fn join(v: &[TableViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("malformed table: {0}")]
    MalformedTable(String),
    #[error("normalisation error: {}", join(.0))]
    Normalisation(Vec<TableViolation>),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid equivalence: {0}")]
    InvalidEquivalence(String),
    #[error("unknown preparation label [{0}]")]
    UnknownLabel(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Rational(#[from] RationalError),
}
