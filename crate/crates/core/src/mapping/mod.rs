//! The invertible map between Bell correlations and contextuality
//! behaviours, plus the reductions and embeddings around it.

mod blend;
mod lambda;
mod normal_form;
mod tau;

use thiserror::Error;

use crate::model::ModelError;

pub use blend::{interior_blend, interior_point};
pub use lambda::{bell_to_ctx, ctx_to_bell, ns_decompositions, relabel_as_outcomes, MappedBehaviour};
pub use normal_form::{
    embed_repeated_preparations, single_equivalence_normal_form, NormalForm, RepeatedPrepEmbedding,
};
pub use tau::{embed_bell, reduce_tau, RelabellingRecord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingError {
    #[error("correlation is signalling (max residual {0}); the map needs no-signalling input")]
    SignallingInput(crate::Rational),
    #[error("index_A entry A_{x} = {given} is smaller than the largest label {needed}")]
    IndexTooSmall { x: usize, given: usize, needed: usize },
    #[error("equivalences are not in NS form: {0}")]
    NotNSForm(String),
    #[error("every Alice input is deterministic; nothing is left after reduction")]
    FullyDeterministic(Box<RelabellingRecord>),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("equivalences are not decompositions of one hypothetical preparation: {0}")]
    NotOneHypotheticalForm(String),
    #[error("Alice marginal p_A({a}|{x}) is zero; a full-support marginal is required")]
    ZeroMarginal { a: usize, x: usize },
    #[error("blend parameter n must be at least 1")]
    ZeroBlend,
    #[error(transparent)]
    Model(#[from] ModelError),
}
