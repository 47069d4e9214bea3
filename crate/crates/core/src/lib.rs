//! Propositional knowledge bases for explainable planning.
//!
//! Planning problems are compiled into bounded SAT encodings, plan validity
//! and optimality become skeptical/credulous entailment queries, and
//! explanations reconcile a human's knowledge base with an agent's. The
//! classical belief-change operators (expansion, revision, update) plus
//! abduction and diagnosis are provided for comparison.

pub mod error;
pub mod logic;

pub use error::{Error, ErrorKind, Result};
pub mod belief;
pub mod encoder;
pub mod planning;
pub mod reconcile;
