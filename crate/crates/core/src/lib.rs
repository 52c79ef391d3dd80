//! Expressive Boolean rule learning.
//!
//! Rules are trees of literals and parameterized operators (`And`, `Or`,
//! `AtLeast`, `AtMost`, `Choose`) learned by simulated-annealing local search
//! over binarized tabular data. Language models are used as optional helpers
//! for feature selection, threshold recommendation and explanation; every
//! model output is validated against the dataset schema and every
//! explanation is grounded in the actual rule verdict.

pub mod bits;
pub mod dataset;
pub mod error;
pub mod formula;
pub mod insight;
pub mod llm;
pub mod metrics;
pub mod model;
pub mod optimizer;

pub use error::{Error, Result};
pub use formula::{Comparator, Operator, Predicate, PredicateValue, Rule, RuleNode};
