//! Expressive Boolean rules: predicates, rule trees, the textual rule
//! grammar, and small-instance equivalence oracles.

mod cnf;
mod node;
mod parse;
mod predicate;
mod rule;
mod truth;

pub use cnf::{atleast_to_cnf, CnfFormula};
pub use node::{negation_dual, Operator, OperatorKind, RuleNode};
pub use parse::{parse, parse_with_warnings, ParseWarning};
pub use predicate::{Comparator, Predicate, PredicateValue};
pub use rule::Rule;
pub use truth::{truth_table_equivalent, Formula};
