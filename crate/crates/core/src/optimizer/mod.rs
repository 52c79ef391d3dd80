//! Rule optimization by simulated-annealing local search.
//!
//! Maximizes `score(R) - lambda * complexity(R)` subject to
//! `complexity(R) <= max_complexity` over valid rule trees.

mod anneal;
mod config;
mod moves;

pub use anneal::{accept, anneal, anneal_with_hook, fit, objective, AnnealStep, AnnealTrace, RuleSet};
pub use config::ObjectiveConfig;
pub use moves::{applicable_kinds, apply_move, propose_move, random_rule, Move, MoveKind};
