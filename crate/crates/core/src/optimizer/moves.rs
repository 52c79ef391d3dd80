//! Local moves over rule trees.
//!
//! A move is chosen by first drawing a kind uniformly (or by configured
//! weight) among the kinds applicable to the current tree, then a target
//! uniformly among that kind's valid targets. Every move maps a valid tree to
//! a valid tree within the depth and complexity bounds.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::formula::{Operator, OperatorKind, Rule, RuleNode};
use crate::optimizer::ObjectiveConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    ReplaceLiteral,
    AddLiteral,
    RemoveLiteral,
    SwapOperator,
    AdjustK,
    ToggleNegation,
    GrowSubtree,
    PruneSubtree,
}

impl MoveKind {
    pub const ALL: [MoveKind; 8] = [
        MoveKind::ReplaceLiteral,
        MoveKind::AddLiteral,
        MoveKind::RemoveLiteral,
        MoveKind::SwapOperator,
        MoveKind::AdjustK,
        MoveKind::ToggleNegation,
        MoveKind::GrowSubtree,
        MoveKind::PruneSubtree,
    ];
}

/// Child-index path from the root.
pub type Path = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Move {
    ReplaceLiteral { path: Path, predicate: usize, negated: bool },
    AddLiteral { path: Path, predicate: usize, negated: bool },
    RemoveLiteral { path: Path },
    SwapOperator { path: Path, op: Operator },
    AdjustK { path: Path, k: usize },
    ToggleNegation { path: Path },
    GrowSubtree { path: Path, op: Operator, predicate: usize, negated: bool },
    /// Replaces the operator at `path` by the leaf at `leaf` (relative to `path`).
    PruneSubtree { path: Path, leaf: Path },
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match self {
            Move::ReplaceLiteral { .. } => MoveKind::ReplaceLiteral,
            Move::AddLiteral { .. } => MoveKind::AddLiteral,
            Move::RemoveLiteral { .. } => MoveKind::RemoveLiteral,
            Move::SwapOperator { .. } => MoveKind::SwapOperator,
            Move::AdjustK { .. } => MoveKind::AdjustK,
            Move::ToggleNegation { .. } => MoveKind::ToggleNegation,
            Move::GrowSubtree { .. } => MoveKind::GrowSubtree,
            Move::PruneSubtree { .. } => MoveKind::PruneSubtree,
        }
    }
}

fn node_at<'a>(root: &'a RuleNode, path: &[usize]) -> &'a RuleNode {
    path.iter().fold(root, |node, &i| &node.children()[i])
}

fn node_at_mut<'a>(root: &'a mut RuleNode, path: &[usize]) -> &'a mut RuleNode {
    let mut node = root;
    for &i in path {
        node = match node {
            RuleNode::Operator { children, .. } => &mut children[i],
            RuleNode::Literal { .. } => unreachable!("path runs through a literal"),
        };
    }
    node
}

/// All node paths in pre-order, split into literals and operators.
fn paths(root: &RuleNode) -> (Vec<Path>, Vec<Path>) {
    fn walk(node: &RuleNode, path: &mut Path, literals: &mut Vec<Path>, operators: &mut Vec<Path>) {
        match node {
            RuleNode::Literal { .. } => literals.push(path.clone()),
            RuleNode::Operator { children, .. } => {
                operators.push(path.clone());
                for (i, child) in children.iter().enumerate() {
                    path.push(i);
                    walk(child, path, literals, operators);
                    path.pop();
                }
            }
        }
    }
    let (mut literals, mut operators) = (Vec::new(), Vec::new());
    walk(root, &mut Vec::new(), &mut literals, &mut operators);
    (literals, operators)
}

fn random_k(kind: OperatorKind, arity: usize, rng: &mut impl Rng) -> Operator {
    kind.with_k(if kind.is_parameterized() { rng.gen_range(1..arity) } else { 0 })
}

fn random_literal(predicate_count: usize, rng: &mut impl Rng) -> (usize, bool) {
    (rng.gen_range(0..predicate_count), rng.gen_bool(0.5))
}

/// A random valid rule over predicates `0..predicate_count`: an operator
/// root over literals, with occasional two-literal subtrees when depth allows.
pub fn random_rule(predicate_count: usize, cfg: &ObjectiveConfig, rng: &mut impl Rng) -> RuleNode {
    assert!(predicate_count >= 1, "random_rule needs at least one predicate");
    if cfg.max_complexity < 2 {
        let (p, neg) = random_literal(predicate_count, rng);
        return RuleNode::Literal { predicate: p, negated: neg };
    }
    let arity = rng.gen_range(2..=cfg.max_complexity.min(3));
    let root_kind = *cfg.allowed_operators.choose(rng).expect("allowed operators validated non-empty");
    let mut budget = cfg.max_complexity - arity;
    let children = (0..arity)
        .map(|_| {
            let (p, neg) = random_literal(predicate_count, rng);
            let leaf = RuleNode::Literal { predicate: p, negated: neg };
            if cfg.max_depth >= 2 && budget >= 1 && rng.gen_bool(0.25) {
                budget -= 1;
                let kind = *cfg.allowed_operators.choose(rng).unwrap();
                let (q, qneg) = random_literal(predicate_count, rng);
                RuleNode::op(random_k(kind, 2, rng), vec![leaf, RuleNode::Literal { predicate: q, negated: qneg }])
            } else {
                leaf
            }
        })
        .collect();
    RuleNode::op(random_k(root_kind, arity, rng), children)
}

/// Valid targets for each move kind.
struct Targets {
    literals: Vec<Path>,
    operators: Vec<Path>,
    removable: Vec<Path>,
    swappable: Vec<Path>,
    adjustable: Vec<Path>,
    growable: Vec<Path>,
    prunable: Vec<Path>,
    can_add: bool,
    all_nodes: usize,
}

impl Targets {
    fn new(root: &RuleNode, predicate_count: usize, cfg: &ObjectiveConfig) -> Self {
        let (literals, operators) = paths(root);
        let complexity = root.complexity();
        let can_add = complexity < cfg.max_complexity;
        let removable = literals
            .iter()
            .filter(|p| !p.is_empty() && node_at(root, &p[..p.len() - 1]).children().len() >= 3)
            .cloned()
            .collect();
        let swappable = operators
            .iter()
            .filter(|p| match node_at(root, p) {
                RuleNode::Operator { op, .. } => cfg.allowed_operators.iter().any(|&k| k != op.kind()),
                RuleNode::Literal { .. } => false,
            })
            .cloned()
            .collect();
        let adjustable = operators
            .iter()
            .filter(|p| matches!(node_at(root, p), RuleNode::Operator { op, .. } if op.k().is_some()))
            .cloned()
            .collect();
        let growable = if can_add && predicate_count > 0 {
            literals.iter().filter(|p| p.len() < cfg.max_depth).cloned().collect()
        } else {
            Vec::new()
        };
        let prunable = operators.iter().filter(|p| !p.is_empty()).cloned().collect();
        let all_nodes = literals.len() + operators.len();
        let literals = if predicate_count >= 1 { literals } else { Vec::new() };
        Targets { literals, operators, removable, swappable, adjustable, growable, prunable, can_add, all_nodes }
    }

    fn count(&self, kind: MoveKind) -> usize {
        match kind {
            MoveKind::ReplaceLiteral => self.literals.len(),
            MoveKind::AddLiteral => if self.can_add { self.operators.len() } else { 0 },
            MoveKind::RemoveLiteral => self.removable.len(),
            MoveKind::SwapOperator => self.swappable.len(),
            MoveKind::AdjustK => self.adjustable.len(),
            MoveKind::ToggleNegation => self.all_nodes,
            MoveKind::GrowSubtree => self.growable.len(),
            MoveKind::PruneSubtree => self.prunable.len(),
        }
    }
}

/// Move kinds with at least one valid target on `root`.
pub fn applicable_kinds(root: &RuleNode, predicate_count: usize, cfg: &ObjectiveConfig) -> Vec<MoveKind> {
    let targets = Targets::new(root, predicate_count, cfg);
    MoveKind::ALL.into_iter().filter(|&k| targets.count(k) > 0).collect()
}

/// Draws a move and returns it with the resulting tree; `rule` is untouched.
pub fn propose_move(
    rule: &RuleNode,
    predicate_count: usize,
    cfg: &ObjectiveConfig,
    rng: &mut impl Rng,
) -> (Move, RuleNode) {
    let targets = Targets::new(rule, predicate_count, cfg);
    let kinds: Vec<MoveKind> =
        MoveKind::ALL.into_iter().filter(|&k| targets.count(k) > 0 && cfg.weight(k) > 0.0).collect();
    // ToggleNegation always has a target; fall back to it if weights zero everything out.
    let kind = if kinds.is_empty() {
        MoveKind::ToggleNegation
    } else {
        *kinds.choose_weighted(rng, |&k| cfg.weight(k)).expect("positive weights")
    };
    let mv = draw_move(kind, rule, &targets, predicate_count, cfg, rng);
    let next = apply_move(rule, &mv);
    (mv, next)
}

fn draw_move(
    kind: MoveKind,
    rule: &RuleNode,
    targets: &Targets,
    predicate_count: usize,
    cfg: &ObjectiveConfig,
    rng: &mut impl Rng,
) -> Move {
    let pick = |list: &[Path], rng: &mut _| -> Path { list.choose(rng).expect("applicable kind has targets").clone() };
    match kind {
        MoveKind::ReplaceLiteral => {
            let path = pick(&targets.literals, rng);
            let RuleNode::Literal { predicate, negated } = *node_at(rule, &path) else { unreachable!() };
            // uniform over the other 2P - 1 (predicate, polarity) pairs
            let current = predicate * 2 + negated as usize;
            let mut draw = rng.gen_range(0..predicate_count * 2 - 1);
            if draw >= current {
                draw += 1;
            }
            Move::ReplaceLiteral { path, predicate: draw / 2, negated: draw % 2 == 1 }
        }
        MoveKind::AddLiteral => {
            let path = pick(&targets.operators, rng);
            let (predicate, negated) = random_literal(predicate_count, rng);
            Move::AddLiteral { path, predicate, negated }
        }
        MoveKind::RemoveLiteral => Move::RemoveLiteral { path: pick(&targets.removable, rng) },
        MoveKind::SwapOperator => {
            let path = pick(&targets.swappable, rng);
            let RuleNode::Operator { op, children, .. } = node_at(rule, &path) else { unreachable!() };
            let choices: Vec<OperatorKind> =
                cfg.allowed_operators.iter().copied().filter(|&k| k != op.kind()).collect();
            let kind = *choices.choose(rng).unwrap();
            let arity = children.len();
            let new_op = match op.k() {
                Some(k) if kind.is_parameterized() => kind.with_k(k.min(arity)),
                _ => random_k(kind, arity, rng),
            };
            Move::SwapOperator { path, op: new_op }
        }
        MoveKind::AdjustK => {
            let path = pick(&targets.adjustable, rng);
            let RuleNode::Operator { op, children, .. } = node_at(rule, &path) else { unreachable!() };
            let k = op.k().unwrap();
            let mut options = Vec::with_capacity(2);
            if k > 0 {
                options.push(k - 1);
            }
            if k < children.len() {
                options.push(k + 1);
            }
            Move::AdjustK { path, k: *options.choose(rng).unwrap() }
        }
        MoveKind::ToggleNegation => {
            let (literals, operators) = paths(rule);
            let all: Vec<Path> = operators.into_iter().chain(literals).collect();
            Move::ToggleNegation { path: pick(&all, rng) }
        }
        MoveKind::GrowSubtree => {
            let path = pick(&targets.growable, rng);
            let kind = *cfg.allowed_operators.choose(rng).unwrap();
            let (predicate, negated) = random_literal(predicate_count, rng);
            Move::GrowSubtree { path, op: random_k(kind, 2, rng), predicate, negated }
        }
        MoveKind::PruneSubtree => {
            let path = pick(&targets.prunable, rng);
            let (leaves, _) = paths(node_at(rule, &path));
            Move::PruneSubtree { path, leaf: pick(&leaves, rng) }
        }
    }
}

/// Applies a move produced by [`propose_move`] for the same tree.
pub fn apply_move(rule: &RuleNode, mv: &Move) -> RuleNode {
    let mut next = rule.clone();
    match mv {
        Move::ReplaceLiteral { path, predicate, negated } => {
            *node_at_mut(&mut next, path) = RuleNode::Literal { predicate: *predicate, negated: *negated };
        }
        Move::AddLiteral { path, predicate, negated } => {
            if let RuleNode::Operator { children, .. } = node_at_mut(&mut next, path) {
                children.push(RuleNode::Literal { predicate: *predicate, negated: *negated });
            }
        }
        Move::RemoveLiteral { path } => {
            let (index, parent) = path.split_last().expect("root is never removed");
            if let RuleNode::Operator { op, children, .. } = node_at_mut(&mut next, parent) {
                children.remove(*index);
                let arity = children.len();
                if let Some(k) = op.k() {
                    *op = op.kind().with_k(k.min(arity));
                }
            }
        }
        Move::SwapOperator { path, op: new_op } => {
            if let RuleNode::Operator { op, .. } = node_at_mut(&mut next, path) {
                *op = *new_op;
            }
        }
        Move::AdjustK { path, k } => {
            if let RuleNode::Operator { op, .. } = node_at_mut(&mut next, path) {
                *op = op.kind().with_k(*k);
            }
        }
        Move::ToggleNegation { path } => node_at_mut(&mut next, path).toggle_negation(),
        Move::GrowSubtree { path, op, predicate, negated } => {
            let slot = node_at_mut(&mut next, path);
            let leaf = slot.clone();
            *slot = RuleNode::op(*op, vec![leaf, RuleNode::Literal { predicate: *predicate, negated: *negated }]);
        }
        Move::PruneSubtree { path, leaf } => {
            let replacement = node_at(rule, path);
            let replacement = node_at(replacement, leaf).clone();
            *node_at_mut(&mut next, path) = replacement;
        }
    }
    next
}

/// Rule view of a tree over the dataset's full predicate table.
pub(crate) fn to_rule(root: RuleNode, predicates: &[crate::formula::Predicate]) -> Rule {
    let used = root.literal_indices();
    let mut order: Vec<usize> = Vec::new();
    for i in used {
        if !order.contains(&i) {
            order.push(i);
        }
    }
    let root = root.map_literals(&|i| order.iter().position(|&j| j == i).unwrap());
    Rule { root, predicates: order.iter().map(|&i| predicates[i].clone()).collect(), score: None }
}
