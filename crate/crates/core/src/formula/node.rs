use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::BitColumn;
use crate::{Error, Result};

/// Operator family without its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OperatorKind {
    And,
    Or,
    AtLeast,
    AtMost,
    Choose,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 5] =
        [OperatorKind::And, OperatorKind::Or, OperatorKind::AtLeast, OperatorKind::AtMost, OperatorKind::Choose];

    pub fn is_parameterized(self) -> bool {
        matches!(self, OperatorKind::AtLeast | OperatorKind::AtMost | OperatorKind::Choose)
    }

    pub fn with_k(self, k: usize) -> Operator {
        match self {
            OperatorKind::And => Operator::And,
            OperatorKind::Or => Operator::Or,
            OperatorKind::AtLeast => Operator::AtLeast(k),
            OperatorKind::AtMost => Operator::AtMost(k),
            OperatorKind::Choose => Operator::Choose(k),
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorKind::And => "And",
            OperatorKind::Or => "Or",
            OperatorKind::AtLeast => "AtLeast",
            OperatorKind::AtMost => "AtMost",
            OperatorKind::Choose => "Choose",
        })
    }
}

/// A Boolean connective. The counting operators carry their `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Operator {
    And,
    Or,
    AtLeast(usize),
    AtMost(usize),
    /// Exactly `k` children hold.
    Choose(usize),
}

impl Operator {
    pub fn kind(self) -> OperatorKind {
        match self {
            Operator::And => OperatorKind::And,
            Operator::Or => OperatorKind::Or,
            Operator::AtLeast(_) => OperatorKind::AtLeast,
            Operator::AtMost(_) => OperatorKind::AtMost,
            Operator::Choose(_) => OperatorKind::Choose,
        }
    }

    pub fn k(self) -> Option<usize> {
        match self {
            Operator::And | Operator::Or => None,
            Operator::AtLeast(k) | Operator::AtMost(k) | Operator::Choose(k) => Some(k),
        }
    }

    /// Truth value given how many of `arity` children hold.
    pub fn holds(self, true_count: usize, arity: usize) -> bool {
        match self {
            Operator::And => true_count == arity,
            Operator::Or => true_count >= 1,
            Operator::AtLeast(k) => true_count >= k,
            Operator::AtMost(k) => true_count <= k,
            Operator::Choose(k) => true_count == k,
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.k() {
            Some(k) => write!(f, "{}{k}", self.kind()),
            None => write!(f, "{}", self.kind()),
        }
    }
}

/// A node of a rule tree. Literals index into the owning rule's predicate table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleNode {
    Literal { predicate: usize, negated: bool },
    Operator { op: Operator, children: Vec<RuleNode>, negated: bool },
}

impl RuleNode {
    pub fn literal(predicate: usize) -> Self {
        RuleNode::Literal { predicate, negated: false }
    }

    pub fn not_literal(predicate: usize) -> Self {
        RuleNode::Literal { predicate, negated: true }
    }

    pub fn op(op: Operator, children: Vec<RuleNode>) -> Self {
        RuleNode::Operator { op, children, negated: false }
    }

    pub fn negated(mut self) -> Self {
        self.toggle_negation();
        self
    }

    pub fn is_negated(&self) -> bool {
        match self {
            RuleNode::Literal { negated, .. } | RuleNode::Operator { negated, .. } => *negated,
        }
    }

    pub fn toggle_negation(&mut self) {
        match self {
            RuleNode::Literal { negated, .. } | RuleNode::Operator { negated, .. } => *negated = !*negated,
        }
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, RuleNode::Literal { .. })
    }

    pub fn children(&self) -> &[RuleNode] {
        match self {
            RuleNode::Literal { .. } => &[],
            RuleNode::Operator { children, .. } => children,
        }
    }

    /// Number of literal leaves.
    pub fn complexity(&self) -> usize {
        match self {
            RuleNode::Literal { .. } => 1,
            RuleNode::Operator { children, .. } => children.iter().map(RuleNode::complexity).sum(),
        }
    }

    /// Operator levels on the longest root-to-leaf path; a bare literal has depth 0.
    pub fn depth(&self) -> usize {
        match self {
            RuleNode::Literal { .. } => 0,
            RuleNode::Operator { children, .. } => 1 + children.iter().map(RuleNode::depth).max().unwrap_or(0),
        }
    }

    /// Predicate indices of all leaves, left to right.
    pub fn literal_indices(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit_literals(&mut |p, _| out.push(p));
        out
    }

    pub fn visit_literals(&self, f: &mut impl FnMut(usize, bool)) {
        match self {
            RuleNode::Literal { predicate, negated } => f(*predicate, *negated),
            RuleNode::Operator { children, .. } => children.iter().for_each(|c| c.visit_literals(f)),
        }
    }

    pub fn map_literals(&self, f: &impl Fn(usize) -> usize) -> RuleNode {
        match self {
            RuleNode::Literal { predicate, negated } => RuleNode::Literal { predicate: f(*predicate), negated: *negated },
            RuleNode::Operator { op, children, negated } => RuleNode::Operator {
                op: *op,
                children: children.iter().map(|c| c.map_literals(f)).collect(),
                negated: *negated,
            },
        }
    }

    /// Checks arity, `k` bounds, predicate bounds and (optionally) depth.
    pub fn validate(&self, predicate_count: usize, max_depth: Option<usize>) -> Result<()> {
        if let Some(max) = max_depth {
            let depth = self.depth();
            if depth > max {
                return Err(Error::Validation(format!("rule depth {depth} exceeds maximum {max}")));
            }
        }
        self.validate_node(predicate_count)
    }

    fn validate_node(&self, predicate_count: usize) -> Result<()> {
        match self {
            RuleNode::Literal { predicate, .. } => {
                if *predicate >= predicate_count {
                    return Err(Error::Structural(format!(
                        "predicate index {predicate} out of bounds for {predicate_count} predicates"
                    )));
                }
                Ok(())
            }
            RuleNode::Operator { op, children, .. } => {
                if children.len() < 2 {
                    return Err(Error::Validation(format!("{op} needs at least 2 children, got {}", children.len())));
                }
                if let Some(k) = op.k() {
                    if k > children.len() {
                        return Err(Error::Validation(format!("{op}: k={k} exceeds arity {}", children.len())));
                    }
                }
                children.iter().try_for_each(|c| c.validate_node(predicate_count))
            }
        }
    }

    /// Evaluates the node on one assignment of predicate truth values.
    pub fn evaluate(&self, assignment: &[bool]) -> Result<bool> {
        match self {
            RuleNode::Literal { predicate, negated } => assignment
                .get(*predicate)
                .map(|&bit| bit ^ negated)
                .ok_or_else(|| {
                    Error::Structural(format!(
                        "predicate index {predicate} out of bounds for assignment of length {}",
                        assignment.len()
                    ))
                }),
            RuleNode::Operator { op, children, negated } => {
                let mut count = 0;
                for child in children {
                    if child.evaluate(assignment)? {
                        count += 1;
                    }
                }
                Ok(op.holds(count, children.len()) ^ negated)
            }
        }
    }

    /// Evaluates the node on every row at once. `columns[i]` holds predicate `i`.
    pub fn evaluate_columns(&self, columns: &[&BitColumn], rows: usize) -> Result<BitColumn> {
        match self {
            RuleNode::Literal { predicate, negated } => {
                let column = columns.get(*predicate).ok_or_else(|| {
                    Error::Structural(format!(
                        "predicate index {predicate} out of bounds for {} columns",
                        columns.len()
                    ))
                })?;
                let mut out = (*column).clone();
                if *negated {
                    out.negate();
                }
                Ok(out)
            }
            RuleNode::Operator { op, children, negated } => {
                let mut out = match op {
                    Operator::And => {
                        let mut acc = BitColumn::ones(rows);
                        for child in children {
                            acc.and_assign(&child.evaluate_columns(columns, rows)?);
                        }
                        acc
                    }
                    Operator::Or => {
                        let mut acc = BitColumn::zeros(rows);
                        for child in children {
                            acc.or_assign(&child.evaluate_columns(columns, rows)?);
                        }
                        acc
                    }
                    Operator::AtLeast(k) => {
                        let counters = count_at_least(children, *k, columns, rows)?;
                        counters[*k].clone()
                    }
                    Operator::AtMost(k) => {
                        let counters = count_at_least(children, k + 1, columns, rows)?;
                        let mut out = counters[k + 1].clone();
                        out.negate();
                        out
                    }
                    Operator::Choose(k) => {
                        let counters = count_at_least(children, k + 1, columns, rows)?;
                        let mut out = counters[*k].clone();
                        out.and_not_assign(&counters[k + 1]);
                        out
                    }
                };
                if *negated {
                    out.negate();
                }
                Ok(out)
            }
        }
    }
}

/// `result[j]` marks rows where at least `j` children hold, for `j <= limit`.
fn count_at_least(children: &[RuleNode], limit: usize, columns: &[&BitColumn], rows: usize) -> Result<Vec<BitColumn>> {
    let mut at_least = vec![BitColumn::zeros(rows); limit + 1];
    at_least[0] = BitColumn::ones(rows);
    for child in children {
        let value = child.evaluate_columns(columns, rows)?;
        for j in (1..=limit).rev() {
            let (lower, upper) = at_least.split_at_mut(j);
            upper[0].or_assign_and(&lower[j - 1], &value);
        }
    }
    Ok(at_least)
}

/// Pushes a set negation flag into the operator where a single-operator dual
/// exists: `~AtLeast(k) = AtMost(k-1)`, `~AtMost(k) = AtLeast(k+1)`, and De
/// Morgan for `And`/`Or`. `Choose` and the degenerate bounds keep the flag.
pub fn negation_dual(node: &RuleNode) -> RuleNode {
    let RuleNode::Operator { op, children, negated: true } = node else {
        return node.clone();
    };
    let arity = children.len();
    let flipped = || children.iter().cloned().map(RuleNode::negated).collect::<Vec<_>>();
    match *op {
        Operator::AtLeast(k) if k >= 1 => RuleNode::op(Operator::AtMost(k - 1), children.clone()),
        Operator::AtMost(k) if k < arity => RuleNode::op(Operator::AtLeast(k + 1), children.clone()),
        Operator::And => RuleNode::op(Operator::Or, flipped()),
        Operator::Or => RuleNode::op(Operator::And, flipped()),
        _ => node.clone(),
    }
}
