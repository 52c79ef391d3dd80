use crate::formula::{CnfFormula, RuleNode};

/// Right-hand side of a truth-table comparison.
#[derive(Debug, Clone, Copy)]
pub enum Formula<'a> {
    Node(&'a RuleNode),
    Cnf(&'a CnfFormula),
}

impl<'a> From<&'a RuleNode> for Formula<'a> {
    fn from(node: &'a RuleNode) -> Self {
        Formula::Node(node)
    }
}

impl<'a> From<&'a CnfFormula> for Formula<'a> {
    fn from(cnf: &'a CnfFormula) -> Self {
        Formula::Cnf(cnf)
    }
}

impl Formula<'_> {
    fn evaluate(&self, assignment: &[bool]) -> Option<bool> {
        match self {
            Formula::Node(node) => node.evaluate(assignment).ok(),
            Formula::Cnf(cnf) => {
                if cnf.num_variables > assignment.len() {
                    None
                } else {
                    Some(cnf.evaluate(assignment))
                }
            }
        }
    }
}

/// True iff both formulas agree on all `2^n` assignments of `n` predicates.
/// A formula that references a predicate outside `0..n` never agrees.
pub fn truth_table_equivalent<'a>(a: &RuleNode, b: impl Into<Formula<'a>>, n: usize) -> bool {
    assert!(n <= 20, "truth tables are limited to 20 variables");
    let b = b.into();
    let mut assignment = vec![false; n];
    for bits in 0u32..(1u32 << n) {
        for (i, slot) in assignment.iter_mut().enumerate() {
            *slot = bits >> i & 1 == 1;
        }
        match (a.evaluate(&assignment).ok(), b.evaluate(&assignment)) {
            (Some(x), Some(y)) if x == y => {}
            _ => return false,
        }
    }
    true
}
