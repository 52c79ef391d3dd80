use std::borrow::Cow;
use std::fmt;

use crate::bits::BitColumn;
use crate::dataset::BinarizedDataset;
use crate::formula::{Comparator, Predicate, PredicateValue, RuleNode};
use crate::{Error, Result};

/// A rule tree together with the predicate table its literals index into.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub root: RuleNode,
    pub predicates: Vec<Predicate>,
    /// Metric score recorded by the optimizer, when known.
    pub score: Option<f64>,
}

impl Rule {
    pub fn new(root: RuleNode, predicates: Vec<Predicate>) -> Result<Self> {
        root.validate(predicates.len(), None)?;
        for p in &predicates {
            p.validate()?;
        }
        Ok(Rule { root, predicates, score: None })
    }

    pub fn with_score(mut self, score: f64) -> Self {
        self.score = Some(score);
        self
    }

    /// Literal count; always recomputed from the tree.
    pub fn complexity(&self) -> usize {
        self.root.complexity()
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn validate(&self, max_depth: Option<usize>) -> Result<()> {
        self.root.validate(self.predicates.len(), max_depth)
    }

    /// Predicate behind a literal index.
    pub fn predicate(&self, index: usize) -> Option<&Predicate> {
        self.predicates.get(index)
    }

    /// Rule text in the formula grammar.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    /// Compares trees with literal indices resolved to their predicates, so
    /// two rules with differently ordered tables can still be equal.
    pub fn structurally_eq(&self, other: &Rule) -> bool {
        fn eq(a: &RuleNode, ra: &Rule, b: &RuleNode, rb: &Rule) -> bool {
            match (a, b) {
                (
                    RuleNode::Literal { predicate: pa, negated: na },
                    RuleNode::Literal { predicate: pb, negated: nb },
                ) => na == nb && ra.predicates.get(*pa) == rb.predicates.get(*pb),
                (
                    RuleNode::Operator { op: oa, children: ca, negated: na },
                    RuleNode::Operator { op: ob, children: cb, negated: nb },
                ) => {
                    oa == ob
                        && na == nb
                        && ca.len() == cb.len()
                        && ca.iter().zip(cb).all(|(x, y)| eq(x, ra, y, rb))
                }
                _ => false,
            }
        }
        eq(&self.root, self, &other.root, other)
    }

    /// Evaluates the rule on every row of a binarized dataset.
    ///
    /// Rule predicates are matched to dataset columns by feature, comparator
    /// and value. A `<=` predicate is also satisfied by the complement of the
    /// matching `>` column, and vice versa.
    pub fn predict(&self, dataset: &BinarizedDataset) -> Result<BitColumn> {
        let columns = self.resolve_columns(dataset)?;
        let refs: Vec<&BitColumn> = columns.iter().map(|c| c.as_ref()).collect();
        self.root.evaluate_columns(&refs, dataset.rows())
    }

    pub fn predict_bools(&self, dataset: &BinarizedDataset) -> Result<Vec<bool>> {
        Ok(self.predict(dataset)?.to_bools())
    }

    fn resolve_columns<'a>(&self, dataset: &'a BinarizedDataset) -> Result<Vec<Cow<'a, BitColumn>>> {
        self.predicates
            .iter()
            .map(|p| {
                if let Some(i) = dataset.column_index(p) {
                    return Ok(Cow::Borrowed(dataset.column(i)));
                }
                if let Some(mirror) = mirrored(p) {
                    if let Some(i) = dataset.column_index(&mirror) {
                        let mut col = dataset.column(i).clone();
                        col.negate();
                        return Ok(Cow::Owned(col));
                    }
                }
                Err(Error::Structural(format!("dataset has no column for predicate `{p}`")))
            })
            .collect()
    }
}

fn mirrored(p: &Predicate) -> Option<Predicate> {
    let comparator = match p.comparator {
        Comparator::GreaterThan => Comparator::LessOrEqual,
        Comparator::LessOrEqual => Comparator::GreaterThan,
        Comparator::Equals => return None,
    };
    match p.value {
        PredicateValue::Number(v) => Some(Predicate { feature: p.feature.clone(), comparator, value: PredicateValue::Number(v) }),
        PredicateValue::Category(_) => None,
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        super::parse::write_node(f, &self.root, &self.predicates)
    }
}

impl std::str::FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        super::parse(s)
    }
}
