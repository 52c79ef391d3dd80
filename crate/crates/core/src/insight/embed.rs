use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{Comparator, Predicate};
use crate::insight::RuleDescription;
use crate::llm::{self, Provider};
use crate::{Error, Result, Rule};

/// Canonical printed form of a literal; `<=` and negated `>` coincide.
pub fn literal_key(p: &Predicate, negated: bool) -> String {
    match (p.comparator, negated) {
        (Comparator::GreaterThan, false) | (Comparator::LessOrEqual, true) => format!("{}>{}", p.feature, p.value),
        (Comparator::GreaterThan, true) | (Comparator::LessOrEqual, false) => format!("{}<={}", p.feature, p.value),
        (Comparator::Equals, false) => format!("{p}"),
        (Comparator::Equals, true) => format!("~{p}"),
    }
}

/// Provider embeddings of the description texts, or, without a provider,
/// [`indicator_embeddings`] of the rules.
pub fn embed_rules(descriptions: &[RuleDescription], provider: Option<&dyn Provider>) -> Result<Vec<Vec<f64>>> {
    if descriptions.is_empty() {
        return Err(Error::Validation("no rules to embed".into()));
    }
    match provider {
        Some(provider) => {
            let texts: Vec<String> = descriptions.iter().map(|d| d.text.clone()).collect();
            llm::embed(provider, &texts)
        }
        None => {
            let rules: Vec<Rule> = descriptions.iter().map(|d| d.rule.clone()).collect();
            Ok(indicator_embeddings(&rules))
        }
    }
}

/// Unit-normalized 0/1 vectors over the union of (predicate, polarity) pairs
/// used by the rules, so `cos(a, b) = |A ∩ B| / sqrt(|A| |B|)`.
pub fn indicator_embeddings(rules: &[Rule]) -> Vec<Vec<f64>> {
    let supports: Vec<BTreeSet<String>> = rules
        .iter()
        .map(|rule| {
            let mut keys = BTreeSet::new();
            rule.root.visit_literals(&mut |p, negated| {
                keys.insert(literal_key(&rule.predicates[p], negated));
            });
            keys
        })
        .collect();
    let vocabulary: BTreeMap<&str, usize> = supports
        .iter()
        .flatten()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, k)| (k.as_str(), i))
        .collect();
    supports
        .iter()
        .map(|keys| {
            let mut v = vec![0.0; vocabulary.len()];
            let weight = 1.0 / (keys.len() as f64).sqrt();
            for k in keys {
                v[vocabulary[k.as_str()]] = weight;
            }
            v
        })
        .collect()
}
