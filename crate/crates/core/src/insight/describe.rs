use std::fmt::Write;

use crate::formula::{Comparator, Operator, Predicate, RuleNode};
use crate::llm::{self, Provider, Task};
use crate::{Result, Rule};

#[derive(Debug, Clone, PartialEq)]
pub struct RuleDescription {
    pub rule: Rule,
    /// Mentions every feature the rule tests.
    pub text: String,
}

/// Natural-language rendering of `rule`.
///
/// Without a provider (or one lacking a description fixture) the fixed
/// template renderer is used, e.g. `any of: duration greater than 550; pdays
/// at most 100; month equals mar`. Provider text that omits a feature is
/// completed with the template rendering so the description stays faithful.
pub fn describe_rule(rule: &Rule, provider: Option<&dyn Provider>, temperature: f64) -> Result<RuleDescription> {
    let template = render(&rule.root, &rule.predicates, true);
    let text = match provider.filter(|p| p.supports(Task::RuleDescription)) {
        None => template,
        Some(provider) => {
            let prompt = format!(
                "Describe the following Boolean classification rule in one plain-English sentence. \
                 Mention every feature it uses.\n\nRule: {rule}\nLiteral reading: {template}\n\nReturn only the sentence."
            );
            let reply = super::unwrap_text(&llm::complete(provider, Task::RuleDescription, &prompt, temperature)?, &[
                "description",
                "text",
            ]);
            let missing = rule.predicates.iter().any(|p| !reply.contains(p.feature.as_str()));
            if missing {
                log::warn!("provider description of `{rule}` omits features; appending template rendering");
                format!("{reply} ({template})")
            } else {
                reply
            }
        }
    };
    Ok(RuleDescription { rule: rule.clone(), text })
}

fn render(node: &RuleNode, predicates: &[Predicate], top: bool) -> String {
    match node {
        RuleNode::Literal { predicate, negated } => literal(&predicates[*predicate], *negated),
        RuleNode::Operator { op, children, negated } => {
            let mut s = String::new();
            if *negated {
                s.push_str("not ");
            }
            s.push_str(&match op {
                Operator::And => "all of".to_string(),
                Operator::Or => "any of".to_string(),
                Operator::AtLeast(k) => format!("at least {k} of"),
                Operator::AtMost(k) => format!("at most {k} of"),
                Operator::Choose(k) => format!("exactly {k} of"),
            });
            s.push_str(": ");
            let parts: Vec<String> = children.iter().map(|c| render(c, predicates, false)).collect();
            s.push_str(&parts.join("; "));
            if top {
                s
            } else {
                format!("({s})")
            }
        }
    }
}

fn literal(p: &Predicate, negated: bool) -> String {
    let mut s = String::new();
    let phrase = match (p.comparator, negated) {
        (Comparator::GreaterThan, false) | (Comparator::LessOrEqual, true) => "greater than",
        (Comparator::GreaterThan, true) | (Comparator::LessOrEqual, false) => "at most",
        (Comparator::Equals, false) => "equals",
        (Comparator::Equals, true) => "not equal to",
    };
    let _ = write!(s, "{} {phrase} {}", p.feature, p.value);
    s
}
