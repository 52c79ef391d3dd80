use serde::{Deserialize, Serialize};

use crate::dataset::{BinarizationSpec, FeatureSchema, RawRow};
use crate::llm::{self, Provider, Task};
use crate::{Error, Result, Rule};

/// Appended to the local explanation when the provider's classification had
/// to be overridden by the rule verdict.
pub const FIDELITY_NOTICE: &str = "Fidelity notice: the generated explanation stated a different classification \
     than the rule; the classification shown is the rule's actual verdict.";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Explanation {
    pub global: String,
    pub local: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleExplanation {
    pub classification: bool,
    pub applied_rules: Vec<String>,
    pub explanation: Explanation,
    /// True only when the provider's own classification matched the rule.
    pub grounded: bool,
}

/// Evaluates `rule` on one raw record under `spec`'s binarization semantics.
pub fn rule_verdict(rule: &Rule, row: &RawRow, spec: &BinarizationSpec, schema: &[FeatureSchema]) -> Result<bool> {
    let truth = spec.binarize_row(schema, row, &rule.predicates)?;
    rule.root.evaluate(&truth)
}

/// Explains the classification of `row` by the top rule (`rules[0]`).
///
/// The verdict is computed from the rule alone. The provider's answer is kept
/// as prose; if its classification disagrees with the verdict, the verdict
/// wins, `grounded` is false and a fidelity notice is appended.
pub fn explain_instance(
    rules: &[Rule],
    row: &RawRow,
    spec: &BinarizationSpec,
    schema: &[FeatureSchema],
    provider: &dyn Provider,
    temperature: f64,
) -> Result<RuleExplanation> {
    let top = rules.first().ok_or_else(|| Error::Validation("no rules to explain with".into()))?;
    let verdict = rule_verdict(top, row, spec, schema)?;

    let prompt = llm::build_explanation_prompt(rules, row)?;
    let reply = llm::complete(provider, Task::Explanation, &prompt, temperature)?;
    let parsed = llm::parse_explanation(&llm::extract_json(&reply)?)?;

    let grounded = parsed.classification == verdict;
    let mut local = parsed.local;
    if !grounded {
        if !local.is_empty() {
            local.push_str("\n\n");
        }
        local.push_str(FIDELITY_NOTICE);
    }
    let applied_rules = if parsed.applied_rules.is_empty() { vec![top.to_text()] } else { parsed.applied_rules };
    Ok(RuleExplanation {
        classification: verdict,
        applied_rules,
        explanation: Explanation { global: parsed.global, local },
        grounded,
    })
}
