use std::fmt::Write as _;

use crate::dataset::{FeatureKind, FeatureSchema, FeatureSummary, RawRow};
use crate::formula::Rule;
use crate::{Error, Result};

pub const FEATURE_SELECTION_TEMPLATE: &str = include_str!("templates/feature_selection.txt");
pub const THRESHOLD_TEMPLATE: &str = include_str!("templates/thresholds.txt");
pub const EXPLANATION_TEMPLATE: &str = include_str!("templates/explanation.txt");

/// Feature-selection prompt with the schema listed inline, so the model does
/// not need to open `dataset_reference`.
pub fn build_feature_selection_prompt(
    schema: &[FeatureSchema],
    objective: &str,
    dataset_reference: &str,
    model_type: &str,
) -> Result<String> {
    if schema.is_empty() {
        return Err(Error::Validation("feature selection needs a non-empty schema".into()));
    }
    let mut prompt =
        FEATURE_SELECTION_TEMPLATE.replace("<DATASET_URL>", dataset_reference).replace("<MODEL_TYPE>", model_type);
    if !objective.trim().is_empty() {
        let _ = write!(prompt, "\nPrediction objective: {}\n", objective.trim());
    }
    prompt.push_str("\nFeatures in the dataset:\n");
    for (i, f) in schema.iter().enumerate() {
        let kind = match f.kind {
            FeatureKind::Numeric => "numeric",
            FeatureKind::Categorical => "categorical",
        };
        let _ = write!(prompt, "{}. {} ({kind}", i + 1, f.name);
        if let Some(unit) = f.unit.as_deref().filter(|u| !u.is_empty()) {
            let _ = write!(prompt, ", {unit}");
        }
        prompt.push(')');
        if let Some(desc) = f.description.as_deref().filter(|d| !d.is_empty()) {
            let _ = write!(prompt, ": {desc}");
        }
        prompt.push('\n');
    }
    Ok(prompt)
}

/// Threshold prompt listing each numeric feature with its range, mean and deciles.
pub fn build_threshold_prompt(summaries: &[FeatureSummary]) -> Result<String> {
    let numeric: Vec<_> = summaries.iter().filter_map(FeatureSummary::as_numeric).collect();
    if numeric.is_empty() {
        return Err(Error::Validation("threshold recommendation needs at least one numeric feature".into()));
    }
    let mut list = numeric.iter().map(|s| s.name.as_str()).collect::<Vec<_>>().join(", ");
    for s in &numeric {
        let _ = write!(list, "\n- {}", s.name);
        if let (Some(min), Some(max), Some(mean)) = (s.min, s.max, s.mean) {
            let deciles: Vec<String> = s.quantiles.iter().map(|q| q.value.to_string()).collect();
            let _ = write!(list, ": min {min}, max {max}, mean {mean:.2}, deciles [{}]", deciles.join(", "));
        } else {
            list.push_str(": no observed values");
        }
    }
    Ok(THRESHOLD_TEMPLATE.replace("<numerical_features_list>", &list))
}

/// Explanation prompt for one raw record under `rules`.
pub fn build_explanation_prompt(rules: &[Rule], candidate: &RawRow) -> Result<String> {
    if rules.is_empty() {
        return Err(Error::Validation("explanation needs at least one rule".into()));
    }
    if candidate.is_empty() {
        return Err(Error::Validation("explanation needs a non-empty candidate record".into()));
    }
    let rules_text = rules.iter().map(Rule::to_text).collect::<Vec<_>>().join("\n");
    let candidate_text = candidate.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(", ");
    Ok(EXPLANATION_TEMPLATE.replace("<rules>", &rules_text).replace("<candidate_data>", &candidate_text))
}
