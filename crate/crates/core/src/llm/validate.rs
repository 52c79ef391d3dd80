//! Schema-grounded validation of provider output. Every function here is pure
//! and idempotent on its own serialized output.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::dataset::{FeatureSchema, FeatureSummary};
use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureSelectionResult {
    #[serde(rename = "selected_features")]
    pub selected: Vec<String>,
    #[serde(rename = "discarded_features")]
    pub discarded: Vec<String>,
    pub rationale: String,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRecommendation {
    #[serde(rename = "threshold_recommendations")]
    pub thresholds: BTreeMap<String, Vec<f64>>,
    pub rationale: String,
    pub warnings: Vec<String>,
}

/// Explanation fields as returned by the provider, before grounding.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedExplanation {
    pub classification: bool,
    pub applied_rules: Vec<String>,
    pub global: String,
    pub local: String,
}

/// Keeps only schema features, deduplicates, and resolves names listed on
/// both sides in favour of `selected`.
pub fn validate_feature_selection(parsed: &Value, schema: &[FeatureSchema]) -> Result<FeatureSelectionResult> {
    let obj = as_object(parsed)?;
    let known: BTreeSet<&str> = schema.iter().map(|f| f.name.as_str()).collect();
    let mut warnings = Warnings::carried(obj);
    let mut unknown = BTreeSet::new();

    let mut pick = |key: &str, warnings: &mut Warnings| -> Result<Vec<String>> {
        let mut names: Vec<String> = Vec::new();
        for name in text_list(require(obj, key)?, key, warnings) {
            if !known.contains(name.as_str()) {
                if unknown.insert(name.clone()) {
                    warnings.push(format!("`{name}` is not a dataset feature; dropped"));
                }
            } else if !names.contains(&name) {
                names.push(name);
            }
        }
        Ok(names)
    };
    let selected = pick("selected_features", &mut warnings)?;
    let mut discarded = pick("discarded_features", &mut warnings)?;
    discarded.retain(|name| {
        let clash = selected.contains(name);
        if clash {
            warnings.push(format!("`{name}` is both selected and discarded; kept as selected"));
        }
        !clash
    });

    Ok(FeatureSelectionResult {
        selected,
        discarded,
        rationale: rationale_text(obj.get("rationale")),
        warnings: warnings.into_vec(),
    })
}

/// Keeps numeric schema features whose thresholds lie strictly inside the
/// observed range; lists come back sorted and deduplicated.
pub fn validate_thresholds(parsed: &Value, summaries: &[FeatureSummary]) -> Result<ThresholdRecommendation> {
    let obj = as_object(parsed)?;
    let key = "threshold_recommendations";
    let recs = require(obj, key)?
        .as_object()
        .ok_or_else(|| Error::format(format!("`{key}` is not an object"), parsed.to_string()))?;
    let mut warnings = Warnings::carried(obj);
    let mut thresholds = BTreeMap::new();

    for (name, raw) in recs {
        let Some(summary) = summaries.iter().find(|s| s.name() == name) else {
            warnings.push(format!("`{name}` is not a dataset feature; dropped"));
            continue;
        };
        let Some(numeric) = summary.as_numeric() else {
            warnings.push(format!("`{name}` is not numeric; dropped"));
            continue;
        };
        let candidates: Vec<&Value> = match raw {
            Value::Array(items) => items.iter().collect(),
            other => vec![other],
        };
        let mut values = Vec::new();
        for item in candidates {
            let Some(v) = number(item) else {
                warnings.push(format!("`{name}`: ignored non-numeric threshold {item}"));
                continue;
            };
            match (numeric.min, numeric.max) {
                (Some(lo), Some(hi)) if lo < v && v < hi => values.push(v),
                (Some(lo), Some(hi)) => {
                    warnings.push(format!("`{name}`: threshold {v} outside observed range ({lo}, {hi}); dropped"))
                }
                _ => warnings.push(format!("`{name}`: no observed values; threshold {v} dropped")),
            }
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        if values.is_empty() {
            warnings.push(format!("`{name}`: no usable thresholds"));
        } else {
            thresholds.insert(name.clone(), values);
        }
    }

    Ok(ThresholdRecommendation {
        thresholds,
        rationale: rationale_text(obj.get("rationale")),
        warnings: warnings.into_vec(),
    })
}

/// Reads the explanation keys. `classification` accepts booleans, numbers and
/// yes/no style strings; `explanation` may be a string or a `{global, local}`
/// object.
pub fn parse_explanation(parsed: &Value) -> Result<ParsedExplanation> {
    let obj = as_object(parsed)?;
    let raw_class = require(obj, "classification")?;
    let classification = class_value(raw_class)
        .ok_or_else(|| Error::format(format!("unrecognized classification {raw_class}"), parsed.to_string()))?;

    let applied_rules = match obj.get("applied_rules") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(items)) => items.iter().map(plain_text).collect(),
        Some(other) => vec![plain_text(other)],
    };

    let (global, local) = match require(obj, "explanation")? {
        Value::Object(parts) => {
            let find = |needle: &str| {
                parts
                    .iter()
                    .find(|(k, _)| k.to_lowercase().contains(needle))
                    .map(|(_, v)| plain_text(v))
                    .unwrap_or_default()
            };
            (find("global"), find("local"))
        }
        other => (String::new(), plain_text(other)),
    };

    Ok(ParsedExplanation { classification, applied_rules, global, local })
}

/// Deduplicating, order-preserving warning list.
struct Warnings(Vec<String>);

impl Warnings {
    fn carried(obj: &Map<String, Value>) -> Self {
        let mut w = Warnings(Vec::new());
        if let Some(Value::Array(items)) = obj.get("warnings") {
            items.iter().filter_map(Value::as_str).for_each(|s| w.push(s.to_string()));
        }
        w
    }

    fn push(&mut self, warning: String) {
        if !self.0.contains(&warning) {
            self.0.push(warning);
        }
    }

    fn into_vec(self) -> Vec<String> {
        self.0
    }
}

fn as_object(parsed: &Value) -> Result<&Map<String, Value>> {
    parsed.as_object().ok_or_else(|| Error::format("expected a JSON object", parsed.to_string()))
}

fn require<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::format(format!("missing required key `{key}`"), Value::Object(obj.clone()).to_string()))
}

fn text_list(value: &Value, key: &str, warnings: &mut Warnings) -> Vec<String> {
    let items: Vec<&Value> = match value {
        Value::Array(items) => items.iter().collect(),
        Value::Null => Vec::new(),
        other => vec![other],
    };
    items
        .into_iter()
        .filter_map(|item| match item.as_str() {
            Some(s) => Some(s.trim().to_string()),
            None => {
                warnings.push(format!("`{key}`: ignored non-text entry {item}"));
                None
            }
        })
        .collect()
}

fn rationale_text(value: Option<&Value>) -> String {
    match value {
        None | Some(Value::Null) => String::new(),
        Some(Value::Object(parts)) => {
            parts.iter().map(|(k, v)| format!("{k}: {}", plain_text(v))).collect::<Vec<_>>().join("\n")
        }
        Some(other) => plain_text(other),
    }
}

fn plain_text(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn number(value: &Value) -> Option<f64> {
    match value {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
    .filter(|v: &f64| v.is_finite())
}

fn class_value(value: &Value) -> Option<bool> {
    match value {
        Value::Bool(b) => Some(*b),
        Value::Number(n) => n.as_f64().map(|v| v != 0.0),
        Value::String(s) => match s.trim().to_lowercase().as_str() {
            "true" | "yes" | "y" | "1" | "positive" | "subscribed" | "subscribe" => Some(true),
            "false" | "no" | "n" | "0" | "negative" | "not subscribed" | "not subscribe" => Some(false),
            _ => None,
        },
        _ => None,
    }
}
