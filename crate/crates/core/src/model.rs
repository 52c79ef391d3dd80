//! Persisted model: learned rules as text plus everything needed to rebuild
//! the binarized view of a dataset and reproduce the reported metrics.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{BinarizationSpec, FeatureKind, FeatureSchema};
use crate::formula::parse;
use crate::metrics::{ConfusionMatrix, ScoreReport};
use crate::optimizer::ObjectiveConfig;
use crate::{Error, Result, Rule};

pub const MODEL_VERSION: u32 = 1;

/// How missing raw values are binarized; recorded for reproducibility.
pub const MISSING_VALUE_POLICY: &str =
    "numeric: every threshold predicate is false; categorical: value maps to OTHER";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaEntry {
    pub name: String,
    pub kind: FeatureKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSettings {
    pub test_fraction: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredRule {
    pub rule: String,
    /// Training objective metric value.
    pub score: f64,
    pub complexity: usize,
    pub holdout: ScoreReport,
    pub confusion: ConfusionMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub version: u32,
    pub target: String,
    pub positive_label: String,
    pub schema_digest: Vec<SchemaEntry>,
    pub binarization_spec: BinarizationSpec,
    pub missing_values: String,
    pub split: SplitSettings,
    pub config: ObjectiveConfig,
    /// Best first.
    pub rules: Vec<StoredRule>,
}

impl ModelFile {
    pub fn schema(&self) -> Vec<FeatureSchema> {
        self.schema_digest
            .iter()
            .map(|e| FeatureSchema { name: e.name.clone(), kind: e.kind, description: None, unit: None })
            .collect()
    }

    /// Stored rules parsed back, carrying their training scores.
    pub fn parsed_rules(&self) -> Result<Vec<Rule>> {
        self.rules.iter().map(|r| Ok(parse(&r.rule)?.with_score(r.score))).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != MODEL_VERSION {
            return Err(Error::Config(format!(
                "unsupported model version {} (expected {MODEL_VERSION})",
                self.version
            )));
        }
        let schema = self.schema();
        self.binarization_spec.validate(&schema)?;
        for rule in self.parsed_rules()? {
            for p in &rule.predicates {
                if !schema.iter().any(|f| f.name == p.feature) {
                    return Err(Error::Validation(format!("rule `{rule}` uses feature `{}` absent from the model schema", p.feature)));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("model serializes");
        text.push('\n');
        text
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: ModelFile = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{} is not a valid model file: {e}", path.display())))?;
        model.validate()?;
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::metrics::score_report;

    fn model() -> ModelFile {
        let cm = ConfusionMatrix { tp: 3, fp: 1, tn: 5, fn_: 1 };
        ModelFile {
            version: MODEL_VERSION,
            target: "y".into(),
            positive_label: "yes".into(),
            schema_digest: vec![SchemaEntry { name: "duration".into(), kind: FeatureKind::Numeric }],
            binarization_spec: BinarizationSpec {
                numeric_thresholds: BTreeMap::from([("duration".into(), vec![400.0, 550.0])]),
                categorical_plan: BTreeMap::new(),
            },
            missing_values: MISSING_VALUE_POLICY.into(),
            split: SplitSettings { test_fraction: 0.25, seed: 0 },
            config: ObjectiveConfig::default(),
            rules: vec![StoredRule {
                rule: "Or(duration>400, duration<=550)".into(),
                score: 0.75,
                complexity: 2,
                holdout: score_report(&cm),
                confusion: cm,
            }],
        }
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        let m = model();
        m.save(&path).unwrap();
        assert_eq!(ModelFile::load(&path).unwrap(), m);
        assert_eq!(m.parsed_rules().unwrap()[0].score, Some(0.75));
    }

    #[test]
    fn rejects_foreign_features_and_versions() {
        let mut m = model();
        m.rules[0].rule = "age>30".into();
        assert!(m.validate().is_err());
        let mut m = model();
        m.version = 2;
        assert!(matches!(m.validate(), Err(Error::Config(_))));
    }
}
