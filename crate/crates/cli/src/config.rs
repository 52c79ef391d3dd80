use std::path::{Path, PathBuf};

use boolrule::llm::ProviderConfig;
use boolrule::optimizer::ObjectiveConfig;
use boolrule::{Error, Result};
use serde::{Deserialize, Serialize};

/// Run configuration, read from `--config` and then overridden by flags.
/// Relative paths inside a config file resolve against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: Option<PathBuf>,
    pub target: String,
    pub positive_label: String,
    /// Feature descriptions and units: `{name: {description, unit}}`.
    pub metadata: Option<PathBuf>,
    /// Explicit feature allowlist.
    pub features: Option<Vec<String>>,
    /// Validated feature-selection result; its `selected_features` become the allowlist.
    pub selection: Option<PathBuf>,
    /// Validated threshold recommendation merged over the quantile defaults.
    pub thresholds: Option<PathBuf>,
    pub quantiles: usize,
    pub rare_fraction: f64,
    pub test_fraction: f64,
    /// Seeds both the train/holdout split and the optimizer.
    pub seed: u64,
    pub objective: ObjectiveConfig,
    pub provider: Option<ProviderConfig>,
    pub offline: bool,
    pub fixtures: Option<PathBuf>,
    /// Where the dataset is described; fills the feature-selection prompt.
    pub dataset_reference: String,
    pub model_type: String,
    /// Prediction goal stated in the feature-selection prompt.
    pub objective_text: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            data: None,
            target: "y".into(),
            positive_label: "yes".into(),
            metadata: None,
            features: None,
            selection: None,
            thresholds: None,
            quantiles: 9,
            rare_fraction: 0.05,
            test_fraction: 0.25,
            seed: 0,
            objective: ObjectiveConfig::default(),
            provider: None,
            offline: false,
            fixtures: None,
            dataset_reference: "(feature list below)".into(),
            model_type: "Boolean rule classifier".into(),
            objective_text: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.data, &mut cfg.metadata, &mut cfg.selection, &mut cfg.thresholds, &mut cfg.fixtures]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!("test_fraction must lie in (0, 1), got {}", self.test_fraction)));
        }
        if !(0.0..1.0).contains(&self.rare_fraction) {
            return Err(Error::Config(format!("rare_fraction must lie in [0, 1), got {}", self.rare_fraction)));
        }
        if self.quantiles == 0 {
            return Err(Error::Config("quantiles must be positive".into()));
        }
        self.objective.validate()?;
        if let Some(provider) = &self.provider {
            if !self.offline {
                provider.validate()?;
            }
        }
        Ok(())
    }

    pub fn data_path(&self) -> Result<&Path> {
        self.data
            .as_deref()
            .ok_or_else(|| Error::Config("no dataset given; pass --data or set `data` in the config".into()))
    }

    pub fn interpretation_temperature(&self) -> f64 {
        self.provider.as_ref().map_or(ProviderConfig::default().temperature_interpretation, |p| p.temperature_interpretation)
    }

    pub fn selection_temperature(&self) -> f64 {
        self.provider.as_ref().map_or(ProviderConfig::default().temperature_selection, |p| p.temperature_selection)
    }
}
