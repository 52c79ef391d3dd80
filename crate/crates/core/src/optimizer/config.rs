use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::formula::OperatorKind;
use crate::metrics::Metric;
use crate::optimizer::MoveKind;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObjectiveConfig {
    pub metric: Metric,
    /// Weight of the complexity penalty.
    pub lambda: f64,
    /// Hard bound on literal count.
    pub max_complexity: usize,
    pub iterations: usize,
    pub restarts: usize,
    pub initial_temperature: f64,
    /// Geometric cooling factor per iteration.
    pub cooling_rate: f64,
    pub max_depth: usize,
    pub allowed_operators: Vec<OperatorKind>,
    pub seed: u64,
    /// Relative move-kind weights; absent kinds weigh 1.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub move_weights: BTreeMap<MoveKind, f64>,
}

impl Default for ObjectiveConfig {
    fn default() -> Self {
        ObjectiveConfig {
            metric: Metric::BalancedAccuracy,
            lambda: 0.001,
            max_complexity: 10,
            iterations: 20_000,
            restarts: 6,
            initial_temperature: 0.2,
            cooling_rate: 0.999,
            max_depth: 3,
            allowed_operators: OperatorKind::ALL.to_vec(),
            seed: 0,
            move_weights: BTreeMap::new(),
        }
    }
}

impl ObjectiveConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be a non-negative number, got {}", self.lambda));
        }
        if self.max_complexity < 1 {
            return bad("max_complexity must be at least 1".into());
        }
        if self.restarts < 1 {
            return bad("restarts must be at least 1".into());
        }
        if !(self.initial_temperature > 0.0 && self.initial_temperature.is_finite()) {
            return bad(format!("initial_temperature must be positive, got {}", self.initial_temperature));
        }
        if !(self.cooling_rate > 0.0 && self.cooling_rate < 1.0) {
            return bad(format!("cooling_rate must lie in (0, 1), got {}", self.cooling_rate));
        }
        if self.max_depth < 1 {
            return bad("max_depth must be at least 1".into());
        }
        if self.allowed_operators.is_empty() {
            return bad("allowed_operators must not be empty".into());
        }
        if let Some((kind, w)) = self.move_weights.iter().find(|(_, w)| !(**w >= 0.0 && w.is_finite())) {
            return bad(format!("move weight for {kind:?} must be non-negative, got {w}"));
        }
        Ok(())
    }

    pub(crate) fn weight(&self, kind: MoveKind) -> f64 {
        self.move_weights.get(&kind).copied().unwrap_or(1.0)
    }
}
