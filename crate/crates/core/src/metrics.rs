//! Binary classification scores.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bits::BitColumn;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// Counts from packed prediction and label columns.
    pub fn from_bits(predictions: &BitColumn, labels: &BitColumn) -> Result<Self> {
        if predictions.len() != labels.len() {
            return Err(Error::Structural(format!(
                "{} predictions for {} labels",
                predictions.len(),
                labels.len()
            )));
        }
        let n = labels.len();
        let positives = labels.count_ones();
        let predicted = predictions.count_ones();
        let tp = predictions.count_and(labels);
        let fp = predicted - tp;
        let fn_ = positives - tp;
        Ok(ConfusionMatrix { tp, fp, tn: n - tp - fp - fn_, fn_ })
    }
}

pub fn confusion(predictions: &[bool], labels: &[bool]) -> Result<ConfusionMatrix> {
    if predictions.len() != labels.len() {
        return Err(Error::Structural(format!("{} predictions for {} labels", predictions.len(), labels.len())));
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &y) in predictions.iter().zip(labels) {
        match (p, y) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fp += 1,
            (false, false) => cm.tn += 1,
            (false, true) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

/// Selectable optimization target.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Accuracy,
    Precision,
    Recall,
    F1,
    #[default]
    BalancedAccuracy,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Accuracy => "accuracy",
            Metric::Precision => "precision",
            Metric::Recall => "recall",
            Metric::F1 => "f1",
            Metric::BalancedAccuracy => "balanced_accuracy",
        })
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "accuracy" => Metric::Accuracy,
            "precision" => Metric::Precision,
            "recall" => Metric::Recall,
            "f1" => Metric::F1,
            "balanced_accuracy" => Metric::BalancedAccuracy,
            other => return Err(Error::Config(format!("unknown metric `{other}`"))),
        })
    }
}

/// The five reported scores. A 0/0 ratio is reported as 0 and its metric
/// name is listed in `degenerate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub balanced_accuracy: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degenerate: Vec<Metric>,
}

impl ScoreReport {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Accuracy => self.accuracy,
            Metric::Precision => self.precision,
            Metric::Recall => self.recall,
            Metric::F1 => self.f1,
            Metric::BalancedAccuracy => self.balanced_accuracy,
        }
    }

    pub fn is_degenerate(&self, metric: Metric) -> bool {
        self.degenerate.contains(&metric)
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn score_report(cm: &ConfusionMatrix) -> ScoreReport {
    let mut degenerate = Vec::new();
    let mut flag = |metric: Metric, value: Option<f64>| {
        value.unwrap_or_else(|| {
            if !degenerate.contains(&metric) {
                degenerate.push(metric);
            }
            0.0
        })
    };
    let accuracy = flag(Metric::Accuracy, ratio(cm.tp + cm.tn, cm.total()));
    let precision = flag(Metric::Precision, ratio(cm.tp, cm.tp + cm.fp));
    let recall = flag(Metric::Recall, ratio(cm.tp, cm.tp + cm.fn_));
    let f1 = flag(Metric::F1, ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn_));
    let specificity = ratio(cm.tn, cm.tn + cm.fp);
    let balanced_accuracy = flag(
        Metric::BalancedAccuracy,
        ratio(cm.tp, cm.tp + cm.fn_).zip(specificity).map(|(r, s)| (r + s) / 2.0),
    );
    degenerate.sort();
    ScoreReport { accuracy, precision, recall, f1, balanced_accuracy, degenerate }
}
