use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::{FeatureSchema, RawColumn};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantilePoint {
    pub q: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericSummary {
    pub name: String,
    pub count: usize,
    pub missing: usize,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
    /// Nearest-rank quantiles at 0.1, 0.2, ..., 0.9.
    pub quantiles: Vec<QuantilePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoricalSummary {
    pub name: String,
    pub missing: usize,
    /// Category counts; together with `missing` they sum to the row count.
    pub frequencies: BTreeMap<String, usize>,
}

impl CategoricalSummary {
    /// Categories by descending count, ties by name.
    pub fn ranked(&self) -> Vec<(&str, usize)> {
        let mut out: Vec<_> = self.frequencies.iter().map(|(k, &v)| (k.as_str(), v)).collect();
        out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureSummary {
    Numeric(NumericSummary),
    Categorical(CategoricalSummary),
}

impl FeatureSummary {
    pub fn name(&self) -> &str {
        match self {
            FeatureSummary::Numeric(s) => &s.name,
            FeatureSummary::Categorical(s) => &s.name,
        }
    }

    pub fn as_numeric(&self) -> Option<&NumericSummary> {
        match self {
            FeatureSummary::Numeric(s) => Some(s),
            FeatureSummary::Categorical(_) => None,
        }
    }
}

/// Nearest-rank quantile `numerator / denominator` of sorted, non-empty data:
/// the value at 1-based rank `ceil(q * n)`. Integer arithmetic keeps ranks exact.
pub fn nearest_rank(sorted: &[f64], numerator: usize, denominator: usize) -> f64 {
    let n = sorted.len();
    let rank = (numerator * n).div_ceil(denominator).max(1).min(n);
    sorted[rank - 1]
}

fn sorted_present(values: &[Option<f64>]) -> Vec<f64> {
    let mut out: Vec<f64> = values.iter().flatten().copied().collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Per-feature distribution summaries. Empty data yields no summaries.
pub fn summarize(schema: &[FeatureSchema], columns: &[RawColumn]) -> Vec<FeatureSummary> {
    if columns.first().is_none_or(RawColumn::is_empty) {
        return Vec::new();
    }
    schema
        .iter()
        .zip(columns)
        .map(|(feature, column)| match column {
            RawColumn::Numeric(values) => {
                let sorted = sorted_present(values);
                let count = sorted.len();
                let (min, max, mean, quantiles) = if sorted.is_empty() {
                    (None, None, None, Vec::new())
                } else {
                    let mean = sorted.iter().sum::<f64>() / count as f64;
                    let quantiles = (1..=9)
                        .map(|i| QuantilePoint { q: i as f64 / 10.0, value: nearest_rank(&sorted, i, 10) })
                        .collect();
                    (sorted.first().copied(), sorted.last().copied(), Some(mean), quantiles)
                };
                FeatureSummary::Numeric(NumericSummary {
                    name: feature.name.clone(),
                    count,
                    missing: values.len() - count,
                    min,
                    max,
                    mean,
                    quantiles,
                })
            }
            RawColumn::Categorical(values) => {
                let mut frequencies = BTreeMap::new();
                let mut missing = 0;
                for v in values {
                    match v {
                        Some(c) => *frequencies.entry(c.clone()).or_insert(0) += 1,
                        None => missing += 1,
                    }
                }
                FeatureSummary::Categorical(CategoricalSummary { name: feature.name.clone(), missing, frequencies })
            }
        })
        .collect()
}

/// Equal-frequency cut points at the interior quantiles `i / (count + 1)`,
/// deduplicated and restricted to the open interval `(min, max)`. May return
/// fewer than `count` thresholds.
pub fn quantile_thresholds(values: &[Option<f64>], count: usize) -> Vec<f64> {
    let sorted = sorted_present(values);
    let (Some(&min), Some(&max)) = (sorted.first(), sorted.last()) else {
        return Vec::new();
    };
    let mut out: Vec<f64> = (1..=count)
        .map(|i| nearest_rank(&sorted, i, count + 1))
        .filter(|&t| t > min && t < max)
        .collect();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::FeatureKind;

    fn numeric(name: &str) -> FeatureSchema {
        FeatureSchema { name: name.into(), kind: FeatureKind::Numeric, description: None, unit: None }
    }

    #[test]
    fn constant_column() {
        let summary = summarize(&[numeric("c")], &[RawColumn::Numeric(vec![Some(5.0); 7])]);
        let s = summary[0].as_numeric().unwrap();
        assert_eq!((s.min, s.max, s.mean), (Some(5.0), Some(5.0), Some(5.0)));
        assert!(s.quantiles.iter().all(|q| q.value == 5.0));
        assert!(quantile_thresholds(&[Some(5.0); 7], 3).is_empty());
    }

    #[test]
    fn median_of_one_to_ten_is_five() {
        let values: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(nearest_rank(&values, 1, 2), 5.0);
        // q = 0.3 must land on rank 3, not 4 via 0.3 * 10 = 3.0000000000000004
        assert_eq!(nearest_rank(&values, 3, 10), 3.0);
    }

    #[test]
    fn quantiles_are_monotone_and_bounded() {
        let values: Vec<Option<f64>> = [3.0, 9.0, 1.0, 4.0, 4.0, 8.0, 2.0].iter().map(|&v| Some(v)).collect();
        let summary = summarize(&[numeric("x")], &[RawColumn::Numeric(values)]);
        let s = summary[0].as_numeric().unwrap();
        let qs: Vec<f64> = s.quantiles.iter().map(|q| q.value).collect();
        assert!(qs.windows(2).all(|w| w[0] <= w[1]));
        assert!(qs.iter().all(|&q| s.min.unwrap() <= q && q <= s.max.unwrap()));
    }

    #[test]
    fn categorical_frequencies_sum_to_rows() {
        let schema = [FeatureSchema { name: "m".into(), kind: FeatureKind::Categorical, description: None, unit: None }];
        let col = RawColumn::Categorical(vec![Some("a".into()), None, Some("b".into()), Some("a".into())]);
        let FeatureSummary::Categorical(s) = &summarize(&schema, &[col])[0] else { panic!() };
        assert_eq!(s.frequencies.values().sum::<usize>() + s.missing, 4);
        assert_eq!(s.ranked(), vec![("a", 2), ("b", 1)]);
    }

    #[test]
    fn empty_data_empty_summaries() {
        assert!(summarize(&[numeric("x")], &[RawColumn::Numeric(vec![])]).is_empty());
    }
}
