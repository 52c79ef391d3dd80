use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::bits::BitColumn;
use crate::dataset::raw::{is_missing, parse_number};
use crate::dataset::summary::quantile_thresholds;
use crate::dataset::{BinarizedDataset, FeatureKind, FeatureSchema, RawColumn, RawDataset, RawRow};
use crate::formula::{Comparator, Predicate, PredicateValue, Rule};
use crate::{Error, Result};

/// Bucket for categories that are not kept explicitly, and for missing values.
pub const OTHER_CATEGORY: &str = "OTHER";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoricalPlan {
    pub keep: Vec<String>,
    pub collapse_other: bool,
}

/// How raw features become predicate columns: `f>t` per numeric threshold,
/// `f=c` per kept category, and `f=OTHER` for everything else when
/// `collapse_other` is set. Features absent from both maps produce no columns.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BinarizationSpec {
    #[serde(default)]
    pub numeric_thresholds: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub categorical_plan: BTreeMap<String, CategoricalPlan>,
}

impl BinarizationSpec {
    /// Quantile thresholds for numeric features; categories covering at least
    /// `rare_fraction` of the rows are kept, the rest collapse to `OTHER`.
    pub fn quantile_default(data: &RawDataset, quantile_count: usize, rare_fraction: f64) -> Self {
        let mut spec = BinarizationSpec::default();
        for (feature, column) in data.schema.iter().zip(&data.columns) {
            match column {
                RawColumn::Numeric(values) => {
                    spec.numeric_thresholds.insert(feature.name.clone(), quantile_thresholds(values, quantile_count));
                }
                RawColumn::Categorical(values) => {
                    spec.categorical_plan.insert(feature.name.clone(), frequent_plan(values, rare_fraction));
                }
            }
        }
        spec
    }

    /// Minimal spec under which every predicate of `rules` has a column.
    /// Categorical features keep their frequent categories plus any category
    /// the rules mention.
    pub fn for_rules(data: &RawDataset, rules: &[Rule], rare_fraction: f64) -> Result<Self> {
        let mut spec = BinarizationSpec::default();
        for p in rules.iter().flat_map(|r| r.predicates.iter()) {
            let (schema, column) = data
                .feature(&p.feature)
                .ok_or_else(|| Error::Structural(format!("rule predicate `{p}` references unknown feature")))?;
            match (column, &p.value) {
                (RawColumn::Numeric(_), PredicateValue::Number(t)) => {
                    spec.numeric_thresholds.entry(schema.name.clone()).or_default().push(*t);
                }
                (RawColumn::Categorical(values), PredicateValue::Category(c)) => {
                    let plan = spec
                        .categorical_plan
                        .entry(schema.name.clone())
                        .or_insert_with(|| frequent_plan(values, rare_fraction));
                    if c == OTHER_CATEGORY {
                        plan.collapse_other = true;
                    } else if !plan.keep.contains(c) {
                        plan.keep.push(c.clone());
                    }
                }
                _ => {
                    return Err(Error::Structural(format!(
                        "predicate `{p}` does not match the {:?} feature `{}`",
                        schema.kind, schema.name
                    )))
                }
            }
        }
        for thresholds in spec.numeric_thresholds.values_mut() {
            thresholds.sort_by(f64::total_cmp);
            thresholds.dedup();
        }
        Ok(spec)
    }

    /// Replaces the thresholds of every feature in `recommended`; other
    /// features keep their current thresholds.
    pub fn merge_thresholds(&mut self, recommended: &BTreeMap<String, Vec<f64>>) {
        for (name, thresholds) in recommended {
            self.numeric_thresholds.insert(name.clone(), thresholds.clone());
        }
    }

    /// Drops every feature not in `allowlist`.
    pub fn restrict(&mut self, allowlist: &[String]) {
        self.numeric_thresholds.retain(|k, _| allowlist.contains(k));
        self.categorical_plan.retain(|k, _| allowlist.contains(k));
    }

    pub fn validate(&self, schema: &[FeatureSchema]) -> Result<()> {
        for name in self.numeric_thresholds.keys() {
            match schema.iter().find(|f| &f.name == name) {
                Some(f) if f.kind == FeatureKind::Numeric => {}
                Some(_) => return Err(Error::Validation(format!("thresholds given for categorical feature `{name}`"))),
                None => return Err(Error::Validation(format!("binarization spec references unknown feature `{name}`"))),
            }
        }
        for name in self.categorical_plan.keys() {
            match schema.iter().find(|f| &f.name == name) {
                Some(f) if f.kind == FeatureKind::Categorical => {}
                Some(_) => return Err(Error::Validation(format!("category plan given for numeric feature `{name}`"))),
                None => return Err(Error::Validation(format!("binarization spec references unknown feature `{name}`"))),
            }
        }
        Ok(())
    }

    /// Binarizes a raw table.
    ///
    /// Columns follow schema order; thresholds ascending; kept categories by
    /// descending frequency in `data` (ties by name) with `OTHER` last.
    /// Missing numeric values fail every threshold; missing categorical values
    /// fall into `OTHER`.
    pub fn apply(&self, data: &RawDataset) -> Result<BinarizedDataset> {
        self.validate(&data.schema)?;
        let rows = data.rows();
        let mut predicates = Vec::new();
        let mut columns = Vec::new();
        for (feature, column) in data.schema.iter().zip(&data.columns) {
            match column {
                RawColumn::Numeric(values) => {
                    let Some(thresholds) = self.numeric_thresholds.get(&feature.name) else { continue };
                    let mut sorted = thresholds.clone();
                    sorted.sort_by(f64::total_cmp);
                    sorted.dedup();
                    for t in sorted {
                        let predicate = Predicate::greater_than(&feature.name, t);
                        predicate.validate()?;
                        let mut col = BitColumn::zeros(rows);
                        for (i, v) in values.iter().enumerate() {
                            if predicate.holds_numeric(*v) {
                                col.set(i, true);
                            }
                        }
                        predicates.push(predicate);
                        columns.push(col);
                    }
                }
                RawColumn::Categorical(values) => {
                    let Some(plan) = self.categorical_plan.get(&feature.name) else { continue };
                    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
                    for v in values.iter().flatten() {
                        *counts.entry(v.as_str()).or_insert(0) += 1;
                    }
                    for c in &plan.keep {
                        if !counts.contains_key(c.as_str()) {
                            return Err(Error::Validation(format!(
                                "category `{c}` of feature `{}` does not occur in the data",
                                feature.name
                            )));
                        }
                    }
                    let mut keep: Vec<&String> = plan.keep.iter().collect::<BTreeSet<_>>().into_iter().collect();
                    keep.sort_by(|a, b| counts[b.as_str()].cmp(&counts[a.as_str()]).then(a.cmp(b)));
                    for c in keep {
                        let mut col = BitColumn::zeros(rows);
                        for (i, v) in values.iter().enumerate() {
                            if v.as_deref() == Some(c.as_str()) {
                                col.set(i, true);
                            }
                        }
                        predicates.push(Predicate::equals(&feature.name, c));
                        columns.push(col);
                    }
                    if plan.collapse_other {
                        let mut col = BitColumn::zeros(rows);
                        for (i, v) in values.iter().enumerate() {
                            if !v.as_ref().is_some_and(|c| plan.keep.contains(c)) {
                                col.set(i, true);
                            }
                        }
                        predicates.push(Predicate::equals(&feature.name, OTHER_CATEGORY));
                        columns.push(col);
                    }
                }
            }
        }
        BinarizedDataset::new(predicates, columns, BitColumn::from_bools(&data.labels))
    }

    /// Truth values of `predicates` on one raw record, under this spec's
    /// missing-value and `OTHER` semantics. Every predicate must be covered by
    /// `self` (a `<=` predicate is covered by its `>` counterpart).
    pub fn binarize_row(&self, schema: &[FeatureSchema], row: &RawRow, predicates: &[Predicate]) -> Result<Vec<bool>> {
        predicates
            .iter()
            .map(|p| {
                let feature = schema
                    .iter()
                    .find(|f| f.name == p.feature)
                    .ok_or_else(|| Error::Structural(format!("predicate `{p}` references unknown feature")))?;
                let raw = row.get(&p.feature).map(String::as_str).filter(|v| !is_missing(v));
                match (feature.kind, p.comparator, &p.value) {
                    (FeatureKind::Numeric, Comparator::GreaterThan | Comparator::LessOrEqual, PredicateValue::Number(t)) => {
                        let covered = self.numeric_thresholds.get(&p.feature).is_some_and(|ts| ts.contains(t));
                        if !covered {
                            return Err(Error::Structural(format!("binarization spec has no column for `{p}`")));
                        }
                        let value = match raw {
                            None => None,
                            Some(s) => Some(parse_number(s).ok_or_else(|| {
                                Error::Data(format!("value `{s}` of numeric feature `{}` is not a number", p.feature))
                            })?),
                        };
                        Ok(p.holds_numeric(value))
                    }
                    (FeatureKind::Categorical, Comparator::Equals, PredicateValue::Category(c)) => {
                        let plan = self
                            .categorical_plan
                            .get(&p.feature)
                            .ok_or_else(|| Error::Structural(format!("binarization spec has no column for `{p}`")))?;
                        let kept = raw.is_some_and(|v| plan.keep.iter().any(|k| k == v));
                        if c == OTHER_CATEGORY && plan.collapse_other {
                            Ok(!kept)
                        } else if plan.keep.contains(c) {
                            Ok(raw == Some(c.as_str()))
                        } else {
                            Err(Error::Structural(format!("binarization spec has no column for `{p}`")))
                        }
                    }
                    _ => Err(Error::Structural(format!("predicate `{p}` does not match feature kind {:?}", feature.kind))),
                }
            })
            .collect()
    }
}

fn frequent_plan(values: &[Option<String>], rare_fraction: f64) -> CategoricalPlan {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for v in values.iter().flatten() {
        *counts.entry(v.as_str()).or_insert(0) += 1;
    }
    let total = values.len().max(1) as f64;
    let mut keep: Vec<(&str, usize)> =
        counts.iter().filter(|(_, &n)| n as f64 / total >= rare_fraction).map(|(&c, &n)| (c, n)).collect();
    keep.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let has_missing = values.iter().any(Option::is_none);
    let collapse_other = has_missing || keep.len() < counts.len();
    CategoricalPlan { keep: keep.into_iter().map(|(c, _)| c.to_string()).collect(), collapse_other }
}
