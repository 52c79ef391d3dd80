use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    GreaterThan,
    LessOrEqual,
    Equals,
}

impl Comparator {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::GreaterThan => ">",
            Comparator::LessOrEqual => "<=",
            Comparator::Equals => "=",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PredicateValue {
    Number(f64),
    Category(String),
}

// Numbers compare by bit pattern so predicates can be hashed and deduplicated.
impl PartialEq for PredicateValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (PredicateValue::Number(a), PredicateValue::Number(b)) => a.to_bits() == b.to_bits(),
            (PredicateValue::Category(a), PredicateValue::Category(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for PredicateValue {}

impl Hash for PredicateValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            PredicateValue::Number(v) => {
                0u8.hash(state);
                v.to_bits().hash(state);
            }
            PredicateValue::Category(c) => {
                1u8.hash(state);
                c.hash(state);
            }
        }
    }
}

impl fmt::Display for PredicateValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredicateValue::Number(v) => write!(f, "{v}"),
            PredicateValue::Category(c) => f.write_str(c),
        }
    }
}

/// An atomic condition on one raw feature, e.g. `duration>400` or `month=mar`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Predicate {
    pub feature: String,
    pub comparator: Comparator,
    pub value: PredicateValue,
}

impl Predicate {
    pub fn new(feature: impl Into<String>, comparator: Comparator, value: PredicateValue) -> Result<Self> {
        let predicate = Predicate { feature: feature.into(), comparator, value };
        predicate.validate()?;
        Ok(predicate)
    }

    pub fn greater_than(feature: impl Into<String>, threshold: f64) -> Self {
        Predicate {
            feature: feature.into(),
            comparator: Comparator::GreaterThan,
            value: PredicateValue::Number(threshold),
        }
    }

    pub fn equals(feature: impl Into<String>, category: impl Into<String>) -> Self {
        Predicate {
            feature: feature.into(),
            comparator: Comparator::Equals,
            value: PredicateValue::Category(category.into()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.feature.trim().is_empty() {
            return Err(Error::Validation("predicate feature name is empty".into()));
        }
        match (self.comparator, &self.value) {
            (Comparator::Equals, PredicateValue::Category(_)) => Ok(()),
            (Comparator::GreaterThan | Comparator::LessOrEqual, PredicateValue::Number(v)) if v.is_finite() => Ok(()),
            _ => Err(Error::Validation(format!(
                "comparator `{}` does not accept value `{}` for feature {}",
                self.comparator.symbol(),
                self.value,
                self.feature
            ))),
        }
    }

    pub fn threshold(&self) -> Option<f64> {
        match self.value {
            PredicateValue::Number(v) => Some(v),
            PredicateValue::Category(_) => None,
        }
    }

    pub fn category(&self) -> Option<&str> {
        match &self.value {
            PredicateValue::Category(c) => Some(c),
            PredicateValue::Number(_) => None,
        }
    }

    /// Evaluates the predicate on a raw numeric value; missing values are false.
    pub fn holds_numeric(&self, value: Option<f64>) -> bool {
        match (self.comparator, value, self.threshold()) {
            (Comparator::GreaterThan, Some(x), Some(t)) => x > t,
            (Comparator::LessOrEqual, Some(x), Some(t)) => x <= t,
            _ => false,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.feature, self.comparator.symbol(), self.value)
    }
}
