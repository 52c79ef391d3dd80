use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub name: String,
    pub kind: FeatureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

/// Optional per-feature documentation merged into a loaded schema.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureMetadata {
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub unit: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RawColumn {
    Numeric(Vec<Option<f64>>),
    Categorical(Vec<Option<String>>),
}

impl RawColumn {
    pub fn len(&self) -> usize {
        match self {
            RawColumn::Numeric(v) => v.len(),
            RawColumn::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn select(&self, indices: &[usize]) -> RawColumn {
        match self {
            RawColumn::Numeric(v) => RawColumn::Numeric(indices.iter().map(|&i| v[i]).collect()),
            RawColumn::Categorical(v) => RawColumn::Categorical(indices.iter().map(|&i| v[i].clone()).collect()),
        }
    }
}

/// One raw record keyed by feature name. Absent features count as missing.
pub type RawRow = BTreeMap<String, String>;

/// Column-oriented raw table with binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    pub schema: Vec<FeatureSchema>,
    pub columns: Vec<RawColumn>,
    pub labels: Vec<bool>,
}

impl RawDataset {
    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|f| f.name == name)
    }

    pub fn feature(&self, name: &str) -> Option<(&FeatureSchema, &RawColumn)> {
        self.feature_index(name).map(|i| (&self.schema[i], &self.columns[i]))
    }

    pub fn row(&self, index: usize) -> Option<RawRow> {
        if index >= self.rows() {
            return None;
        }
        let mut row = RawRow::new();
        for (f, col) in self.schema.iter().zip(&self.columns) {
            let value = match col {
                RawColumn::Numeric(v) => v[index].map(|x| x.to_string()),
                RawColumn::Categorical(v) => v[index].clone(),
            };
            if let Some(value) = value {
                row.insert(f.name.clone(), value);
            }
        }
        Some(row)
    }

    /// Keeps only the named features, in schema order.
    pub fn restrict(&self, allowlist: &[String]) -> Result<RawDataset> {
        let wanted: HashSet<&str> = allowlist.iter().map(String::as_str).collect();
        if wanted.is_empty() {
            return Err(Error::Config("no features selected".into()));
        }
        for name in &wanted {
            if self.feature_index(name).is_none() {
                return Err(Error::Config(format!("selected feature `{name}` is not in the dataset")));
            }
        }
        let (schema, columns) = self
            .schema
            .iter()
            .zip(&self.columns)
            .filter(|(f, _)| wanted.contains(f.name.as_str()))
            .map(|(f, c)| (f.clone(), c.clone()))
            .unzip();
        Ok(RawDataset { schema, columns, labels: self.labels.clone() })
    }

    pub fn select_rows(&self, indices: &[usize]) -> RawDataset {
        RawDataset {
            schema: self.schema.clone(),
            columns: self.columns.iter().map(|c| c.select(indices)).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    pub fn apply_metadata(&mut self, metadata: &BTreeMap<String, FeatureMetadata>) {
        for f in &mut self.schema {
            if let Some(m) = metadata.get(&f.name) {
                if m.description.is_some() {
                    f.description = m.description.clone();
                }
                if m.unit.is_some() {
                    f.unit = m.unit.clone();
                }
            }
        }
    }
}

pub(crate) fn is_missing(value: &str) -> bool {
    value.is_empty() || value == "NA"
}

pub(crate) fn parse_number(value: &str) -> Option<f64> {
    value.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Reads a headered CSV file, comma- or semicolon-delimited.
///
/// A column is numeric iff every non-missing value parses as a number.
/// `target_column` is removed from the features and mapped to labels by
/// comparing against `positive_label`.
pub fn load_csv(path: impl AsRef<Path>, target_column: &str, positive_label: &str) -> Result<RawDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader.read_line(&mut first).map_err(|e| Error::io(path, e))?;
    if first.trim().is_empty() {
        return Err(Error::Data(format!("{}: empty file", path.display())));
    }
    let delimiter = if first.matches(';').count() > first.matches(',').count() { b';' } else { b',' };

    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut csv = csv::ReaderBuilder::new().delimiter(delimiter).trim(csv::Trim::All).from_reader(file);
    let headers: Vec<String> = csv
        .headers()
        .map_err(|e| Error::Data(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    let target = headers
        .iter()
        .position(|h| h == target_column)
        .ok_or_else(|| Error::Data(format!("{}: target column `{target_column}` not found", path.display())))?;
    let mut seen = HashSet::new();
    if let Some(dup) = headers.iter().find(|h| !seen.insert(h.as_str())) {
        return Err(Error::Data(format!("{}: duplicate column `{dup}`", path.display())));
    }

    let mut cells: Vec<Vec<String>> = vec![Vec::new(); headers.len()];
    let mut labels = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::Data(format!("{}: line {line}: {e}", path.display()))
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let label = &record[target];
        if is_missing(label) {
            return Err(Error::Data(format!("{}: line {line}: missing target value", path.display())));
        }
        labels.push(label == positive_label);
        for (column, value) in cells.iter_mut().zip(record.iter()) {
            column.push(value.to_string());
        }
    }

    let mut schema = Vec::new();
    let mut columns = Vec::new();
    for (i, (name, values)) in headers.into_iter().zip(cells).enumerate() {
        if i == target {
            continue;
        }
        let numeric = values.iter().filter(|v| !is_missing(v)).all(|v| parse_number(v).is_some());
        let (kind, column) = if numeric {
            let parsed = values.iter().map(|v| if is_missing(v) { None } else { parse_number(v) }).collect();
            (FeatureKind::Numeric, RawColumn::Numeric(parsed))
        } else {
            let parsed = values.into_iter().map(|v| if is_missing(&v) { None } else { Some(v) }).collect();
            (FeatureKind::Categorical, RawColumn::Categorical(parsed))
        };
        schema.push(FeatureSchema { name, kind, description: None, unit: None });
        columns.push(column);
    }
    Ok(RawDataset { schema, columns, labels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn semicolon_with_quotes() {
        let f = write("\"age\";\"job\";\"y\"\n56;\"housemaid\";\"no\"\n41;\"admin.\";\"yes\"\n");
        let data = load_csv(f.path(), "y", "yes").unwrap();
        assert_eq!(data.rows(), 2);
        assert_eq!(data.schema.len(), 2);
        assert_eq!(data.schema[0].kind, FeatureKind::Numeric);
        assert_eq!(data.schema[1].kind, FeatureKind::Categorical);
        assert_eq!(data.labels, vec![false, true]);
        assert_eq!(data.columns[1], RawColumn::Categorical(vec![Some("housemaid".into()), Some("admin.".into())]));
    }

    #[test]
    fn single_row() {
        let f = write("a,b,target\n1,x,1\n");
        let data = load_csv(f.path(), "target", "1").unwrap();
        assert_eq!(data.labels.len(), 1);
    }

    #[test]
    fn missing_values_do_not_block_numeric_inference() {
        let f = write("a,t\n1,y\n,n\nNA,y\n2.5,n\n");
        let data = load_csv(f.path(), "t", "y").unwrap();
        assert_eq!(data.columns[0], RawColumn::Numeric(vec![Some(1.0), None, None, Some(2.5)]));
    }

    #[test]
    fn missing_target_names_column() {
        let f = write("a,b\n1,2\n");
        let err = load_csv(f.path(), "y", "yes").unwrap_err().to_string();
        assert!(err.contains("`y`"), "{err}");
    }

    #[test]
    fn ragged_row_reports_line() {
        let f = write("a,b,y\n1,2,yes\n1,yes\n");
        let err = load_csv(f.path(), "y", "yes").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn empty_file() {
        let f = write("");
        assert!(matches!(load_csv(f.path(), "y", "yes"), Err(Error::Data(_))));
    }

    #[test]
    fn header_only_has_no_rows() {
        let f = write("a,y\n");
        let data = load_csv(f.path(), "y", "yes").unwrap();
        assert_eq!(data.rows(), 0);
    }
}
