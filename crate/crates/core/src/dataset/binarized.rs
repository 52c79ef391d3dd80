use std::collections::HashMap;

use crate::bits::BitColumn;
use crate::formula::Predicate;
use crate::{Error, Result};

/// Boolean predicate matrix with binary labels.
///
/// Stored column-major as packed bits; `row` reconstructs a row view.
#[derive(Debug, Clone, PartialEq)]
pub struct BinarizedDataset {
    predicates: Vec<Predicate>,
    columns: Vec<BitColumn>,
    labels: BitColumn,
    row_ids: Option<Vec<usize>>,
    index: HashMap<Predicate, usize>,
}

impl BinarizedDataset {
    pub fn new(predicates: Vec<Predicate>, columns: Vec<BitColumn>, labels: BitColumn) -> Result<Self> {
        if predicates.len() != columns.len() {
            return Err(Error::Structural(format!(
                "{} predicates but {} columns",
                predicates.len(),
                columns.len()
            )));
        }
        if let Some(bad) = columns.iter().position(|c| c.len() != labels.len()) {
            return Err(Error::Structural(format!(
                "column `{}` has {} rows, labels have {}",
                predicates[bad],
                columns[bad].len(),
                labels.len()
            )));
        }
        let mut index = HashMap::with_capacity(predicates.len());
        for (i, p) in predicates.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(Error::Structural(format!("duplicate predicate `{p}`")));
            }
        }
        Ok(BinarizedDataset { predicates, columns, labels, row_ids: None, index })
    }

    /// Builds from row-major Boolean rows.
    pub fn from_rows(predicates: Vec<Predicate>, rows: &[Vec<bool>], labels: &[bool]) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::Structural(format!("{} rows but {} labels", rows.len(), labels.len())));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != predicates.len()) {
            return Err(Error::Structural(format!("row {bad} has width {}", rows[bad].len())));
        }
        let columns = (0..predicates.len())
            .map(|j| BitColumn::from_bools(&rows.iter().map(|r| r[j]).collect::<Vec<_>>()))
            .collect();
        Self::new(predicates, columns, BitColumn::from_bools(labels))
    }

    pub fn with_row_ids(mut self, ids: Vec<usize>) -> Result<Self> {
        if ids.len() != self.rows() {
            return Err(Error::Structural("row id count does not match row count".into()));
        }
        self.row_ids = Some(ids);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows() == 0
    }

    pub fn width(&self) -> usize {
        self.predicates.len()
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn column(&self, index: usize) -> &BitColumn {
        &self.columns[index]
    }

    pub fn columns(&self) -> &[BitColumn] {
        &self.columns
    }

    pub fn column_refs(&self) -> Vec<&BitColumn> {
        self.columns.iter().collect()
    }

    pub fn column_index(&self, predicate: &Predicate) -> Option<usize> {
        self.index.get(predicate).copied()
    }

    pub fn labels(&self) -> &BitColumn {
        &self.labels
    }

    pub fn positives(&self) -> usize {
        self.labels.count_ones()
    }

    pub fn row_ids(&self) -> Option<&[usize]> {
        self.row_ids.as_deref()
    }

    pub fn row(&self, index: usize) -> Vec<bool> {
        self.columns.iter().map(|c| c.get(index)).collect()
    }

    /// Rows at `indices`, in that order; row ids follow the originals.
    pub fn subset(&self, indices: &[usize]) -> BinarizedDataset {
        let ids = match &self.row_ids {
            Some(ids) => indices.iter().map(|&i| ids[i]).collect(),
            None => indices.to_vec(),
        };
        BinarizedDataset {
            predicates: self.predicates.clone(),
            columns: self.columns.iter().map(|c| c.select(indices)).collect(),
            labels: self.labels.select(indices),
            row_ids: Some(ids),
            index: self.index.clone(),
        }
    }
}
