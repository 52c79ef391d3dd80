//! Tabular ingestion, feature summaries, and binarization into the predicate
//! columns that rules evaluate.

mod binarize;
mod binarized;
mod raw;
mod split;
mod summary;

pub use binarize::{BinarizationSpec, CategoricalPlan, OTHER_CATEGORY};
pub use binarized::BinarizedDataset;
pub use raw::{load_csv, FeatureKind, FeatureMetadata, FeatureSchema, RawColumn, RawDataset, RawRow};
pub use split::split;
pub use summary::{
    nearest_rank, quantile_thresholds, summarize, CategoricalSummary, FeatureSummary, NumericSummary, QuantilePoint,
};
