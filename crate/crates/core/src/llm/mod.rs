//! Language-model helpers: prompt construction, pluggable completion and
//! embedding providers, JSON extraction, and schema-grounded validation.
//!
//! Only [`complete`] and [`embed`] reach a provider; everything else is pure.

mod json;
mod mock;
mod prompts;
mod provider;
mod validate;

#[cfg(feature = "http")]
mod reqwest_transport;

pub use json::extract_json;
pub use mock::MockProvider;
pub use prompts::{
    build_explanation_prompt, build_feature_selection_prompt, build_threshold_prompt, EXPLANATION_TEMPLATE,
    FEATURE_SELECTION_TEMPLATE, THRESHOLD_TEMPLATE,
};
pub use provider::{HttpProvider, HttpResponse, Provider, ProviderConfig, Task, Transport, TransportError};
#[cfg(feature = "http")]
pub use reqwest_transport::ReqwestTransport;
pub use validate::{
    parse_explanation, validate_feature_selection, validate_thresholds, FeatureSelectionResult, ParsedExplanation,
    ThresholdRecommendation,
};

use crate::{Error, Result};

/// Raw completion text for `prompt`.
pub fn complete(provider: &dyn Provider, task: Task, prompt: &str, temperature: f64) -> Result<String> {
    provider.complete(task, prompt, temperature)
}

/// One L2-normalized vector per text, all of the same dimension.
pub fn embed(provider: &dyn Provider, texts: &[String]) -> Result<Vec<Vec<f64>>> {
    if texts.is_empty() {
        return Err(Error::Validation("nothing to embed".into()));
    }
    let vectors = provider.embed(texts)?;
    if vectors.len() != texts.len() {
        return Err(Error::format(
            format!("provider returned {} embeddings for {} texts", vectors.len(), texts.len()),
            "",
        ));
    }
    let dim = vectors[0].len();
    if dim == 0 || vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::format("embedding dimensions differ across the batch", ""));
    }
    Ok(vectors.into_iter().map(normalize).collect())
}

pub(crate) fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}
