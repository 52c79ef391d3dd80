use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::{Error, Result};

/// What a completion request is for. Mock providers key fixtures on this.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    FeatureSelection,
    Thresholds,
    Explanation,
    RuleDescription,
    ClusterSummary,
}

impl Task {
    pub fn fixture_name(self) -> &'static str {
        match self {
            Task::FeatureSelection => "feature_selection.json",
            Task::Thresholds => "thresholds.json",
            Task::Explanation => "explanation.json",
            Task::RuleDescription => "descriptions.json",
            Task::ClusterSummary => "summaries.json",
        }
    }
}

pub trait Provider {
    fn complete(&self, task: Task, prompt: &str, temperature: f64) -> Result<String>;

    /// Raw embedding vectors; callers normalize through [`crate::llm::embed`].
    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>>;

    /// Whether the provider can answer `task` at all.
    fn supports(&self, _task: Task) -> bool {
        true
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProviderConfig {
    /// Chat-completions endpoint.
    pub endpoint_url: String,
    pub model_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedding_url: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedding_model: Option<String>,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub temperature_selection: f64,
    pub temperature_interpretation: f64,
    pub max_tokens: u32,
    pub max_retries: u32,
    pub backoff_base_ms: u64,
    pub timeout_ms: u64,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            endpoint_url: "https://api.openai.com/v1/chat/completions".into(),
            model_id: String::new(),
            embedding_url: None,
            embedding_model: None,
            api_key_env: "OPENAI_API_KEY".into(),
            temperature_selection: 0.0,
            temperature_interpretation: 0.7,
            max_tokens: 2048,
            max_retries: 3,
            backoff_base_ms: 500,
            timeout_ms: 60_000,
        }
    }
}

impl ProviderConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, t) in [
            ("temperature_selection", self.temperature_selection),
            ("temperature_interpretation", self.temperature_interpretation),
        ] {
            if !(0.0..=2.0).contains(&t) {
                return Err(Error::Config(format!("{name} must lie in [0, 2], got {t}")));
            }
        }
        if self.max_retries > 10 {
            return Err(Error::Config(format!("max_retries must be at most 10, got {}", self.max_retries)));
        }
        if self.backoff_base_ms == 0 || self.timeout_ms == 0 {
            return Err(Error::Config("backoff_base_ms and timeout_ms must be positive".into()));
        }
        if self.model_id.is_empty() {
            return Err(Error::Config("provider model_id is empty".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

/// Connection-level failure (no HTTP status).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("transport failure: {0}")]
pub struct TransportError(pub String);

/// Sends one JSON POST with a bearer token.
pub trait Transport {
    fn post_json(&self, url: &str, api_key: &str, body: &Value, timeout: Duration)
        -> std::result::Result<HttpResponse, TransportError>;
}

/// Chat-completion and embedding client with retry and exponential backoff.
pub struct HttpProvider<T> {
    config: ProviderConfig,
    transport: T,
    sleep: fn(Duration),
}

impl<T: Transport> HttpProvider<T> {
    pub fn new(config: ProviderConfig, transport: T) -> Self {
        HttpProvider { config, transport, sleep: std::thread::sleep }
    }

    /// Replaces the backoff sleep (tests use a no-op).
    pub fn with_sleep(mut self, sleep: fn(Duration)) -> Self {
        self.sleep = sleep;
        self
    }

    pub fn config(&self) -> &ProviderConfig {
        &self.config
    }

    fn api_key(&self) -> Result<String> {
        std::env::var(&self.config.api_key_env)
            .ok()
            .filter(|k| !k.is_empty())
            .ok_or_else(|| Error::Config(format!("environment variable `{}` is not set", self.config.api_key_env)))
    }

    /// Delay before retry number `attempt` (0-based): `base * 2^attempt`, +-20%.
    fn backoff(&self, attempt: u32, jitter_seed: u64) -> Duration {
        let base = self.config.backoff_base_ms as f64 * 2f64.powi(attempt as i32);
        // cheap deterministic-per-call jitter in [0.8, 1.2]
        let mixed = jitter_seed.wrapping_add(attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let unit = (mixed >> 11) as f64 / (1u64 << 53) as f64;
        Duration::from_secs_f64(base * (0.8 + 0.4 * unit) / 1000.0)
    }

    fn post_with_retry(&self, url: &str, body: &Value) -> Result<Value> {
        let key = self.api_key()?;
        let timeout = Duration::from_millis(self.config.timeout_ms);
        let jitter_seed = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0);
        let mut last_status = None;
        let mut last_message = String::new();
        for attempt in 0..=self.config.max_retries {
            if attempt > 0 {
                (self.sleep)(self.backoff(attempt - 1, jitter_seed));
            }
            match self.transport.post_json(url, &key, body, timeout) {
                Ok(resp) if (200..300).contains(&resp.status) => {
                    return serde_json::from_str(&resp.body)
                        .map_err(|e| Error::format(format!("response is not JSON: {e}"), resp.body));
                }
                Ok(resp) if resp.status == 429 || resp.status >= 500 => {
                    log::warn!("provider returned {} (attempt {})", resp.status, attempt + 1);
                    last_status = Some(resp.status);
                    last_message = resp.body;
                }
                Ok(resp) => {
                    return Err(Error::Provider { status: Some(resp.status), message: resp.body });
                }
                Err(e) => {
                    log::warn!("{e} (attempt {})", attempt + 1);
                    last_status = None;
                    last_message = e.0;
                }
            }
        }
        Err(Error::Provider {
            status: last_status,
            message: format!("gave up after {} attempts: {last_message}", self.config.max_retries + 1),
        })
    }
}

impl<T: Transport> Provider for HttpProvider<T> {
    fn complete(&self, _task: Task, prompt: &str, temperature: f64) -> Result<String> {
        let body = json!({
            "model": self.config.model_id,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": temperature,
            "max_tokens": self.config.max_tokens,
        });
        let response = self.post_with_retry(&self.config.endpoint_url, &body)?;
        response
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| Error::format("completion response has no choices[0].message.content", response.to_string()))
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<Vec<f64>>> {
        let url = self
            .config
            .embedding_url
            .as_deref()
            .ok_or_else(|| Error::Config("provider has no embedding_url configured".into()))?;
        let model = self.config.embedding_model.as_deref().unwrap_or(&self.config.model_id);
        let response = self.post_with_retry(url, &json!({"model": model, "input": texts}))?;
        let data = response
            .get("data")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::format("embedding response has no data array", response.to_string()))?;
        data.iter()
            .map(|item| {
                item.get("embedding")
                    .and_then(Value::as_array)
                    .and_then(|xs| xs.iter().map(Value::as_f64).collect::<Option<Vec<f64>>>())
                    .ok_or_else(|| Error::format("embedding entry is not a number array", item.to_string()))
            })
            .collect()
    }
}
