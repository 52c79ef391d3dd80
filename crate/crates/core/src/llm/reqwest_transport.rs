use std::time::Duration;

use serde_json::Value;

use crate::llm::{HttpResponse, Transport, TransportError};

/// Blocking HTTPS transport.
#[derive(Debug, Clone, Default)]
pub struct ReqwestTransport {
    client: reqwest::blocking::Client,
}

impl ReqwestTransport {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Transport for ReqwestTransport {
    fn post_json(&self, url: &str, api_key: &str, body: &Value, timeout: Duration) -> Result<HttpResponse, TransportError> {
        let response = self
            .client
            .post(url)
            .bearer_auth(api_key)
            .timeout(timeout)
            .json(body)
            .send()
            .map_err(|e| TransportError(e.to_string()))?;
        let status = response.status().as_u16();
        let body = response.text().map_err(|e| TransportError(e.to_string()))?;
        Ok(HttpResponse { status, body })
    }
}
