//! Chat-completion and embedding backends behind one trait: a remote
//! OpenAI-compatible HTTP client for real runs and a scripted deterministic
//! mock for tests. Everything downstream is provider-agnostic.

mod http;
mod mock;

pub use http::HttpProvider;
pub use mock::{KeywordRule, MockProvider, MockScript};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("chat request has an empty prompt")]
    EmptyPrompt,
    #[error("chat request temperature {0} outside [0,2]")]
    InvalidTemperature(f64),
    #[error("api key environment variable {0:?} is not set")]
    MissingApiKey(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("http status {status}: {body}")]
    Status { status: u16, body: String },
    #[error("malformed provider response: {0}")]
    MalformedResponse(String),
    #[error("mock provider has no rule for prompt starting {0:?}")]
    UnscriptedPrompt(String),
    #[error("invalid mock script: {0}")]
    InvalidScript(String),
    #[error("provider failed after {attempts} attempts: {source}")]
    Exhausted {
        attempts: u32,
        #[source]
        source: Box<ProviderError>,
    },
}

impl ProviderError {
    /// Transient failures worth retrying: transport errors, rate limits,
    /// and server-side 5xx. Other 4xx are terminal.
    pub fn is_retryable(&self) -> bool {
        match self {
            ProviderError::Transport(_) => true,
            ProviderError::Status { status, .. } => *status == 429 || (500..=599).contains(status),
            _ => false,
        }
    }
}

/// One system+user chat exchange. The pipeline never needs multi-turn
/// conversations, so a request is exactly one prompt pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ChatRequest {
    pub system_prompt: String,
    pub user_message: String,
    pub temperature: f64,
    pub max_output_tokens: u32,
}

impl ChatRequest {
    /// Temperature defaults to 0 so agent calls are as deterministic as the
    /// backing model allows.
    pub fn new(system_prompt: impl Into<String>, user_message: impl Into<String>) -> Self {
        Self {
            system_prompt: system_prompt.into(),
            user_message: user_message.into(),
            temperature: 0.0,
            max_output_tokens: 1024,
        }
    }

    pub fn validate(&self) -> Result<(), ProviderError> {
        if self.system_prompt.trim().is_empty() || self.user_message.trim().is_empty() {
            return Err(ProviderError::EmptyPrompt);
        }
        if !self.temperature.is_finite() || !(0.0..=2.0).contains(&self.temperature) {
            return Err(ProviderError::InvalidTemperature(self.temperature));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChatResponse {
    pub text: String,
    /// Opaque provider details (model id, token counts) for logging only.
    pub provider_meta: BTreeMap<String, String>,
}

impl ChatResponse {
    pub fn from_text(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            provider_meta: BTreeMap::new(),
        }
    }
}

/// Dense embedding with all-finite components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector {
    values: Vec<f64>,
}

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Result<Self, ProviderError> {
        if values.is_empty() {
            return Err(ProviderError::MalformedResponse(
                "empty embedding vector".to_string(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ProviderError::MalformedResponse(
                "non-finite embedding component".to_string(),
            ));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dimension(&self) -> usize {
        self.values.len()
    }
}

/// Cosine similarity in [-1,1]. Zero vectors and dimension mismatches yield
/// 0 so callers can rank without special cases.
pub fn cosine_similarity(a: &EmbeddingVector, b: &EmbeddingVector) -> f64 {
    if a.dimension() != b.dimension() {
        return 0.0;
    }
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.values.iter().zip(&b.values) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (na.sqrt() * nb.sqrt())
}

/// Connection settings for the remote provider. The API key itself never
/// appears here; only the name of the environment variable that holds it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderConfig {
    pub endpoint_url: String,
    pub model_name: String,
    pub api_key_env_var: String,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    #[serde(default = "default_retry_backoff_secs")]
    pub retry_backoff_secs: f64,
}

fn default_timeout_secs() -> u64 {
    60
}

fn default_max_retries() -> u32 {
    3
}

fn default_retry_backoff_secs() -> f64 {
    1.0
}

impl ProviderConfig {
    pub fn validate(&self) -> Result<(), ProviderError> {
        if self.timeout_secs == 0 {
            return Err(ProviderError::InvalidScript(
                "timeout_secs must be positive".to_string(),
            ));
        }
        if self.retry_backoff_secs < 0.0 || !self.retry_backoff_secs.is_finite() {
            return Err(ProviderError::InvalidScript(
                "retry_backoff_secs must be non-negative".to_string(),
            ));
        }
        Ok(())
    }
}

/// A chat + embedding backend. Implementations must be safe to call from
/// multiple threads; the pipeline issues bounded concurrent requests.
pub trait Provider: Send + Sync {
    fn chat(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError>;

    /// One vector per input, order-preserving, constant dimension. Empty
    /// input yields an empty list without a backend call.
    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, ProviderError>;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_of_identical_vectors_is_one() {
        let v = EmbeddingVector::new(vec![0.3, 0.4, 1.2]).unwrap();
        assert!((cosine_similarity(&v, &v) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cosine_is_symmetric_and_bounded() {
        let a = EmbeddingVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        let b = EmbeddingVector::new(vec![-3.0, 0.5, 0.0]).unwrap();
        let ab = cosine_similarity(&a, &b);
        let ba = cosine_similarity(&b, &a);
        assert_eq!(ab, ba);
        assert!((-1.0..=1.0).contains(&ab));
    }

    #[test]
    fn cosine_degenerate_cases_are_zero() {
        let a = EmbeddingVector::new(vec![0.0, 0.0]).unwrap();
        let b = EmbeddingVector::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(cosine_similarity(&a, &b), 0.0);
        let c = EmbeddingVector::new(vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(cosine_similarity(&b, &c), 0.0);
    }

    #[test]
    fn embedding_vector_rejects_bad_values() {
        assert!(EmbeddingVector::new(vec![]).is_err());
        assert!(EmbeddingVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(EmbeddingVector::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn chat_request_validation() {
        let ok = ChatRequest::new("system", "user");
        assert!(ok.validate().is_ok());

        let mut empty = ok.clone();
        empty.user_message = "  ".to_string();
        assert!(matches!(
            empty.validate().unwrap_err(),
            ProviderError::EmptyPrompt
        ));

        let mut hot = ok;
        hot.temperature = 2.5;
        assert!(matches!(
            hot.validate().unwrap_err(),
            ProviderError::InvalidTemperature(_)
        ));
    }

    #[test]
    fn retryable_classification() {
        assert!(ProviderError::Transport("refused".into()).is_retryable());
        assert!(ProviderError::Status {
            status: 429,
            body: String::new()
        }
        .is_retryable());
        assert!(ProviderError::Status {
            status: 503,
            body: String::new()
        }
        .is_retryable());
        assert!(!ProviderError::Status {
            status: 401,
            body: String::new()
        }
        .is_retryable());
        assert!(!ProviderError::MalformedResponse("x".into()).is_retryable());
    }
}
