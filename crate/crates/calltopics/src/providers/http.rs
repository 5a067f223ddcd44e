//! OpenAI-compatible HTTP provider: `POST {endpoint}/chat/completions` and
//! `POST {endpoint}/embeddings`, bearer-token auth, bounded retries with
//! exponential backoff on transient failures.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{ChatRequest, ChatResponse, EmbeddingVector, Provider, ProviderConfig, ProviderError};

pub struct HttpProvider {
    config: ProviderConfig,
    api_key: String,
    client: reqwest::blocking::Client,
}

// Manual impl so the bearer token never reaches logs.
impl std::fmt::Debug for HttpProvider {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HttpProvider")
            .field("config", &self.config)
            .field("api_key", &"<redacted>")
            .finish()
    }
}

impl HttpProvider {
    pub fn new(config: ProviderConfig) -> Result<Self, ProviderError> {
        config.validate()?;
        let api_key = std::env::var(&config.api_key_env_var)
            .map_err(|_| ProviderError::MissingApiKey(config.api_key_env_var.clone()))?;
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        Ok(Self {
            config,
            api_key,
            client,
        })
    }

    fn url(&self, path: &str) -> String {
        format!("{}/{}", self.config.endpoint_url.trim_end_matches('/'), path)
    }

    /// Runs `call` up to max_retries + 1 times, sleeping
    /// backoff * 2^(attempt-1) before each retry. Non-retryable errors
    /// return immediately.
    fn with_retries<T>(
        &self,
        mut call: impl FnMut() -> Result<T, ProviderError>,
    ) -> Result<T, ProviderError> {
        let attempts = self.config.max_retries + 1;
        let mut last: Option<ProviderError> = None;
        for attempt in 0..attempts {
            if attempt > 0 {
                let secs = self.config.retry_backoff_secs * f64::from(1u32 << (attempt - 1).min(16));
                if secs > 0.0 {
                    std::thread::sleep(Duration::from_secs_f64(secs));
                }
            }
            match call() {
                Ok(v) => return Ok(v),
                Err(e) if e.is_retryable() => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(ProviderError::Exhausted {
            attempts,
            source: Box::new(last.expect("at least one attempt ran")),
        })
    }

    fn post_json<B: Serialize, R: for<'de> Deserialize<'de>>(
        &self,
        path: &str,
        body: &B,
    ) -> Result<R, ProviderError> {
        let resp = self
            .client
            .post(self.url(path))
            .bearer_auth(&self.api_key)
            .json(body)
            .send()
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp
            .text()
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        if !(200..300).contains(&status) {
            return Err(ProviderError::Status { status, body: text });
        }
        serde_json::from_str(&text).map_err(|e| ProviderError::MalformedResponse(e.to_string()))
    }
}

#[derive(Serialize)]
struct WireMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct ChatBody<'a> {
    model: &'a str,
    messages: Vec<WireMessage<'a>>,
    temperature: f64,
    max_tokens: u32,
}

#[derive(Deserialize)]
struct ChatReply {
    choices: Vec<ChatChoice>,
    #[serde(default)]
    model: Option<String>,
    #[serde(default)]
    usage: Option<ChatUsage>,
}

#[derive(Deserialize)]
struct ChatChoice {
    message: ChatReplyMessage,
}

#[derive(Deserialize)]
struct ChatReplyMessage {
    content: String,
}

#[derive(Deserialize)]
struct ChatUsage {
    #[serde(default)]
    prompt_tokens: Option<u64>,
    #[serde(default)]
    completion_tokens: Option<u64>,
}

#[derive(Serialize)]
struct EmbedBody<'a> {
    model: &'a str,
    input: &'a [String],
}

#[derive(Deserialize)]
struct EmbedReply {
    data: Vec<EmbedDatum>,
}

#[derive(Deserialize)]
struct EmbedDatum {
    index: usize,
    embedding: Vec<f64>,
}

impl Provider for HttpProvider {
    fn chat(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        request.validate()?;
        let body = ChatBody {
            model: &self.config.model_name,
            messages: vec![
                WireMessage {
                    role: "system",
                    content: &request.system_prompt,
                },
                WireMessage {
                    role: "user",
                    content: &request.user_message,
                },
            ],
            temperature: request.temperature,
            max_tokens: request.max_output_tokens,
        };
        let reply: ChatReply = self.with_retries(|| self.post_json("chat/completions", &body))?;
        let choice = reply
            .choices
            .into_iter()
            .next()
            .ok_or_else(|| ProviderError::MalformedResponse("no choices in reply".to_string()))?;
        let mut meta = std::collections::BTreeMap::new();
        if let Some(model) = reply.model {
            meta.insert("model".to_string(), model);
        }
        if let Some(usage) = reply.usage {
            if let Some(n) = usage.prompt_tokens {
                meta.insert("prompt_tokens".to_string(), n.to_string());
            }
            if let Some(n) = usage.completion_tokens {
                meta.insert("completion_tokens".to_string(), n.to_string());
            }
        }
        Ok(ChatResponse {
            text: choice.message.content,
            provider_meta: meta,
        })
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, ProviderError> {
        if texts.is_empty() {
            return Ok(Vec::new());
        }
        let body = EmbedBody {
            model: &self.config.model_name,
            input: texts,
        };
        let reply: EmbedReply = self.with_retries(|| self.post_json("embeddings", &body))?;
        if reply.data.len() != texts.len() {
            return Err(ProviderError::MalformedResponse(format!(
                "expected {} embeddings, got {}",
                texts.len(),
                reply.data.len()
            )));
        }
        let mut data = reply.data;
        data.sort_by_key(|d| d.index);
        let vectors = data
            .into_iter()
            .map(|d| EmbeddingVector::new(d.embedding))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(first) = vectors.first() {
            let dim = first.dimension();
            if vectors.iter().any(|v| v.dimension() != dim) {
                return Err(ProviderError::MalformedResponse(
                    "inconsistent embedding dimensions".to_string(),
                ));
            }
        }
        Ok(vectors)
    }
}
