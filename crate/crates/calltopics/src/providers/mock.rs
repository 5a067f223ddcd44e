//! Deterministic scripted provider for tests and offline runs. All state is
//! immutable after construction: same inputs, same bytes out, no clock, no
//! randomness. Prompts with no matching rule are a hard error, never a
//! silent fallback.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ChatRequest, ChatResponse, EmbeddingVector, Provider, ProviderError};
use crate::corpus::{split_sentences, tokenize};
use crate::prompts;

/// Retriever rule: a paragraph containing `keyword` (case-insensitive)
/// yields `topic_name`, with `excerpt` overriding the default excerpt (the
/// sentence containing the keyword).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordRule {
    pub keyword: String,
    pub topic_name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excerpt: Option<String>,
}

/// Rule set for the mock. `exact` is checked first against the raw user
/// message; the remaining tables apply per prompt family, dispatched on the
/// shipped instruction prompts' opening lines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MockScript {
    #[serde(default = "default_embedding_dim")]
    pub embedding_dim: usize,
    #[serde(default)]
    pub exact: BTreeMap<String, String>,
    #[serde(default)]
    pub keyword_topics: Vec<KeywordRule>,
    /// Canned matcher replies keyed by the query topic.
    #[serde(default)]
    pub matcher: BTreeMap<String, String>,
    /// Fallback matcher reply for queries with no canned entry.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matcher_default: Option<String>,
    /// Canned parent-selection replies keyed by the given topic.
    #[serde(default)]
    pub parent: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_default: Option<String>,
    /// Topic names the product classifier answers "yes" for.
    #[serde(default)]
    pub product_yes: Vec<String>,
}

fn default_embedding_dim() -> usize {
    256
}

impl Default for MockScript {
    fn default() -> Self {
        Self {
            embedding_dim: default_embedding_dim(),
            exact: BTreeMap::new(),
            keyword_topics: Vec::new(),
            matcher: BTreeMap::new(),
            matcher_default: None,
            parent: BTreeMap::new(),
            parent_default: None,
            product_yes: Vec::new(),
        }
    }
}

impl MockScript {
    pub fn load(path: &Path) -> Result<Self, ProviderError> {
        let raw = std::fs::read_to_string(path).map_err(|e| {
            ProviderError::InvalidScript(format!("cannot read {}: {e}", path.display()))
        })?;
        let script: MockScript = serde_json::from_str(&raw).map_err(|e| {
            ProviderError::InvalidScript(format!("cannot parse {}: {e}", path.display()))
        })?;
        script.validate()?;
        Ok(script)
    }

    pub fn validate(&self) -> Result<(), ProviderError> {
        if self.embedding_dim == 0 {
            return Err(ProviderError::InvalidScript(
                "embedding_dim must be positive".to_string(),
            ));
        }
        if self
            .keyword_topics
            .iter()
            .any(|r| r.keyword.trim().is_empty() || r.topic_name.trim().is_empty())
        {
            return Err(ProviderError::InvalidScript(
                "keyword rules need non-empty keyword and topic_name".to_string(),
            ));
        }
        Ok(())
    }
}

pub struct MockProvider {
    script: MockScript,
    /// Lowercased keywords, precomputed once; rule order is significant.
    keywords_lower: Vec<String>,
    products_lower: Vec<String>,
}

impl MockProvider {
    pub fn new(script: MockScript) -> Result<Self, ProviderError> {
        script.validate()?;
        let keywords_lower = script
            .keyword_topics
            .iter()
            .map(|r| r.keyword.to_lowercase())
            .collect();
        let products_lower = script
            .product_yes
            .iter()
            .map(|p| p.trim().to_lowercase())
            .collect();
        Ok(Self {
            script,
            keywords_lower,
            products_lower,
        })
    }

    pub fn from_script_file(path: &Path) -> Result<Self, ProviderError> {
        Self::new(MockScript::load(path)?)
    }

    /// Hashed-bag embedding: FNV-1a each token into one of `dim` buckets,
    /// count occupancy, L2-normalize. Texts sharing tokens get correlated
    /// vectors; token-free texts embed to the zero vector.
    pub fn hashed_bag_embedding(text: &str, dim: usize) -> Vec<f64> {
        let mut buckets = vec![0.0f64; dim];
        for token in tokenize(text) {
            let idx = (fnv1a64(token.as_bytes()) % dim as u64) as usize;
            buckets[idx] += 1.0;
        }
        let norm = buckets.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in &mut buckets {
                *v /= norm;
            }
        }
        buckets
    }

    fn retriever_reply(&self, paragraph: &str) -> String {
        let lower = paragraph.to_lowercase();
        // One draft per distinct topic, excerpts appended in rule order.
        let mut order: Vec<&str> = Vec::new();
        let mut excerpts: BTreeMap<&str, Vec<String>> = BTreeMap::new();
        for (rule, keyword_lower) in self.script.keyword_topics.iter().zip(&self.keywords_lower) {
            if !lower.contains(keyword_lower.as_str()) {
                continue;
            }
            let excerpt = rule
                .excerpt
                .clone()
                .unwrap_or_else(|| default_excerpt(paragraph, keyword_lower));
            let entry = excerpts.entry(rule.topic_name.as_str()).or_default();
            if entry.is_empty() {
                order.push(rule.topic_name.as_str());
            }
            if !entry.contains(&excerpt) {
                entry.push(excerpt);
            }
        }
        let drafts: Vec<serde_json::Value> = order
            .iter()
            .map(|name| {
                serde_json::json!({
                    "topic_name": name,
                    "excerpts": excerpts[name],
                })
            })
            .collect();
        serde_json::Value::Array(drafts).to_string()
    }

    fn unscripted(request: &ChatRequest) -> ProviderError {
        let head: String = request.user_message.chars().take(80).collect();
        ProviderError::UnscriptedPrompt(head)
    }
}

/// The sentence containing the keyword, or the trimmed paragraph when no
/// single sentence contains it.
fn default_excerpt(paragraph: &str, keyword_lower: &str) -> String {
    split_sentences(paragraph)
        .into_iter()
        .find(|s| s.to_lowercase().contains(keyword_lower))
        .unwrap_or(paragraph.trim())
        .to_string()
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

impl Provider for MockProvider {
    fn chat(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        request.validate()?;

        if let Some(reply) = self.script.exact.get(&request.user_message) {
            return Ok(ChatResponse::from_text(reply.clone()));
        }

        if request.system_prompt == prompts::PRODUCT_CLASSIFIER {
            let name = prompts::extract_product_topic(&request.user_message)
                .ok_or_else(|| Self::unscripted(request))?;
            let yes = self.products_lower.contains(&name.to_lowercase());
            return Ok(ChatResponse::from_text(if yes { "yes" } else { "no" }));
        }

        if request.system_prompt.starts_with(prompts::RETRIEVAL_MARKER) {
            return Ok(ChatResponse::from_text(
                self.retriever_reply(&request.user_message),
            ));
        }

        if request.system_prompt.starts_with(prompts::EXISTENCE_MARKER) {
            let query = prompts::extract_query_topic(&request.user_message)
                .ok_or_else(|| Self::unscripted(request))?;
            let reply = self
                .script
                .matcher
                .get(query)
                .or(self.script.matcher_default.as_ref())
                .ok_or_else(|| Self::unscripted(request))?;
            return Ok(ChatResponse::from_text(reply.clone()));
        }

        if request.system_prompt.starts_with(prompts::INSERTION_MARKER) {
            let topic = prompts::extract_given_topic(&request.user_message)
                .ok_or_else(|| Self::unscripted(request))?;
            let reply = self
                .script
                .parent
                .get(topic)
                .or(self.script.parent_default.as_ref())
                .ok_or_else(|| Self::unscripted(request))?;
            return Ok(ChatResponse::from_text(reply.clone()));
        }

        Err(Self::unscripted(request))
    }

    fn embed(&self, texts: &[String]) -> Result<Vec<EmbeddingVector>, ProviderError> {
        texts
            .iter()
            .map(|t| {
                EmbeddingVector::new(Self::hashed_bag_embedding(t, self.script.embedding_dim))
            })
            .collect()
    }
}
