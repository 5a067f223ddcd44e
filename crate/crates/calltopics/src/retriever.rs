//! Per-paragraph topic retrieval: render the retrieval prompt, call the chat
//! provider, and parse the JSON topic-and-excerpt reply.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Paragraph;
use crate::prompts;
use crate::providers::{ChatRequest, Provider, ProviderError};

#[derive(Debug, Error)]
pub enum RetrieverError {
    #[error("provider error: {0}")]
    Provider(#[from] ProviderError),
    #[error("unparseable retriever response ({reason}); raw: {raw:?}")]
    Parse { reason: String, raw: String },
}

/// One extracted topic with its supporting excerpts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicMentionDraft {
    pub topic_name: String,
    pub excerpts: Vec<String>,
}

/// The retrieval instructions, shipped as a static asset and sent as the
/// system message. The paragraph text goes in the user message.
pub fn render_retriever_prompt() -> &'static str {
    prompts::TOPIC_RETRIEVAL
}

/// Strips a surrounding markdown code fence (``` or ```json) if present.
/// Anything else, including conversational pre-text, is left for the JSON
/// parser to reject.
fn strip_code_fence(text: &str) -> &str {
    let t = text.trim();
    let Some(rest) = t.strip_prefix("```") else {
        return t;
    };
    let rest = match rest.split_once('\n') {
        Some((_tag, body)) => body,
        None => return t,
    };
    match rest.rfind("```") {
        Some(end) => rest[..end].trim(),
        None => rest.trim(),
    }
}

/// Parses the provider's reply into drafts. Names and excerpts are trimmed;
/// entries with an empty name or no usable excerpts are dropped.
pub fn parse_retriever_response(text: &str) -> Result<Vec<TopicMentionDraft>, RetrieverError> {
    let payload = strip_code_fence(text);
    let wire: Vec<TopicMentionDraft> =
        serde_json::from_str(payload).map_err(|e| RetrieverError::Parse {
            reason: e.to_string(),
            raw: text.to_string(),
        })?;
    Ok(wire
        .into_iter()
        .filter_map(|draft| {
            let topic_name = draft.topic_name.trim().to_string();
            if topic_name.is_empty() {
                return None;
            }
            let excerpts: Vec<String> = draft
                .excerpts
                .iter()
                .map(|e| e.trim().to_string())
                .filter(|e| !e.is_empty())
                .collect();
            if excerpts.is_empty() {
                return None;
            }
            Some(TopicMentionDraft {
                topic_name,
                excerpts,
            })
        })
        .collect())
}

/// One retrieval round trip for one paragraph. A malformed reply is retried
/// once with the same prompt; a second malformed reply surfaces as the parse
/// error so the caller can record the paragraph as skipped.
pub fn retrieve_topics(
    paragraph: &Paragraph,
    provider: &dyn Provider,
) -> Result<Vec<TopicMentionDraft>, RetrieverError> {
    let request = ChatRequest::new(render_retriever_prompt(), paragraph.text.clone());
    let first = provider.chat(&request)?;
    match parse_retriever_response(&first.text) {
        Ok(drafts) => Ok(drafts),
        Err(first_err) => {
            log::warn!(
                "retriever reply unparseable for {}, retrying once: {first_err}",
                paragraph.para_id
            );
            let second = provider.chat(&request)?;
            parse_retriever_response(&second.text)
        }
    }
}
