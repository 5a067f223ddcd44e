//! The ontologist agent: decides whether a retrieved topic already exists
//! (semantic match, recorded as an alias) or must be inserted (top-down
//! parent search), and runs the full corpus enrichment loop.
//!
//! Retrieval calls may run concurrently, but every ontology mutation happens
//! sequentially in corpus order, so a run is a deterministic function of
//! (corpus, seeds, config, provider script).

use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::TranscriptDocument;
use crate::ontology::{normalize_label, Ontology, OntologyError, TopicId, DEFAULT_MAX_DEPTH};
use crate::prompts;
use crate::providers::{cosine_similarity, ChatRequest, Provider, ProviderError};
use crate::retriever::{retrieve_topics, RetrieverError};

#[derive(Debug, Error)]
pub enum OntologistError {
    #[error("provider error: {0}")]
    Provider(#[from] ProviderError),
    #[error("ontology error: {0}")]
    Ontology(#[from] OntologyError),
    #[error("paragraph retrieval failed: {0}")]
    Retriever(#[from] RetrieverError),
    #[error("empty query topic")]
    EmptyQuery,
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("enrichments line {line}: {source}")]
    MalformedEnrichment {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

/// One scored match from the semantic matcher.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchCandidate {
    pub topic: String,
    pub similarity: f64,
}

/// The matcher's per-topic reasoning, kept for reporting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReasoning {
    pub topic: String,
    pub similarity: f64,
    pub reasoning: String,
    pub parent_subset_check: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchDecision {
    pub query_topic: String,
    /// In-range matches, best first (similarity descending, label ascending).
    pub matches: Vec<MatchCandidate>,
    pub reasoning_records: Vec<MatchReasoning>,
    /// Set only when the best match clears the threshold and its label
    /// resolves to an offered candidate.
    pub accepted: Option<TopicId>,
}

impl MatchDecision {
    fn no_match(query: &str) -> Self {
        Self {
            query_topic: query.to_string(),
            matches: Vec::new(),
            reasoning_records: Vec::new(),
            accepted: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParentDecision {
    pub query_topic: String,
    /// Final label chosen by the agent; None is the explicit no-parent
    /// outcome and sends the topic to the root level.
    pub chosen_parent: Option<String>,
    pub reasoning: String,
    pub resolved_parent_id: Option<TopicId>,
}

impl ParentDecision {
    fn no_parent(query: &str, reasoning: impl Into<String>) -> Self {
        Self {
            query_topic: query.to_string(),
            chosen_parent: None,
            reasoning: reasoning.into(),
            resolved_parent_id: None,
        }
    }
}

/// A paragraph-to-topic link with its supporting excerpt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Enrichment {
    pub para_id: String,
    pub doc_id: String,
    pub call_date: NaiveDate,
    pub topic_id: TopicId,
    pub excerpt: String,
}

fn default_true() -> bool {
    true
}

/// What to do when a single paragraph fails: record and continue (default)
/// or abort the run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkipPolicy {
    #[serde(default = "default_true")]
    pub skip_on_parse_error: bool,
    #[serde(default = "default_true")]
    pub skip_on_provider_error: bool,
}

impl Default for SkipPolicy {
    fn default() -> Self {
        Self {
            skip_on_parse_error: true,
            skip_on_provider_error: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Minimum matcher similarity (0-100) to accept an existing topic.
    #[serde(default = "default_match_threshold")]
    pub match_threshold: u8,
    /// Candidate shortlist size for the existence check.
    #[serde(default = "default_candidate_k")]
    pub candidate_k: usize,
    /// Concurrent retrieval calls.
    #[serde(default = "default_max_in_flight")]
    pub max_in_flight: usize,
    /// Depth cap for freshly created ontologies.
    #[serde(default = "default_max_depth")]
    pub max_depth: usize,
    #[serde(default)]
    pub skip_policy: SkipPolicy,
}

fn default_match_threshold() -> u8 {
    85
}

fn default_candidate_k() -> usize {
    25
}

fn default_max_in_flight() -> usize {
    4
}

fn default_max_depth() -> usize {
    DEFAULT_MAX_DEPTH
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            match_threshold: default_match_threshold(),
            candidate_k: default_candidate_k(),
            max_in_flight: default_max_in_flight(),
            max_depth: default_max_depth(),
            skip_policy: SkipPolicy::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.match_threshold > 100 {
            return Err("match_threshold must be in 0..=100".to_string());
        }
        if self.candidate_k == 0 {
            return Err("candidate_k must be at least 1".to_string());
        }
        if self.max_in_flight == 0 {
            return Err("max_in_flight must be at least 1".to_string());
        }
        if self.max_depth == 0 {
            return Err("max_depth must be at least 1".to_string());
        }
        Ok(())
    }
}

/// How a query topic was integrated into the tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationOutcome {
    /// Exact name/alias hit; no provider calls.
    ExistingExact,
    /// Semantic match accepted; query recorded as an alias.
    MatchedAlias,
    InsertedUnderParent,
    InsertedAtRoot,
}

/// Top-k ontology nodes by cosine similarity between the query embedding and
/// each node-name embedding. Ties break by normalized name ascending. An
/// empty tree yields an empty list without an embedding call.
pub fn candidate_topics(
    query: &str,
    tree: &Ontology,
    embedder: &dyn Provider,
    k: usize,
) -> Result<Vec<TopicId>, OntologistError> {
    if tree.is_empty() || k == 0 {
        return Ok(Vec::new());
    }
    let mut texts = Vec::with_capacity(tree.len() + 1);
    texts.push(query.to_string());
    let ids: Vec<TopicId> = tree.iter_nodes().map(|n| n.topic_id).collect();
    texts.extend(tree.iter_nodes().map(|n| n.name.clone()));
    let vectors = embedder.embed(&texts)?;
    let (query_vec, node_vecs) = vectors.split_first().expect("embed preserves cardinality");

    let mut scored: Vec<(f64, String, TopicId)> = ids
        .iter()
        .zip(node_vecs)
        .map(|(id, vec)| {
            let name = &tree.node(*id).expect("id from this tree").name;
            (cosine_similarity(query_vec, vec), normalize_label(name), *id)
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    Ok(scored.into_iter().take(k).map(|(_, _, id)| id).collect())
}

#[derive(Deserialize)]
struct MatcherWire {
    #[serde(default)]
    #[allow(dead_code)]
    query_topic: Option<String>,
    matches: Vec<MatchWire>,
    #[serde(default)]
    detailed_analysis: Option<DetailedAnalysisWire>,
}

#[derive(Deserialize)]
struct MatchWire {
    topic: String,
    similarity: f64,
}

#[derive(Deserialize)]
struct DetailedAnalysisWire {
    #[serde(default)]
    matched_topics: Vec<ReasoningWire>,
}

#[derive(Deserialize)]
struct ReasoningWire {
    topic: String,
    similarity: f64,
    #[serde(default)]
    reasoning: String,
    #[serde(default)]
    parent_subset_check: String,
}

#[derive(Deserialize)]
struct ParentWire {
    #[serde(default)]
    reasoning: String,
    parent: String,
}

/// Extracts the JSON payload from an agent reply: strips a surrounding code
/// fence and a `<structured_output>` wrapper, tolerating a missing closing
/// tag (one of the shipped prompt's own examples omits it).
fn extract_structured_payload(text: &str) -> &str {
    let mut t = text.trim();
    if let Some(rest) = t.strip_prefix("```") {
        if let Some((_tag, body)) = rest.split_once('\n') {
            t = match body.rfind("```") {
                Some(end) => body[..end].trim(),
                None => body.trim(),
            };
        }
    }
    if let Some(start) = t.find("<structured_output>") {
        t = &t[start + "<structured_output>".len()..];
    }
    if let Some(end) = t.find("</structured_output>") {
        t = &t[..end];
    }
    t.trim()
}

/// Parses a matcher reply into (in-range matches sorted best-first,
/// reasoning records). Matches with similarity outside [0,100] are dropped
/// with a warning.
pub fn parse_matcher_response(
    text: &str,
) -> Result<(Vec<MatchCandidate>, Vec<MatchReasoning>), serde_json::Error> {
    let wire: MatcherWire = serde_json::from_str(extract_structured_payload(text))?;
    let mut matches: Vec<MatchCandidate> = wire
        .matches
        .into_iter()
        .filter_map(|m| {
            if m.similarity.is_finite() && (0.0..=100.0).contains(&m.similarity) {
                Some(MatchCandidate {
                    topic: m.topic.trim().to_string(),
                    similarity: m.similarity,
                })
            } else {
                log::warn!(
                    "dropping match {:?} with out-of-range similarity {}",
                    m.topic,
                    m.similarity
                );
                None
            }
        })
        .collect();
    matches.sort_by(|a, b| {
        b.similarity
            .total_cmp(&a.similarity)
            .then_with(|| normalize_label(&a.topic).cmp(&normalize_label(&b.topic)))
    });
    let reasoning = wire
        .detailed_analysis
        .map(|d| {
            d.matched_topics
                .into_iter()
                .map(|r| MatchReasoning {
                    topic: r.topic,
                    similarity: r.similarity,
                    reasoning: r.reasoning,
                    parent_subset_check: r.parent_subset_check,
                })
                .collect()
        })
        .unwrap_or_default();
    Ok((matches, reasoning))
}

/// Parses a parent-selection reply into (label, reasoning).
pub fn parse_parent_response(text: &str) -> Result<(String, String), serde_json::Error> {
    let wire: ParentWire = serde_json::from_str(extract_structured_payload(text))?;
    Ok((wire.parent.trim().to_string(), wire.reasoning))
}

/// Runs the semantic existence check over a candidate shortlist. Candidate
/// names and aliases are offered as reference topics. A reply naming a label
/// that was not offered invalidates the decision (treated as no-match); two
/// unparseable replies also degrade to no-match. Only transport failures
/// are errors.
pub fn check_exists(
    query: &str,
    candidates: &[TopicId],
    tree: &Ontology,
    provider: &dyn Provider,
    threshold: u8,
) -> Result<MatchDecision, OntologistError> {
    if candidates.is_empty() {
        return Ok(MatchDecision::no_match(query));
    }
    let mut labels: Vec<String> = Vec::new();
    let mut offered: BTreeSet<String> = BTreeSet::new();
    for id in candidates {
        let node = tree.node(*id).ok_or(OntologyError::NotFound(*id))?;
        for label in node.labels() {
            labels.push(label.to_string());
            offered.insert(normalize_label(label));
        }
    }
    let request = ChatRequest::new(
        prompts::TOPIC_EXISTENCE,
        prompts::render_existence_user(query, &labels),
    );

    let mut parsed = None;
    for attempt in 0..2 {
        let reply = provider.chat(&request)?;
        match parse_matcher_response(&reply.text) {
            Ok(p) => {
                parsed = Some(p);
                break;
            }
            Err(e) if attempt == 0 => {
                log::warn!("matcher reply unparseable for {query:?}, retrying once: {e}");
            }
            Err(e) => {
                log::warn!("matcher reply unparseable for {query:?} twice, treating as no-match: {e}");
            }
        }
    }
    let Some((matches, reasoning_records)) = parsed else {
        return Ok(MatchDecision::no_match(query));
    };

    let accepted = match matches.first() {
        Some(best) if best.similarity >= f64::from(threshold) => {
            if !offered.contains(&normalize_label(&best.topic)) {
                log::warn!(
                    "matcher chose {:?} which was not among the offered candidates; ignoring",
                    best.topic
                );
                None
            } else {
                match tree.find_by_name_or_alias(&best.topic) {
                    Some(node) => Some(node.topic_id),
                    None => {
                        log::warn!("matched label {:?} does not resolve; ignoring", best.topic);
                        None
                    }
                }
            }
        }
        _ => None,
    };

    Ok(MatchDecision {
        query_topic: query.to_string(),
        matches,
        reasoning_records,
        accepted,
    })
}

/// Deepest level (0-indexed) at which a node can still take children without
/// breaching the depth cap.
fn deepest_parent_level(max_depth: usize) -> Option<usize> {
    max_depth.checked_sub(2)
}

/// Top-down parent search. Round one offers every root with its children;
/// while the choice has children and room below it, a further round offers
/// the chosen node and its children. The descent settles when the choice is
/// a leaf, repeats, or sits at the deepest parentable level. An explicit
/// "none" (or a label that was not offered, after one retry) yields the
/// no-parent outcome and the caller inserts at root level.
pub fn choose_parent(
    query: &str,
    tree: &Ontology,
    provider: &dyn Provider,
) -> Result<ParentDecision, OntologistError> {
    let Some(parent_cap) = deepest_parent_level(tree.max_depth()) else {
        return Ok(ParentDecision::no_parent(query, "depth cap forbids parents"));
    };
    if tree.is_empty() {
        return Ok(ParentDecision::no_parent(query, "ontology is empty"));
    }

    let mut current: Option<TopicId> = None;
    let mut reasoning = String::new();
    loop {
        // Build this round's view {name: [child names]} plus the offer set.
        let mut view = serde_json::Map::new();
        let mut offer: BTreeMap<String, TopicId> = BTreeMap::new();
        let rounds: Vec<TopicId> = match current {
            None => tree.roots().to_vec(),
            Some(id) => vec![id],
        };
        for id in rounds {
            let node = tree.node(id).expect("offered ids come from this tree");
            let level = tree.depth(id).expect("stored node");
            if level > parent_cap {
                continue;
            }
            offer.insert(normalize_label(&node.name), id);
            let mut children = Vec::new();
            for cid in &node.child_ids {
                let child = tree.node(*cid).expect("child ids are consistent");
                if level + 1 <= parent_cap {
                    offer.insert(normalize_label(&child.name), *cid);
                    children.push(serde_json::Value::String(child.name.clone()));
                }
            }
            view.insert(node.name.clone(), serde_json::Value::Array(children));
        }
        if offer.is_empty() {
            return Ok(ParentDecision::no_parent(query, reasoning));
        }

        let request = ChatRequest::new(
            prompts::TOPIC_INSERTION,
            prompts::render_insertion_user(query, &serde_json::Value::Object(view)),
        );

        let mut chosen: Option<(String, String)> = None;
        for attempt in 0..2 {
            let reply = provider.chat(&request)?;
            match parse_parent_response(&reply.text) {
                Ok((label, why)) => {
                    let normalized = normalize_label(&label);
                    if normalized == "none" || normalized == "no suitable parent" {
                        return Ok(ParentDecision::no_parent(query, why));
                    }
                    if offer.contains_key(&normalized) {
                        chosen = Some((label, why));
                        break;
                    }
                    log::warn!(
                        "parent choice {label:?} for {query:?} was not offered (attempt {})",
                        attempt + 1
                    );
                }
                Err(e) => {
                    log::warn!(
                        "parent reply unparseable for {query:?} (attempt {}): {e}",
                        attempt + 1
                    );
                }
            }
        }
        let Some((label, why)) = chosen else {
            log::warn!("no valid parent choice for {query:?}; inserting at root level");
            return Ok(ParentDecision::no_parent(query, reasoning));
        };
        reasoning = why;
        let chosen_id = offer[&normalize_label(&label)];
        let settled = ParentDecision {
            query_topic: query.to_string(),
            chosen_parent: Some(tree.node(chosen_id).expect("offered id").name.clone()),
            reasoning: reasoning.clone(),
            resolved_parent_id: Some(chosen_id),
        };

        let node = tree.node(chosen_id).expect("offered id");
        let level = tree.depth(chosen_id).expect("offered id");
        let repeated = current == Some(chosen_id);
        if node.is_leaf() || repeated || level >= parent_cap {
            return Ok(settled);
        }
        current = Some(chosen_id);
    }
}

/// Resolves one query topic to a node id: exact lookup, then semantic match
/// (recording an alias), then insertion under the agent-chosen parent or at
/// the root level. `now` stamps any mutation.
pub fn integrate_topic(
    query: &str,
    tree: &mut Ontology,
    provider: &dyn Provider,
    config: &PipelineConfig,
    now: NaiveDate,
) -> Result<(TopicId, IntegrationOutcome), OntologistError> {
    if normalize_label(query).is_empty() {
        return Err(OntologistError::EmptyQuery);
    }
    if let Some(node) = tree.find_by_name_or_alias(query) {
        return Ok((node.topic_id, IntegrationOutcome::ExistingExact));
    }

    if !tree.is_empty() {
        let candidates = candidate_topics(query, tree, provider, config.candidate_k)?;
        let decision = check_exists(query, &candidates, tree, provider, config.match_threshold)?;
        if let Some(matched) = decision.accepted {
            tree.add_alias(matched, query, now)?;
            return Ok((matched, IntegrationOutcome::MatchedAlias));
        }
    }

    let parent = choose_parent(query, tree, provider)?;
    match parent.resolved_parent_id {
        Some(pid) => {
            let id = tree.insert_node(query, Some(pid), now)?;
            Ok((id, IntegrationOutcome::InsertedUnderParent))
        }
        None => {
            let id = tree.insert_node(query, None, now)?;
            Ok((id, IntegrationOutcome::InsertedAtRoot))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedParagraph {
    pub para_id: String,
    pub error: String,
}

/// Counters for one enrichment run. Every processed paragraph lands in
/// exactly one of enriched / empty / skipped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct RunReport {
    pub paragraphs_processed: usize,
    pub paragraphs_enriched: usize,
    pub paragraphs_empty: usize,
    pub paragraphs_skipped: usize,
    pub topics_created: usize,
    pub aliases_added: usize,
    pub skipped: Vec<SkippedParagraph>,
}

/// Runs retrieval + integration over the whole corpus. Documents are
/// processed in (call_date, ticker, doc_id) order; retrieval is pipelined in
/// batches of max_in_flight, while integration and all tree mutations stay
/// strictly sequential in paragraph order. A paragraph that fails mid-
/// integration keeps any ontology growth but contributes no enrichments.
pub fn enrich_corpus(
    corpus: &[TranscriptDocument],
    tree: &mut Ontology,
    provider: &dyn Provider,
    config: &PipelineConfig,
) -> Result<(Vec<Enrichment>, RunReport), OntologistError> {
    let mut docs: Vec<&TranscriptDocument> = corpus.iter().collect();
    docs.sort_by(|a, b| {
        (a.call_date, &a.ticker, &a.doc_id).cmp(&(b.call_date, &b.ticker, &b.doc_id))
    });
    let items: Vec<(&TranscriptDocument, &crate::corpus::Paragraph)> = docs
        .iter()
        .flat_map(|d| d.paragraphs.iter().map(move |p| (*d, p)))
        .collect();

    let mut enrichments = Vec::new();
    let mut report = RunReport::default();

    for batch in items.chunks(config.max_in_flight.max(1)) {
        let retrievals: Vec<Result<_, RetrieverError>> = std::thread::scope(|scope| {
            let handles: Vec<_> = batch
                .iter()
                .map(|(_, para)| scope.spawn(move || retrieve_topics(para, provider)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("retrieval thread panicked"))
                .collect()
        });

        for ((doc, para), retrieval) in batch.iter().zip(retrievals) {
            report.paragraphs_processed += 1;
            let drafts = match retrieval {
                Ok(drafts) => drafts,
                Err(e) => {
                    let skippable = match &e {
                        RetrieverError::Parse { .. } => config.skip_policy.skip_on_parse_error,
                        RetrieverError::Provider(_) => config.skip_policy.skip_on_provider_error,
                    };
                    if !skippable {
                        return Err(e.into());
                    }
                    report.paragraphs_skipped += 1;
                    report.skipped.push(SkippedParagraph {
                        para_id: para.para_id.clone(),
                        error: e.to_string(),
                    });
                    continue;
                }
            };
            if drafts.is_empty() {
                report.paragraphs_empty += 1;
                continue;
            }

            let mut paragraph_enrichments = Vec::new();
            let mut failed: Option<OntologistError> = None;
            for draft in &drafts {
                match integrate_topic(&draft.topic_name, tree, provider, config, doc.call_date) {
                    Ok((topic_id, outcome)) => {
                        match outcome {
                            IntegrationOutcome::MatchedAlias => report.aliases_added += 1,
                            IntegrationOutcome::InsertedUnderParent
                            | IntegrationOutcome::InsertedAtRoot => report.topics_created += 1,
                            IntegrationOutcome::ExistingExact => {}
                        }
                        for excerpt in &draft.excerpts {
                            paragraph_enrichments.push(Enrichment {
                                para_id: para.para_id.clone(),
                                doc_id: doc.doc_id.clone(),
                                call_date: doc.call_date,
                                topic_id,
                                excerpt: excerpt.clone(),
                            });
                        }
                    }
                    Err(OntologistError::Provider(e))
                        if config.skip_policy.skip_on_provider_error =>
                    {
                        failed = Some(OntologistError::Provider(e));
                        break;
                    }
                    Err(e) => return Err(e),
                }
            }
            match failed {
                Some(e) => {
                    report.paragraphs_skipped += 1;
                    report.skipped.push(SkippedParagraph {
                        para_id: para.para_id.clone(),
                        error: e.to_string(),
                    });
                }
                None => {
                    report.paragraphs_enriched += 1;
                    enrichments.extend(paragraph_enrichments);
                }
            }
        }
    }
    Ok((enrichments, report))
}

pub fn save_enrichments_jsonl(enrichments: &[Enrichment], path: &Path) -> Result<(), OntologistError> {
    let mut out = Vec::new();
    for e in enrichments {
        serde_json::to_writer(&mut out, e).expect("enrichment serializes");
        out.push(b'\n');
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(&out))
        .map_err(|source| OntologistError::Io {
            path: path.display().to_string(),
            source,
        })
}

pub fn load_enrichments_jsonl(path: &Path) -> Result<Vec<Enrichment>, OntologistError> {
    let f = std::fs::File::open(path).map_err(|source| OntologistError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|source| OntologistError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let e: Enrichment = serde_json::from_str(&line)
            .map_err(|source| OntologistError::MalformedEnrichment { line: i + 1, source })?;
        out.push(e);
    }
    Ok(out)
}
