//! Insight layer over an enriched corpus: per-company mention series, trend
//! classification, competitor topic overlap, emerging topics, the topic
//! discovery timeline, and embedding-based ontology coherence checks.
//!
//! Everything here is read-only over immutable enrichments and an ontology
//! snapshot. Company and fiscal quarter are recovered from the pinned
//! `TICKER-YYYYQn` document id format, so the raw corpus is not needed.

mod kendall;
mod loess;

pub use kendall::{kendall_tau, EXACT_P_MAX_LEN, MIN_SERIES_LEN};
pub use loess::loess_smooth;

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::corpus::FiscalQuarter;
use crate::ontologist::Enrichment;
use crate::ontology::{normalize_label, Ontology, TopicId};
use crate::prompts;
use crate::providers::{cosine_similarity, ChatRequest, Provider, ProviderError};

#[derive(Debug, thiserror::Error)]
pub enum AnalyticsError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("topic {0} not found in ontology")]
    TopicNotFound(TopicId),
    #[error("malformed document id {0:?}, expected TICKER-YYYYQn")]
    BadDocId(String),
    #[error("provider error: {0}")]
    Provider(#[from] ProviderError),
}

/// Splits a pinned-format document id into ticker and fiscal quarter.
fn doc_key(doc_id: &str) -> Result<(&str, FiscalQuarter), AnalyticsError> {
    let bad = || AnalyticsError::BadDocId(doc_id.to_string());
    let (ticker, quarter) = doc_id.rsplit_once('-').ok_or_else(bad)?;
    if ticker.is_empty() {
        return Err(bad());
    }
    let quarter: FiscalQuarter = quarter.parse().map_err(|_| bad())?;
    Ok((ticker, quarter))
}

// ---------------------------------------------------------------------------
// Mention series and trends
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionPoint {
    pub quarter: FiscalQuarter,
    pub count: u64,
}

/// Quarterly mention counts of one topic for one company, zero-filled over
/// the requested range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionSeries {
    pub topic_id: TopicId,
    pub company: String,
    pub points: Vec<MentionPoint>,
}

impl MentionSeries {
    pub fn counts(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.count as f64).collect()
    }
}

/// The contiguous quarter range covered by a company's enrichments
/// (earliest through latest observed quarter). Empty when the company has no
/// enrichments.
pub fn covered_quarters(
    enrichments: &[Enrichment],
    company: &str,
) -> Result<Vec<FiscalQuarter>, AnalyticsError> {
    let mut min: Option<FiscalQuarter> = None;
    let mut max: Option<FiscalQuarter> = None;
    for e in enrichments {
        let (ticker, quarter) = doc_key(&e.doc_id)?;
        if ticker != company {
            continue;
        }
        min = Some(min.map_or(quarter, |m| m.min(quarter)));
        max = Some(max.map_or(quarter, |m| m.max(quarter)));
    }
    match (min, max) {
        (Some(lo), Some(hi)) => Ok(FiscalQuarter::range_inclusive(lo, hi)),
        _ => Ok(Vec::new()),
    }
}

/// Every company ticker that appears in the enrichment log, sorted.
pub fn mentioned_companies(
    enrichments: &[Enrichment],
) -> Result<BTreeSet<String>, AnalyticsError> {
    let mut companies = BTreeSet::new();
    for e in enrichments {
        let (ticker, _) = doc_key(&e.doc_id)?;
        companies.insert(ticker.to_string());
    }
    Ok(companies)
}

/// Distinct topics mentioned by `company`, sorted by id for a stable order.
pub fn company_topics(
    enrichments: &[Enrichment],
    company: &str,
) -> Result<Vec<TopicId>, AnalyticsError> {
    let mut topics = BTreeSet::new();
    for e in enrichments {
        let (ticker, _) = doc_key(&e.doc_id)?;
        if ticker == company {
            topics.insert(e.topic_id);
        }
    }
    Ok(topics.into_iter().collect())
}

/// Counts mentions of `topic_id` (one enrichment = one mention) for `company`
/// per quarter of `quarter_range`. With `rollup` the counts include every
/// descendant of the topic. Callers that want per-paragraph granularity can
/// pre-filter with [`dedupe_paragraph_mentions`].
pub fn mention_series(
    enrichments: &[Enrichment],
    tree: &Ontology,
    topic_id: TopicId,
    company: &str,
    quarter_range: &[FiscalQuarter],
    rollup: bool,
) -> Result<MentionSeries, AnalyticsError> {
    if !tree.contains(topic_id) {
        return Err(AnalyticsError::TopicNotFound(topic_id));
    }
    if quarter_range.is_empty() {
        return Err(AnalyticsError::InvalidParameter(
            "quarter range must be non-empty".into(),
        ));
    }
    if quarter_range.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AnalyticsError::InvalidParameter(
            "quarter range must be strictly increasing".into(),
        ));
    }

    let matched: BTreeSet<TopicId> = if rollup {
        let mut ids = tree.descendants(topic_id);
        ids.push(topic_id);
        ids.into_iter().collect()
    } else {
        std::iter::once(topic_id).collect()
    };

    let mut counts: BTreeMap<FiscalQuarter, u64> =
        quarter_range.iter().map(|&q| (q, 0)).collect();
    for e in enrichments {
        if !matched.contains(&e.topic_id) {
            continue;
        }
        let (ticker, quarter) = doc_key(&e.doc_id)?;
        if ticker != company {
            continue;
        }
        if let Some(slot) = counts.get_mut(&quarter) {
            *slot += 1;
        }
    }
    Ok(MentionSeries {
        topic_id,
        company: company.to_string(),
        points: counts
            .into_iter()
            .map(|(quarter, count)| MentionPoint { quarter, count })
            .collect(),
    })
}

/// Collapses repeated mentions of a topic within one paragraph to a single
/// enrichment, for per-paragraph counting.
pub fn dedupe_paragraph_mentions(enrichments: &[Enrichment]) -> Vec<Enrichment> {
    let mut seen = BTreeSet::new();
    enrichments
        .iter()
        .filter(|e| seen.insert((e.para_id.clone(), e.topic_id)))
        .cloned()
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrendDirection {
    Up,
    Down,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendResult {
    pub topic_id: TopicId,
    pub company: String,
    pub tau: f64,
    pub p_value: f64,
    pub direction: TrendDirection,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TrendReport {
    pub up: Vec<TrendResult>,
    pub down: Vec<TrendResult>,
    /// Topics that could not be evaluated, with the reason.
    pub skipped: Vec<(TopicId, String)>,
}

pub struct TrendParams {
    pub alpha: f64,
    pub min_quarters: usize,
}

impl Default for TrendParams {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            min_quarters: 6,
        }
    }
}

fn classify(tau: f64, p_value: f64, alpha: f64) -> TrendDirection {
    if p_value <= alpha && tau > 0.0 {
        TrendDirection::Up
    } else if p_value <= alpha && tau < 0.0 {
        TrendDirection::Down
    } else {
        TrendDirection::None
    }
}

/// Classifies each candidate topic's mention trend for one company over its
/// covered quarter range. Product topics and topics with too few covered
/// quarters are skipped and reported. Output lists are sorted by |tau|
/// descending, ties by normalized topic name.
pub fn detect_trends(
    enrichments: &[Enrichment],
    tree: &Ontology,
    company: &str,
    topics: &[TopicId],
    products: &BTreeSet<TopicId>,
    params: &TrendParams,
) -> Result<TrendReport, AnalyticsError> {
    if !(params.alpha > 0.0 && params.alpha < 1.0) {
        return Err(AnalyticsError::InvalidParameter(format!(
            "alpha must be in (0, 1), got {}",
            params.alpha
        )));
    }

    let range = covered_quarters(enrichments, company)?;
    let mut report = TrendReport::default();
    let mut seen = BTreeSet::new();
    for &topic_id in topics {
        if !seen.insert(topic_id) {
            continue;
        }
        if products.contains(&topic_id) {
            report
                .skipped
                .push((topic_id, "product topic".to_string()));
            continue;
        }
        if range.len() < params.min_quarters {
            report.skipped.push((
                topic_id,
                format!(
                    "only {} covered quarters, need {}",
                    range.len(),
                    params.min_quarters
                ),
            ));
            continue;
        }
        let series = match mention_series(enrichments, tree, topic_id, company, &range, false) {
            Ok(series) => series,
            Err(AnalyticsError::TopicNotFound(id)) => {
                report.skipped.push((id, "not in ontology".to_string()));
                continue;
            }
            Err(other) => return Err(other),
        };
        let (tau, p_value) = match kendall_tau(&series.counts()) {
            Ok(pair) => pair,
            Err(AnalyticsError::InsufficientData(reason)) => {
                report.skipped.push((topic_id, reason));
                continue;
            }
            Err(other) => return Err(other),
        };
        let result = TrendResult {
            topic_id,
            company: company.to_string(),
            tau,
            p_value,
            direction: classify(tau, p_value, params.alpha),
        };
        match result.direction {
            TrendDirection::Up => report.up.push(result),
            TrendDirection::Down => report.down.push(result),
            TrendDirection::None => {}
        }
    }

    let sort_key = |r: &TrendResult| {
        let name = tree
            .node(r.topic_id)
            .map(|n| normalize_label(&n.name))
            .unwrap_or_else(|| r.topic_id.to_string());
        (std::cmp::Reverse(ordered_float(r.tau.abs())), name)
    };
    report.up.sort_by_key(sort_key);
    report.down.sort_by_key(sort_key);
    Ok(report)
}

/// Total order wrapper for finite f64 sort keys.
fn ordered_float(v: f64) -> u64 {
    debug_assert!(v.is_finite());
    let bits = v.to_bits();
    if bits >> 63 == 0 {
        bits | (1 << 63)
    } else {
        !bits
    }
}

// ---------------------------------------------------------------------------
// Topic overlap between companies
// ---------------------------------------------------------------------------

/// Non-product topics ranked by the company's total mention count, ties by
/// normalized topic name ascending, truncated to `n`.
pub fn top_topics(
    enrichments: &[Enrichment],
    tree: &Ontology,
    company: &str,
    n: usize,
    products: &BTreeSet<TopicId>,
) -> Result<Vec<TopicId>, AnalyticsError> {
    if n == 0 {
        return Err(AnalyticsError::InvalidParameter(
            "top_topics needs n >= 1".into(),
        ));
    }
    let mut counts: BTreeMap<TopicId, u64> = BTreeMap::new();
    for e in enrichments {
        let (ticker, _) = doc_key(&e.doc_id)?;
        if ticker != company || products.contains(&e.topic_id) {
            continue;
        }
        *counts.entry(e.topic_id).or_insert(0) += 1;
    }
    let mut ranked: Vec<(TopicId, u64)> = counts.into_iter().collect();
    ranked.sort_by_key(|&(id, count)| {
        let name = tree
            .node(id)
            .map(|node| normalize_label(&node.name))
            .unwrap_or_else(|| id.to_string());
        (std::cmp::Reverse(count), name)
    });
    Ok(ranked.into_iter().take(n).map(|(id, _)| id).collect())
}

/// |a ∩ b| / |a ∪ b|, with two empty sets defined as identical (1.0).
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    a.intersection(b).count() as f64 / a.union(b).count() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JaccardMatrix {
    pub companies: Vec<String>,
    /// Row-major square matrix aligned with `companies`.
    pub values: Vec<Vec<f64>>,
}

/// Pairwise Jaccard similarity of the companies' top-`n` topic sets. The
/// diagonal is forced to 1.0.
pub fn jaccard_matrix(
    enrichments: &[Enrichment],
    companies: &[String],
    n: usize,
    tree: &Ontology,
    products: &BTreeSet<TopicId>,
) -> Result<JaccardMatrix, AnalyticsError> {
    if companies.len() < 2 {
        return Err(AnalyticsError::InvalidParameter(
            "jaccard matrix needs at least 2 companies".into(),
        ));
    }
    let sets: Vec<BTreeSet<TopicId>> = companies
        .iter()
        .map(|company| {
            top_topics(enrichments, tree, company, n, products)
                .map(|ids| ids.into_iter().collect())
        })
        .collect::<Result<_, _>>()?;

    let k = companies.len();
    let mut values = vec![vec![0.0; k]; k];
    for i in 0..k {
        values[i][i] = 1.0;
        for j in (i + 1)..k {
            let v = jaccard(&sets[i], &sets[j]);
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    Ok(JaccardMatrix {
        companies: companies.to_vec(),
        values,
    })
}

/// Topic names shared by both companies' top-`n` sets, optionally restricted
/// to ontology leaves, sorted by name.
pub fn common_topics(
    enrichments: &[Enrichment],
    tree: &Ontology,
    company_a: &str,
    company_b: &str,
    n: usize,
    leaf_only: bool,
    products: &BTreeSet<TopicId>,
) -> Result<Vec<String>, AnalyticsError> {
    let set_a: BTreeSet<TopicId> = top_topics(enrichments, tree, company_a, n, products)?
        .into_iter()
        .collect();
    let set_b: BTreeSet<TopicId> = top_topics(enrichments, tree, company_b, n, products)?
        .into_iter()
        .collect();
    let mut names: Vec<String> = set_a
        .intersection(&set_b)
        .filter_map(|&id| match tree.node(id) {
            Some(node) if leaf_only && !node.is_leaf() => None,
            Some(node) => Some(node.name.clone()),
            None => None,
        })
        .collect();
    names.sort_by_key(|name| (normalize_label(name), name.clone()));
    Ok(names)
}

// ---------------------------------------------------------------------------
// Emerging topics and discovery timeline
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmergingTopic {
    pub topic_id: TopicId,
    /// Mentions strictly before the split date; zero by construction.
    pub early_count: u64,
    /// Mentions at or after the split date.
    pub late_count: u64,
}

/// Corpus-wide non-product topics never mentioned before `split` but with at
/// least `min_late_mentions` mentions from `split` onward, sorted by
/// late count descending (ties by normalized topic name).
pub fn emerging_topics(
    enrichments: &[Enrichment],
    tree: &Ontology,
    split: NaiveDate,
    min_late_mentions: u64,
    products: &BTreeSet<TopicId>,
) -> Result<Vec<EmergingTopic>, AnalyticsError> {
    if min_late_mentions == 0 {
        return Err(AnalyticsError::InvalidParameter(
            "min_late_mentions must be >= 1".into(),
        ));
    }
    let mut early: BTreeMap<TopicId, u64> = BTreeMap::new();
    let mut late: BTreeMap<TopicId, u64> = BTreeMap::new();
    for e in enrichments {
        if products.contains(&e.topic_id) {
            continue;
        }
        let bucket = if e.call_date < split { &mut early } else { &mut late };
        *bucket.entry(e.topic_id).or_insert(0) += 1;
    }
    let mut out: Vec<EmergingTopic> = late
        .into_iter()
        .filter(|(id, count)| *count >= min_late_mentions && !early.contains_key(id))
        .map(|(topic_id, late_count)| EmergingTopic {
            topic_id,
            early_count: 0,
            late_count,
        })
        .collect();
    out.sort_by_key(|t| {
        let name = tree
            .node(t.topic_id)
            .map(|node| normalize_label(&node.name))
            .unwrap_or_else(|| t.topic_id.to_string());
        (std::cmp::Reverse(t.late_count), name)
    });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelinePoint {
    pub date: NaiveDate,
    pub new_topics: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothedPoint {
    pub date: NaiveDate,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscoveryTimeline {
    pub points: Vec<TimelinePoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smoothed: Option<Vec<SmoothedPoint>>,
}

#[derive(Debug, Clone, Copy)]
pub struct LoessParams {
    pub span: f64,
    pub degree: u8,
}

impl Default for LoessParams {
    fn default() -> Self {
        Self {
            span: 0.5,
            degree: 1,
        }
    }
}

/// Counts newly created topics per creation date, ascending. Seed nodes are
/// excluded through their shared seeding timestamp. The optional LOESS
/// overlay is skipped (not an error) when the timeline is too short for the
/// requested window.
pub fn discovery_timeline(
    tree: &Ontology,
    smooth: Option<LoessParams>,
) -> Result<DiscoveryTimeline, AnalyticsError> {
    let mut by_date: BTreeMap<NaiveDate, u64> = BTreeMap::new();
    for node in tree.iter_nodes() {
        if tree.seeded_on() == Some(node.created_on) {
            continue;
        }
        *by_date.entry(node.created_on).or_insert(0) += 1;
    }
    let points: Vec<TimelinePoint> = by_date
        .into_iter()
        .map(|(date, new_topics)| TimelinePoint { date, new_topics })
        .collect();

    let smoothed = match smooth {
        Some(params) if points.len() >= 2 => {
            let origin = points[0].date;
            let xy: Vec<(f64, f64)> = points
                .iter()
                .map(|p| ((p.date - origin).num_days() as f64, p.new_topics as f64))
                .collect();
            match loess_smooth(&xy, params.span, params.degree) {
                Ok(fit) => Some(
                    points
                        .iter()
                        .zip(fit)
                        .map(|(p, (_, value))| SmoothedPoint {
                            date: p.date,
                            value,
                        })
                        .collect(),
                ),
                Err(AnalyticsError::InvalidParameter(reason))
                | Err(AnalyticsError::InsufficientData(reason)) => {
                    log::warn!("skipping timeline smoothing: {reason}");
                    None
                }
                Err(other) => return Err(other),
            }
        }
        Some(_) => {
            log::warn!("skipping timeline smoothing: fewer than 2 timeline points");
            None
        }
        None => None,
    };
    Ok(DiscoveryTimeline { points, smoothed })
}

// ---------------------------------------------------------------------------
// Ontology coherence
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceRow {
    pub parent_name: String,
    pub sampled_children: Vec<String>,
    pub avg_cos_true: f64,
    pub random_parent_name: String,
    pub avg_cos_random: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub rows: Vec<CoherenceRow>,
    pub overall_true_avg: f64,
    pub overall_random_avg: f64,
}

/// Samples `num_parents` nodes with at least two children and compares the
/// average parent-child name cosine against a uniformly drawn different
/// parent over the same children. Deterministic for a fixed `rng_seed`.
pub fn coherence_eval(
    tree: &Ontology,
    embedder: &dyn Provider,
    num_parents: usize,
    rng_seed: u64,
) -> Result<CoherenceReport, AnalyticsError> {
    use rand::Rng;
    use rand::SeedableRng;

    if num_parents == 0 {
        return Err(AnalyticsError::InvalidParameter(
            "num_parents must be >= 1".into(),
        ));
    }
    // Eligible parents in normalized-name order so sampling depends only on
    // tree content and seed.
    let mut eligible: Vec<&crate::ontology::TopicNode> = tree
        .iter_nodes()
        .filter(|node| node.child_ids.len() >= 2)
        .collect();
    eligible.sort_by_key(|node| normalize_label(&node.name));
    if eligible.len() < 2 {
        return Err(AnalyticsError::InsufficientData(format!(
            "coherence needs at least 2 parents with >= 2 children, found {}",
            eligible.len()
        )));
    }
    if eligible.len() < num_parents {
        return Err(AnalyticsError::InsufficientData(format!(
            "coherence asked for {num_parents} parents but only {} are eligible",
            eligible.len()
        )));
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(rng_seed);
    let mut sampled = rand::seq::index::sample(&mut rng, eligible.len(), num_parents).into_vec();
    sampled.sort_unstable();

    struct RowPlan<'a> {
        parent: &'a crate::ontology::TopicNode,
        random_parent: &'a crate::ontology::TopicNode,
        children: Vec<String>,
    }
    let mut plans = Vec::with_capacity(sampled.len());
    for &idx in &sampled {
        let parent = eligible[idx];
        let random_idx = loop {
            let j = rng.gen_range(0..eligible.len());
            if j != idx {
                break j;
            }
        };
        let children: Vec<String> = parent
            .child_ids
            .iter()
            .take(5)
            .filter_map(|&id| tree.node(id).map(|n| n.name.clone()))
            .collect();
        plans.push(RowPlan {
            parent,
            random_parent: eligible[random_idx],
            children,
        });
    }

    // One embedding call over the distinct labels involved.
    let mut labels: BTreeSet<String> = BTreeSet::new();
    for plan in &plans {
        labels.insert(plan.parent.name.clone());
        labels.insert(plan.random_parent.name.clone());
        labels.extend(plan.children.iter().cloned());
    }
    let ordered: Vec<String> = labels.into_iter().collect();
    let vectors = embedder.embed(&ordered)?;
    let lookup: BTreeMap<&str, &crate::providers::EmbeddingVector> = ordered
        .iter()
        .map(String::as_str)
        .zip(vectors.iter())
        .collect();

    let mut rows = Vec::with_capacity(plans.len());
    for plan in &plans {
        let parent_vec = lookup[plan.parent.name.as_str()];
        let random_vec = lookup[plan.random_parent.name.as_str()];
        let mut true_sum = 0.0;
        let mut random_sum = 0.0;
        for child in &plan.children {
            let child_vec = lookup[child.as_str()];
            true_sum += cosine_similarity(parent_vec, child_vec);
            random_sum += cosine_similarity(random_vec, child_vec);
        }
        let k = plan.children.len() as f64;
        rows.push(CoherenceRow {
            parent_name: plan.parent.name.clone(),
            sampled_children: plan.children.clone(),
            avg_cos_true: true_sum / k,
            random_parent_name: plan.random_parent.name.clone(),
            avg_cos_random: random_sum / k,
        });
    }

    let overall = |pick: fn(&CoherenceRow) -> f64| {
        rows.iter().map(pick).sum::<f64>() / rows.len() as f64
    };
    Ok(CoherenceReport {
        overall_true_avg: overall(|r| r.avg_cos_true),
        overall_random_avg: overall(|r| r.avg_cos_random),
        rows,
    })
}

// ---------------------------------------------------------------------------
// Product topic classification
// ---------------------------------------------------------------------------

/// Resolves the product-topic exclusion set: names from configuration plus,
/// when a provider is given, every topic the yes/no classifier marks as a
/// product. Provider failures fall back to the config-derived set with a
/// warning.
pub fn classify_product_topics(
    tree: &Ontology,
    config_names: &[String],
    provider: Option<&dyn Provider>,
) -> BTreeSet<TopicId> {
    let mut products = BTreeSet::new();
    for name in config_names {
        if normalize_label(name).is_empty() {
            continue;
        }
        let id = tree
            .find_by_name_or_alias(name)
            .map(|node| node.topic_id)
            .unwrap_or_else(|| TopicId::from_label(name));
        products.insert(id);
    }

    let Some(provider) = provider else {
        return products;
    };
    let mut classified = BTreeSet::new();
    for node in tree.iter_nodes() {
        let request = ChatRequest::new(
            prompts::PRODUCT_CLASSIFIER,
            prompts::render_product_user(&node.name),
        );
        match provider.chat(&request) {
            Ok(reply) => {
                if reply.text.trim().to_lowercase().starts_with("yes") {
                    classified.insert(node.topic_id);
                }
            }
            Err(err) => {
                log::warn!(
                    "product classifier failed on {:?} ({err}); falling back to config list only",
                    node.name
                );
                return products;
            }
        }
    }
    products.extend(classified);
    products
}
