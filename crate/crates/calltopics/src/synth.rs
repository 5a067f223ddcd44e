//! Deterministic synthetic bundle generator: a small earnings-call corpus
//! with planted signals, a mock-provider script that resolves them, seed
//! topics, a product list, and a ready-to-run config. Used by the demo
//! workflow and the end-to-end tests.
//!
//! Planted structure (default spec):
//! - TSLA mentions "Supply Chain" on a strictly decreasing 10-quarter
//!   schedule and "Generative AI" on an increasing one; "Cybertruck" also
//!   rises but is flagged as a product.
//! - JPM creates "Mergers & Acquisitions" early and later says "M&A", which
//!   the scripted matcher accepts at similarity 95, exercising the alias
//!   path; "Roboadvisor" and "Robotics" land under their scripted parents.
//! - "AI Copilots" is silent before 2023-01-01 and mentioned 7 times after,
//!   so it is the exactly-recovered emerging topic at threshold 5.
//! - NVDA and AMD share three of their five topics for overlap reports.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{AnalyticsSection, IoSection, ProviderSection, RunConfig};
use crate::corpus::{
    document_from_text, save_corpus_jsonl, CallMetadata, CorpusError, FiscalQuarter,
    TranscriptDocument,
};
use crate::ontologist::PipelineConfig;
use crate::ontology::SeedTopic;
use crate::providers::{KeywordRule, MockScript, ProviderError};

/// Seed topics shipped with the crate: twelve root themes, each with at
/// least two children.
pub const SEED_TOPICS_JSON: &str = include_str!("../assets/seed_topics.json");

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_TOTAL_PARAGRAPHS: usize = 200;
pub const EMERGENCE_SPLIT: &str = "2023-01-01";

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Script(#[from] ProviderError),
    #[error("invalid corpus spec: {0}")]
    Invalid(String),
}

/// One planted topic: its canonical name, the keyword that triggers the mock
/// retriever, and mentions per quarter (aligned with the company's quarters).
#[derive(Debug, Clone)]
pub struct TopicPlan {
    pub name: &'static str,
    pub keyword: &'static str,
    pub schedule: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct CompanyPlan {
    pub ticker: &'static str,
    pub sector: &'static str,
    pub first_quarter: FiscalQuarter,
    pub num_quarters: usize,
    pub topics: Vec<TopicPlan>,
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpusSpec {
    pub companies: Vec<CompanyPlan>,
    pub emergence_split: NaiveDate,
    pub rng_seed: u64,
    /// Filler paragraphs pad the corpus up to exactly this size.
    pub total_paragraphs: usize,
}

impl SyntheticCorpusSpec {
    pub fn with_seed(rng_seed: u64) -> Self {
        Self {
            rng_seed,
            ..Self::default()
        }
    }
}

fn fq(year: u16, quarter: u8) -> FiscalQuarter {
    FiscalQuarter::new(year, quarter).expect("static quarter literal")
}

impl Default for SyntheticCorpusSpec {
    fn default() -> Self {
        let ten = |schedule: [u64; 10]| schedule.to_vec();
        let four = |schedule: [u64; 4]| schedule.to_vec();
        Self {
            companies: vec![
                CompanyPlan {
                    ticker: "TSLA",
                    sector: "Automotive",
                    first_quarter: fq(2021, 1),
                    num_quarters: 10,
                    topics: vec![
                        TopicPlan {
                            name: "Supply Chain",
                            keyword: "supply chain",
                            schedule: ten([9, 8, 7, 6, 5, 4, 3, 2, 1, 0]),
                        },
                        TopicPlan {
                            name: "Generative AI",
                            keyword: "generative ai",
                            schedule: ten([0, 0, 1, 1, 2, 2, 3, 3, 4, 4]),
                        },
                        TopicPlan {
                            name: "Cybertruck",
                            keyword: "cybertruck",
                            schedule: ten([0, 0, 0, 1, 1, 2, 2, 3, 3, 4]),
                        },
                        TopicPlan {
                            name: "Robotics",
                            keyword: "robotics",
                            schedule: ten([1, 0, 0, 0, 0, 0, 0, 0, 0, 0]),
                        },
                    ],
                },
                CompanyPlan {
                    ticker: "NVDA",
                    sector: "Semiconductors",
                    first_quarter: fq(2022, 3),
                    num_quarters: 4,
                    topics: vec![
                        TopicPlan {
                            name: "Data Center",
                            keyword: "data center",
                            schedule: four([2, 2, 2, 2]),
                        },
                        TopicPlan {
                            name: "Gaming GPUs",
                            keyword: "gaming gpus",
                            schedule: four([1, 1, 1, 1]),
                        },
                        TopicPlan {
                            name: "Generative AI",
                            keyword: "generative ai",
                            schedule: four([1, 1, 1, 1]),
                        },
                        TopicPlan {
                            name: "Networking",
                            keyword: "networking",
                            schedule: four([1, 1, 1, 1]),
                        },
                    ],
                },
                CompanyPlan {
                    ticker: "AMD",
                    sector: "Semiconductors",
                    first_quarter: fq(2022, 3),
                    num_quarters: 4,
                    topics: vec![
                        TopicPlan {
                            name: "Data Center",
                            keyword: "data center",
                            schedule: four([1, 1, 1, 1]),
                        },
                        TopicPlan {
                            name: "Gaming GPUs",
                            keyword: "gaming gpus",
                            schedule: four([1, 1, 1, 1]),
                        },
                        TopicPlan {
                            name: "Generative AI",
                            keyword: "generative ai",
                            schedule: four([1, 1, 1, 1]),
                        },
                        TopicPlan {
                            name: "Embedded Processors",
                            keyword: "embedded processors",
                            schedule: four([1, 1, 1, 1]),
                        },
                    ],
                },
                CompanyPlan {
                    ticker: "JPM",
                    sector: "Banking",
                    first_quarter: fq(2021, 1),
                    num_quarters: 10,
                    topics: vec![
                        TopicPlan {
                            name: "Net Interest Income",
                            keyword: "net interest income",
                            schedule: ten([1; 10]),
                        },
                        TopicPlan {
                            name: "Credit Quality",
                            keyword: "credit quality",
                            schedule: ten([1; 10]),
                        },
                        TopicPlan {
                            name: "Mergers & Acquisitions",
                            keyword: "acquisitions",
                            schedule: ten([1, 0, 0, 0, 0, 0, 0, 0, 0, 0]),
                        },
                        TopicPlan {
                            name: "M&A",
                            keyword: "m&a",
                            schedule: ten([0, 0, 0, 0, 1, 0, 0, 0, 0, 0]),
                        },
                        TopicPlan {
                            name: "Roboadvisor",
                            keyword: "roboadvisor",
                            schedule: ten([0, 0, 0, 0, 0, 1, 0, 0, 0, 0]),
                        },
                        TopicPlan {
                            name: "AI Copilots",
                            keyword: "copilot",
                            schedule: ten([0, 0, 0, 0, 0, 0, 0, 0, 4, 3]),
                        },
                    ],
                },
            ],
            emergence_split: EMERGENCE_SPLIT.parse().expect("static date literal"),
            rng_seed: DEFAULT_SEED,
            total_paragraphs: DEFAULT_TOTAL_PARAGRAPHS,
        }
    }
}

/// Everything a run needs, before it is written to disk.
#[derive(Debug, Clone)]
pub struct SynthBundle {
    pub corpus: Vec<TranscriptDocument>,
    pub script: MockScript,
    pub seeds: Vec<SeedTopic>,
    pub products: Vec<String>,
    pub config: RunConfig,
}

/// Earnings calls happen about a month after the quarter closes.
pub fn call_date(quarter: FiscalQuarter) -> NaiveDate {
    let month = u32::from(quarter.quarter()) * 3 + 1;
    let (year, month) = if month > 12 {
        (i32::from(quarter.year()) + 1, month - 12)
    } else {
        (i32::from(quarter.year()), month)
    };
    NaiveDate::from_ymd_opt(year, month, 25).expect("day 25 exists in every month")
}

const OPENER: &str = "Operator: Good afternoon, and welcome to the quarterly earnings conference call. At this time all participants are in a listen-only mode.";

const CLOSERS: [&str; 3] = [
    "Operator: This concludes the question and answer session and today's conference call. You may now disconnect.",
    "Investor Relations: A replay of this call will be available on the investor relations website later today.",
    "CFO: Before we close, I remind everyone that today's remarks included forward-looking statements that involve risks and uncertainties.",
];

/// Three surface variants per topic. Every variant contains the topic's
/// trigger keyword exactly once and no other topic's keyword; the generator
/// test audits this.
fn topic_templates(topic: &str) -> &'static [&'static str] {
    match topic {
        "Supply Chain" => &[
            "CEO: The supply chain remains a focus area. We secured additional capacity with key vendors and reduced lead times meaningfully.",
            "CFO: Supply chain pressures affected gross margin this quarter. Expedited freight and component shortages added cost, though we see gradual relief ahead.",
            "Analyst question: Could you give more color on the supply chain outlook? Management noted that logistics constraints are easing but visibility remains limited.",
        ],
        "Generative AI" => &[
            "CEO: We are investing heavily in generative AI features across the product line. Early adoption metrics are encouraging.",
            "CTO: Generative AI workloads are reshaping our compute roadmap. We expect inference demand to grow for several quarters.",
            "Analyst question: How should we think about monetizing generative AI? Management pointed to subscription attach rates and enterprise pilots.",
        ],
        "Cybertruck" => &[
            "CEO: Cybertruck production ramped on schedule this quarter. We remain focused on cost per unit as volumes scale.",
            "CFO: Cybertruck deliveries contributed modestly to revenue. Margin impact should normalize as the ramp matures.",
            "Analyst question: What is the current Cybertruck order backlog? Management said reservations remain strong and conversion is tracking to plan.",
        ],
        "Robotics" => &[
            "CEO: Our robotics initiative moved from prototype to limited pilot production this quarter. We believe it can materially improve factory throughput over time.",
            "CTO: The robotics program hit its milestones and we are adding a second test line.",
            "Analyst question: When will robotics contribute to revenue? Management called it a long-term investment.",
        ],
        "Data Center" => &[
            "CEO: Data center revenue set another record this quarter. Demand for accelerated computing remains broad based.",
            "CFO: Data center gross margin expanded sequentially, and committed capacity supports the second half.",
            "Analyst question: Can you break down data center growth between training and inference? Management declined to quantify the split.",
        ],
        "Gaming GPUs" => &[
            "CEO: Gaming GPUs returned to sequential growth as channel inventory normalized.",
            "CFO: Sell-through of gaming GPUs was healthy in every region this quarter.",
            "Analyst question: How is the launch cadence for next generation gaming GPUs shaping up? Management said the roadmap is on track.",
        ],
        "Networking" => &[
            "CEO: Networking revenue grew as customers scaled out their clusters. Attach rates for our interconnect products continue to rise.",
            "CFO: Networking remains our fastest growing segment on a year over year basis.",
            "Analyst question: What is driving networking strength? Management cited bandwidth requirements of large training clusters.",
        ],
        "Embedded Processors" => &[
            "CEO: Embedded processors delivered steady results with design wins in industrial and automotive markets.",
            "CFO: The embedded processors franchise provides resilient cash flow through the cycle.",
            "Analyst question: Is demand for embedded processors stabilizing? Management expects a gradual recovery into next year.",
        ],
        "Net Interest Income" => &[
            "CFO: Net interest income rose on higher rates and disciplined deposit pricing.",
            "CEO: We delivered another quarter of record net interest income while maintaining a fortress balance sheet.",
            "Analyst question: How sensitive is net interest income to the forward curve? Management reiterated its published sensitivity disclosures.",
        ],
        "Credit Quality" => &[
            "CFO: Credit quality remained benign with net charge-offs below historical averages.",
            "CRO: We are watching credit quality closely in commercial real estate, though reserves are adequate.",
            "Analyst question: Any early warning signs on credit quality? Management pointed to normalization rather than deterioration.",
        ],
        "Mergers & Acquisitions" => &[
            "CEO: We completed two bolt-on acquisitions this quarter that strengthen our payments capabilities. Integration is proceeding smoothly.",
            "CFO: The acquisitions closed last month are already contributing to fee revenue.",
            "Analyst question: Are further acquisitions on the table? Management said it evaluates opportunities continuously.",
        ],
        "M&A" => &[
            "CFO: The M&A pipeline remains active and we will stay disciplined on price.",
            "CEO: We see attractive M&A opportunities in wealth management.",
            "Analyst question: How does the rate environment change your M&A appetite? Management said funding costs are manageable.",
        ],
        "Roboadvisor" => &[
            "CEO: Our new roboadvisor offering attracted strong early inflows from younger clients. We plan a broader rollout next year.",
            "CFO: The roboadvisor platform reached one hundred thousand funded accounts this quarter.",
            "Analyst question: What are the economics of the roboadvisor product? Management highlighted low marginal servicing costs.",
        ],
        "AI Copilots" => &[
            "CTO: We deployed AI copilots for our service teams this quarter. Average handle times fell double digits in the pilot.",
            "CEO: The copilot rollout is expanding to branch staff following strong internal feedback.",
            "Analyst question: What is the budget impact of the copilot program? Management said efficiency gains should fund the investment.",
        ],
        other => panic!("no templates for planted topic {other:?}"),
    }
}

/// Scripted insertion decisions: query topic -> (parent label, reasoning).
/// Parents are either leaves (settle immediately) or roots (settle by
/// repeated choice on the second round).
fn planted_parents() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        (
            "Supply Chain",
            "Logistics",
            "Supply chain management is the broader discipline around logistics, so Logistics is the most granular suitable parent.",
        ),
        (
            "Generative AI",
            "Artificial Intelligence",
            "Generative AI is a subfield of artificial intelligence and none of the existing children is more specific.",
        ),
        (
            "Cybertruck",
            "Manufacturing",
            "Cybertruck is a manufactured vehicle program, so Manufacturing is the closest parent.",
        ),
        (
            "Robotics",
            "Technology and Innovation",
            "Robotics pertains to the creation and use of advanced machines, aligning with technological advancements and innovative approaches.",
        ),
        (
            "Data Center",
            "AI Infrastructure",
            "Data centers are the physical substrate of AI infrastructure, the most granular matching parent.",
        ),
        (
            "Gaming GPUs",
            "Technology and Innovation",
            "Gaming GPUs are a technology product line; no child topic is more specific.",
        ),
        (
            "Networking",
            "Technology and Innovation",
            "Networking equipment falls under broad technology; the children listed are unrelated.",
        ),
        (
            "Embedded Processors",
            "Technology and Innovation",
            "Embedded processors are a semiconductor technology; none of the children applies.",
        ),
        (
            "Net Interest Income",
            "Financial Performance",
            "Net interest income is a core financial performance measure for a bank.",
        ),
        (
            "Credit Quality",
            "Risk and Regulation",
            "Credit quality describes loan book risk, which belongs under risk topics.",
        ),
        (
            "Mergers & Acquisitions",
            "Corporate Strategy",
            "Acquisitions are a corporate strategy lever; no existing child covers them.",
        ),
        (
            "Roboadvisor",
            "Fintech",
            "Roboadvisor can be assigned to super-parent Financial Technology, and within that Fintech is the most granular parent topic.",
        ),
        (
            "AI Copilots",
            "Artificial Intelligence",
            "AI copilots are applied artificial intelligence assistants.",
        ),
    ]
}

fn structured_parent_reply(parent: &str, reasoning: &str) -> String {
    let body = serde_json::json!({ "reasoning": reasoning, "parent": parent });
    format!(
        "<structured_output>\n{}\n</structured_output>",
        serde_json::to_string_pretty(&body).expect("static reply serializes")
    )
}

fn structured_match_reply(query: &str, topic: &str, similarity: u8, reasoning: &str) -> String {
    let body = serde_json::json!({
        "query_topic": query,
        "matches": [ { "topic": topic, "similarity": similarity } ],
        "detailed_analysis": {
            "matched_topics": [
                {
                    "topic": topic,
                    "similarity": similarity,
                    "reasoning": reasoning,
                    "parent_subset_check":
                        "Both labels cover the same scope; neither is broader",
                }
            ]
        },
    });
    format!(
        "<structured_output>\n{}\n</structured_output>",
        serde_json::to_string_pretty(&body).expect("static reply serializes")
    )
}

fn no_match_reply() -> String {
    let body = serde_json::json!({
        "matches": [],
        "detailed_analysis": { "matched_topics": [] },
    });
    format!(
        "<structured_output>\n{}\n</structured_output>",
        serde_json::to_string_pretty(&body).expect("static reply serializes")
    )
}

/// The mock script resolving every planted topic: keyword retrieval rules,
/// an accepting match for the M&A alias, scripted parents, and the product
/// flag for Cybertruck.
fn planted_script(spec: &SyntheticCorpusSpec) -> MockScript {
    let mut script = MockScript::default();

    let mut seen = std::collections::BTreeSet::new();
    for company in &spec.companies {
        for topic in &company.topics {
            if seen.insert(topic.name) {
                script.keyword_topics.push(KeywordRule {
                    keyword: topic.keyword.to_string(),
                    topic_name: topic.name.to_string(),
                    excerpt: None,
                });
            }
        }
    }

    script.matcher.insert(
        "M&A".to_string(),
        structured_match_reply(
            "M&A",
            "Mergers & Acquisitions",
            95,
            "M&A is the standard abbreviation for mergers and acquisitions; the topics are semantically equivalent.",
        ),
    );
    script.matcher_default = Some(no_match_reply());

    for (topic, parent, reasoning) in planted_parents() {
        script
            .parent
            .insert(topic.to_string(), structured_parent_reply(parent, reasoning));
    }
    script.parent_default = Some(structured_parent_reply(
        "none",
        "No listed parent is a suitable category for this topic.",
    ));

    script.product_yes.push("Cybertruck".to_string());
    script
}

/// Builds the full bundle in memory. Deterministic for a fixed spec.
pub fn generate(spec: &SyntheticCorpusSpec) -> Result<SynthBundle, SynthError> {
    if spec.companies.is_empty() {
        return Err(SynthError::Invalid("no companies in spec".into()));
    }
    for company in &spec.companies {
        for topic in &company.topics {
            if topic.schedule.len() != company.num_quarters {
                return Err(SynthError::Invalid(format!(
                    "schedule length for {} / {:?} is {}, expected {}",
                    company.ticker,
                    topic.name,
                    topic.schedule.len(),
                    company.num_quarters
                )));
            }
        }
    }

    // Paragraph budget: one opener per document plus the planted mentions.
    let mut doc_count = 0usize;
    let mut planted = 0usize;
    for company in &spec.companies {
        doc_count += company.num_quarters;
        planted += company
            .topics
            .iter()
            .map(|t| t.schedule.iter().sum::<u64>() as usize)
            .sum::<usize>();
    }
    let base = doc_count + planted;
    if base > spec.total_paragraphs {
        return Err(SynthError::Invalid(format!(
            "planted schedule needs {base} paragraphs, budget is {}",
            spec.total_paragraphs
        )));
    }
    let mut padding = spec.total_paragraphs - base;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let mut corpus = Vec::with_capacity(doc_count);
    for company in &spec.companies {
        let mut quarter = company.first_quarter;
        for quarter_index in 0..company.num_quarters {
            let mut body_paragraphs: Vec<String> = Vec::new();
            for topic in &company.topics {
                let mentions = topic.schedule[quarter_index];
                let templates = topic_templates(topic.name);
                for _ in 0..mentions {
                    let text = templates[rng.gen_range(0..templates.len())];
                    body_paragraphs.push(text.to_string());
                }
            }
            body_paragraphs.shuffle(&mut rng);

            let mut paragraphs = vec![OPENER.to_string()];
            paragraphs.extend(body_paragraphs);
            if padding > 0 {
                paragraphs.push(CLOSERS[rng.gen_range(0..CLOSERS.len())].to_string());
                padding -= 1;
            }

            let meta = CallMetadata {
                ticker: company.ticker.to_string(),
                sector: company.sector.to_string(),
                call_date: call_date(quarter),
                fiscal_quarter: quarter,
            };
            corpus.push(document_from_text(&paragraphs.join("\n\n"), &meta)?);
            quarter = quarter.next();
        }
    }
    if padding > 0 {
        // More padding than documents: append extra closers round-robin.
        let num_docs = corpus.len();
        let mut doc_index = 0usize;
        while padding > 0 {
            let closer = CLOSERS[rng.gen_range(0..CLOSERS.len())];
            let doc = &mut corpus[doc_index % num_docs];
            let para_id = format!("{}-p{:04}", doc.doc_id, doc.paragraphs.len());
            doc.paragraphs.push(crate::corpus::Paragraph {
                para_id,
                doc_index: doc.paragraphs.len(),
                text: closer.to_string(),
                word_count: crate::corpus::count_words(closer),
            });
            doc_index += 1;
            padding -= 1;
        }
    }

    let script = planted_script(spec);
    script.validate()?;

    let seeds: Vec<SeedTopic> =
        serde_json::from_str(SEED_TOPICS_JSON).expect("shipped seed asset parses");

    let config = RunConfig {
        provider: ProviderSection {
            mock_script: Some(PathBuf::from("mock_script.json")),
            http: None,
        },
        pipeline: PipelineConfig {
            // Candidate shortlists must cover the whole tree here: planted
            // synonyms share no tokens, so bag-of-tokens cosine cannot rank
            // them into a small k.
            candidate_k: 500,
            ..PipelineConfig::default()
        },
        analytics: AnalyticsSection {
            product_topics: Some(PathBuf::from("products.json")),
            ..AnalyticsSection::default()
        },
        io: IoSection {
            corpus: PathBuf::from("corpus.jsonl"),
            ontology: PathBuf::from("ontology.json"),
            enrichments: PathBuf::from("enrichments.jsonl"),
            seed_topics: Some(PathBuf::from("seed_topics.json")),
        },
    };

    Ok(SynthBundle {
        corpus,
        script,
        seeds,
        products: vec!["Cybertruck".to_string()],
        config,
    })
}

/// Writes the bundle into `out_dir` (created if missing) and returns the
/// config path. All paths inside the config are relative, so the directory
/// is relocatable.
pub fn write_bundle(bundle: &SynthBundle, out_dir: &Path) -> Result<PathBuf, SynthError> {
    std::fs::create_dir_all(out_dir).map_err(|source| SynthError::Io {
        path: out_dir.display().to_string(),
        source,
    })?;
    let write = |name: &str, contents: String| -> Result<(), SynthError> {
        let path = out_dir.join(name);
        std::fs::write(&path, contents).map_err(|source| SynthError::Io {
            path: path.display().to_string(),
            source,
        })
    };

    save_corpus_jsonl(&bundle.corpus, &out_dir.join("corpus.jsonl"))?;
    write(
        "mock_script.json",
        serde_json::to_string_pretty(&bundle.script).expect("script serializes") + "\n",
    )?;
    write(
        "seed_topics.json",
        serde_json::to_string_pretty(&bundle.seeds).expect("seeds serialize") + "\n",
    )?;
    write(
        "products.json",
        serde_json::to_string_pretty(&bundle.products).expect("products serialize") + "\n",
    )?;
    let config_path = out_dir.join("config.json");
    bundle
        .config
        .save(&config_path)
        .map_err(|e| SynthError::Invalid(e.to_string()))?;
    Ok(config_path)
}
