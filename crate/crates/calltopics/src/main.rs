//! Command line front end for the earnings-call topic pipeline.
//!
//! Every command prints one report to stdout and writes the same report into
//! `--out-dir` as `<command>.json` (or `.csv` with `--format csv`). Errors go
//! to stderr as a single JSON object `{"error":{"kind":...,"message":...}}`;
//! the process exits 0 on success, 2 on usage errors, 1 on runtime errors.

use std::collections::BTreeSet;
use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use calltopics::analytics::{
    classify_product_topics, coherence_eval, common_topics, company_topics, detect_trends,
    discovery_timeline, emerging_topics, jaccard_matrix, mentioned_companies, LoessParams,
    TrendDirection, TrendParams, TrendResult,
};
use calltopics::config::{load_product_list, RunConfig};
use calltopics::corpus::{
    check_unique_doc_ids, corpus_stats, ingest_text_dir, load_corpus_jsonl, save_corpus_jsonl,
};
use calltopics::ontologist::{enrich_corpus, load_enrichments_jsonl, save_enrichments_jsonl};
use calltopics::ontology::{load_seed_spec, Ontology, TopicId};
use calltopics::providers::{HttpProvider, MockProvider, MockScript, Provider};
use calltopics::synth::{self, SyntheticCorpusSpec};

#[derive(Parser)]
#[command(
    name = "calltopics",
    version,
    about = "Extract topics from earnings-call transcripts and analyze them"
)]
struct Cli {
    /// Run configuration file (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Backend answering extraction, matching, and embedding calls.
    #[arg(long, global = true, value_enum, default_value_t = ProviderKind::Mock)]
    provider: ProviderKind,

    /// RNG seed for synthesis and coherence sampling.
    #[arg(long, global = true, default_value_t = synth::DEFAULT_SEED)]
    seed: u64,

    /// Directory that receives report files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    /// Report file format (stdout mirrors the file).
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProviderKind {
    Mock,
    Http,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest a directory of transcript text files into the corpus file.
    Ingest {
        /// Directory of .txt transcripts.
        #[arg(long)]
        input: PathBuf,
        /// JSON sidecar mapping each filename to its call metadata.
        #[arg(long)]
        metadata: PathBuf,
    },
    /// Extract topics from the corpus and grow the ontology.
    Build,
    /// Summary statistics for a corpus or an ontology file.
    #[command(group(ArgGroup::new("target").required(true).args(["corpus", "ontology"])))]
    Stats {
        /// Corpus JSONL to summarize.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Ontology JSON to summarize.
        #[arg(long)]
        ontology: Option<PathBuf>,
    },
    /// Classify quarterly mention trends for one company.
    Trends {
        /// Company ticker as it appears in document ids.
        #[arg(long)]
        company: String,
        /// Override the significance level from the config.
        #[arg(long)]
        alpha: Option<f64>,
        /// Also ask the provider to flag product topics.
        #[arg(long)]
        classify_products: bool,
    },
    /// Topic-overlap matrix and shared topics between companies.
    Compare {
        /// Comma-separated tickers (default: every company in the log).
        #[arg(long, value_delimiter = ',')]
        companies: Option<Vec<String>>,
        /// Override the top-topic set size from the config.
        #[arg(long)]
        top_n: Option<usize>,
        /// Restrict the shared-topic listing to leaf topics.
        #[arg(long)]
        leaf_only: bool,
    },
    /// Topics absent before the split date and prominent after it.
    Emerging {
        /// Boundary date; mentions on or after it count as late.
        #[arg(long)]
        split: NaiveDate,
        /// Override the prominence threshold from the config.
        #[arg(long)]
        min_late_mentions: Option<u64>,
    },
    /// Embedding-based parent/child coherence check of the ontology.
    Coherence {
        /// Override the number of sampled parents from the config.
        #[arg(long)]
        num_parents: Option<usize>,
    },
    /// Topic discovery timeline with optional smoothing.
    Timeline {
        /// Skip the smoothed overlay.
        #[arg(long)]
        no_smooth: bool,
    },
    /// Write a self-contained synthetic dataset and config into --out-dir.
    Synth,
}

enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn report(&self) -> ExitCode {
        let (kind, message, code) = match self {
            CliError::Usage(m) => ("usage", m, 2u8),
            CliError::Runtime(m) => ("runtime", m, 1u8),
        };
        let payload = json!({ "error": { "kind": kind, "message": message } });
        eprintln!("{payload}");
        ExitCode::from(code)
    }
}

fn usage(err: impl Display) -> CliError {
    CliError::Usage(err.to_string())
}

fn runtime(err: impl Display) -> CliError {
    CliError::Runtime(err.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            return CliError::Usage(err.render().to_string()).report();
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => err.report(),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Ingest { input, metadata } => cmd_ingest(&cli, input, metadata),
        Command::Build => cmd_build(&cli),
        Command::Stats { corpus, ontology } => cmd_stats(&cli, corpus.as_ref(), ontology.as_ref()),
        Command::Trends {
            company,
            alpha,
            classify_products,
        } => cmd_trends(&cli, company, *alpha, *classify_products),
        Command::Compare {
            companies,
            top_n,
            leaf_only,
        } => cmd_compare(&cli, companies.clone(), *top_n, *leaf_only),
        Command::Emerging {
            split,
            min_late_mentions,
        } => cmd_emerging(&cli, *split, *min_late_mentions),
        Command::Coherence { num_parents } => cmd_coherence(&cli, *num_parents),
        Command::Timeline { no_smooth } => cmd_timeline(&cli, *no_smooth),
        Command::Synth => cmd_synth(&cli),
    }
}

fn require_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("this command needs --config <file>".into()))?;
    RunConfig::load(path).map_err(usage)
}

fn make_provider(cli: &Cli, config: &RunConfig) -> Result<Box<dyn Provider>, CliError> {
    match cli.provider {
        ProviderKind::Mock => {
            let script = match &config.provider.mock_script {
                Some(path) => MockScript::load(path).map_err(runtime)?,
                None => MockScript::default(),
            };
            Ok(Box::new(MockProvider::new(script).map_err(runtime)?))
        }
        ProviderKind::Http => {
            let http = config.provider.http.clone().ok_or_else(|| {
                CliError::Usage("--provider http needs a provider.http config section".into())
            })?;
            Ok(Box::new(HttpProvider::new(http).map_err(runtime)?))
        }
    }
}

/// Product topics named in the config, optionally extended by asking the
/// provider to classify every ontology topic.
fn product_set(
    config: &RunConfig,
    tree: &Ontology,
    provider: Option<&dyn Provider>,
) -> Result<BTreeSet<TopicId>, CliError> {
    let names = match &config.analytics.product_topics {
        Some(path) => load_product_list(path).map_err(usage)?,
        None => Vec::new(),
    };
    Ok(classify_product_topics(tree, &names, provider))
}

fn topic_name(tree: &Ontology, id: TopicId) -> String {
    tree.node(id)
        .map_or_else(|| id.to_string(), |node| node.name.clone())
}

fn direction_str(direction: TrendDirection) -> &'static str {
    match direction {
        TrendDirection::Up => "up",
        TrendDirection::Down => "down",
        TrendDirection::None => "none",
    }
}

/// One report: a JSON document plus its flat tabular rendering for CSV.
struct Report {
    value: Value,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn emit(cli: &Cli, stem: &str, report: &Report) -> Result<(), CliError> {
    std::fs::create_dir_all(&cli.out_dir)
        .map_err(|e| runtime(format!("cannot create {}: {e}", cli.out_dir.display())))?;
    let (text, path) = match cli.format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&report.value).map_err(runtime)?;
            text.push('\n');
            (text, cli.out_dir.join(format!("{stem}.json")))
        }
        Format::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            writer.write_record(&report.header).map_err(runtime)?;
            for row in &report.rows {
                writer.write_record(row).map_err(runtime)?;
            }
            let bytes = writer.into_inner().map_err(runtime)?;
            let text = String::from_utf8(bytes).map_err(runtime)?;
            (text, cli.out_dir.join(format!("{stem}.csv")))
        }
    };
    std::fs::write(&path, &text)
        .map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))?;
    print!("{text}");
    Ok(())
}

fn float(v: f64) -> String {
    format!("{v}")
}

fn cmd_ingest(cli: &Cli, input: &PathBuf, metadata: &PathBuf) -> Result<(), CliError> {
    let config = require_config(cli)?;
    let docs = ingest_text_dir(input, metadata).map_err(runtime)?;
    check_unique_doc_ids(&docs).map_err(runtime)?;
    save_corpus_jsonl(&docs, &config.io.corpus).map_err(runtime)?;
    let paragraphs: usize = docs.iter().map(|d| d.paragraphs.len()).sum();
    let report = Report {
        value: json!({
            "documents": docs.len(),
            "paragraphs": paragraphs,
            "corpus": config.io.corpus,
        }),
        header: header(&["key", "value"]),
        rows: vec![
            vec!["documents".into(), docs.len().to_string()],
            vec!["paragraphs".into(), paragraphs.to_string()],
            vec!["corpus".into(), config.io.corpus.display().to_string()],
        ],
    };
    emit(cli, "ingest", &report)
}

fn cmd_build(cli: &Cli) -> Result<(), CliError> {
    let config = require_config(cli)?;
    let corpus = load_corpus_jsonl(&config.io.corpus).map_err(runtime)?;
    if corpus.is_empty() {
        return Err(CliError::Runtime(format!(
            "corpus {} is empty",
            config.io.corpus.display()
        )));
    }
    let provider = make_provider(cli, &config)?;
    let mut tree = Ontology::new(config.pipeline.max_depth).map_err(runtime)?;
    if let Some(seed_path) = &config.io.seed_topics {
        let seeds = load_seed_spec(seed_path).map_err(runtime)?;
        // Seeds predate the first call so the discovery timeline only counts
        // topics the pipeline itself created.
        let first_call = corpus.iter().map(|d| d.call_date).min().expect("non-empty");
        let seeded_on = first_call.pred_opt().unwrap_or(first_call);
        tree.seed(&seeds, seeded_on).map_err(runtime)?;
    }
    let (enrichments, run_report) =
        enrich_corpus(&corpus, &mut tree, provider.as_ref(), &config.pipeline).map_err(runtime)?;
    tree.save(&config.io.ontology).map_err(runtime)?;
    save_enrichments_jsonl(&enrichments, &config.io.enrichments).map_err(runtime)?;

    let report = Report {
        value: serde_json::to_value(&run_report).map_err(runtime)?,
        header: header(&["key", "value"]),
        rows: vec![
            vec![
                "paragraphs_processed".into(),
                run_report.paragraphs_processed.to_string(),
            ],
            vec![
                "paragraphs_enriched".into(),
                run_report.paragraphs_enriched.to_string(),
            ],
            vec![
                "paragraphs_empty".into(),
                run_report.paragraphs_empty.to_string(),
            ],
            vec![
                "paragraphs_skipped".into(),
                run_report.paragraphs_skipped.to_string(),
            ],
            vec!["topics_created".into(), run_report.topics_created.to_string()],
            vec!["aliases_added".into(), run_report.aliases_added.to_string()],
        ],
    };
    emit(cli, "run_report", &report)
}

fn cmd_stats(
    cli: &Cli,
    corpus: Option<&PathBuf>,
    ontology: Option<&PathBuf>,
) -> Result<(), CliError> {
    if let Some(path) = corpus {
        let docs = load_corpus_jsonl(path).map_err(runtime)?;
        let stats = corpus_stats(&docs);
        let report = Report {
            value: serde_json::to_value(&stats).map_err(runtime)?,
            header: header(&["key", "value"]),
            rows: vec![
                vec!["total_transcripts".into(), stats.total_transcripts.to_string()],
                vec!["total_paragraphs".into(), stats.total_paragraphs.to_string()],
                vec!["total_quarters".into(), stats.total_quarters.to_string()],
                vec!["vocabulary_size".into(), stats.vocabulary_size.to_string()],
                vec![
                    "avg_paragraph_len_words_mean".into(),
                    float(stats.avg_paragraph_len_words.mean),
                ],
                vec![
                    "avg_paragraph_len_words_stddev".into(),
                    float(stats.avg_paragraph_len_words.stddev),
                ],
                vec![
                    "avg_document_len_words".into(),
                    float(stats.avg_document_len_words),
                ],
                vec![
                    "avg_document_len_paragraphs".into(),
                    float(stats.avg_document_len_paragraphs),
                ],
                vec![
                    "avg_sentence_len_words".into(),
                    float(stats.avg_sentence_len_words),
                ],
            ],
        };
        return emit(cli, "corpus_stats", &report);
    }
    let path = ontology.expect("clap enforces exactly one of --corpus/--ontology");
    let tree = Ontology::load(path).map_err(runtime)?;
    let stats = tree.stats();
    let mut rows = vec![
        vec!["total_nodes".into(), stats.total_nodes.to_string()],
        vec!["num_levels".into(), stats.num_levels.to_string()],
        vec!["num_leaf_nodes".into(), stats.num_leaf_nodes.to_string()],
        vec![
            "avg_children_per_node_mean".into(),
            float(stats.avg_children_per_node.mean),
        ],
        vec![
            "avg_children_per_node_stddev".into(),
            float(stats.avg_children_per_node.stddev),
        ],
        vec![
            "avg_aliases_per_node_mean".into(),
            float(stats.avg_aliases_per_node.mean),
        ],
        vec![
            "avg_aliases_per_node_stddev".into(),
            float(stats.avg_aliases_per_node.stddev),
        ],
    ];
    for (level, count) in stats.nodes_per_level.iter().enumerate() {
        rows.push(vec![format!("nodes_at_level_{level}"), count.to_string()]);
    }
    let report = Report {
        value: serde_json::to_value(&stats).map_err(runtime)?,
        header: header(&["key", "value"]),
        rows,
    };
    emit(cli, "ontology_stats", &report)
}

fn trend_row_json(tree: &Ontology, r: &TrendResult) -> Result<Value, CliError> {
    Ok(json!({
        "topic_id": r.topic_id,
        "topic_name": topic_name(tree, r.topic_id),
        "tau": r.tau,
        "p_value": r.p_value,
        "direction": serde_json::to_value(r.direction).map_err(runtime)?,
    }))
}

fn cmd_trends(
    cli: &Cli,
    company: &str,
    alpha: Option<f64>,
    classify_products: bool,
) -> Result<(), CliError> {
    if let Some(a) = alpha {
        if !(a > 0.0 && a < 1.0) {
            return Err(CliError::Usage(format!(
                "--alpha must be in (0, 1), got {a}"
            )));
        }
    }
    let config = require_config(cli)?;
    let tree = Ontology::load(&config.io.ontology).map_err(runtime)?;
    let enrichments = load_enrichments_jsonl(&config.io.enrichments).map_err(runtime)?;
    let classifier = if classify_products {
        Some(make_provider(cli, &config)?)
    } else {
        None
    };
    let products = product_set(&config, &tree, classifier.as_deref())?;
    let topics = company_topics(&enrichments, company).map_err(runtime)?;
    let params = TrendParams {
        alpha: alpha.unwrap_or(config.analytics.alpha),
        min_quarters: config.analytics.min_quarters,
    };
    let trend_report =
        detect_trends(&enrichments, &tree, company, &topics, &products, &params).map_err(runtime)?;

    let mut rows = Vec::new();
    for r in trend_report.up.iter().chain(&trend_report.down) {
        rows.push(vec![
            company.to_string(),
            r.topic_id.to_string(),
            topic_name(&tree, r.topic_id),
            float(r.tau),
            float(r.p_value),
            direction_str(r.direction).to_string(),
        ]);
    }
    let up: Vec<Value> = trend_report
        .up
        .iter()
        .map(|r| trend_row_json(&tree, r))
        .collect::<Result<_, _>>()?;
    let down: Vec<Value> = trend_report
        .down
        .iter()
        .map(|r| trend_row_json(&tree, r))
        .collect::<Result<_, _>>()?;
    let skipped: Vec<Value> = trend_report
        .skipped
        .iter()
        .map(|(id, reason)| {
            json!({
                "topic_id": id,
                "topic_name": topic_name(&tree, *id),
                "reason": reason,
            })
        })
        .collect();
    let report = Report {
        value: json!({
            "company": company,
            "alpha": params.alpha,
            "min_quarters": params.min_quarters,
            "up": up,
            "down": down,
            "skipped": skipped,
        }),
        header: header(&["company", "topic_id", "topic_name", "tau", "p_value", "direction"]),
        rows,
    };
    emit(cli, "trends", &report)
}

fn cmd_compare(
    cli: &Cli,
    companies: Option<Vec<String>>,
    top_n: Option<usize>,
    leaf_only: bool,
) -> Result<(), CliError> {
    if top_n == Some(0) {
        return Err(CliError::Usage("--top-n must be >= 1".into()));
    }
    let config = require_config(cli)?;
    let tree = Ontology::load(&config.io.ontology).map_err(runtime)?;
    let enrichments = load_enrichments_jsonl(&config.io.enrichments).map_err(runtime)?;
    let companies = match companies {
        Some(list) => list,
        None => mentioned_companies(&enrichments)
            .map_err(runtime)?
            .into_iter()
            .collect(),
    };
    if companies.len() < 2 {
        return Err(CliError::Usage(
            "compare needs at least two companies (pass --companies A,B)".into(),
        ));
    }
    let n = top_n.unwrap_or(config.analytics.top_n);
    let products = product_set(&config, &tree, None)?;
    let matrix =
        jaccard_matrix(&enrichments, &companies, n, &tree, &products).map_err(runtime)?;
    let mut common = Vec::new();
    for (i, a) in companies.iter().enumerate() {
        for b in &companies[i + 1..] {
            let topics =
                common_topics(&enrichments, &tree, a, b, n, leaf_only, &products).map_err(runtime)?;
            common.push(json!({
                "company_a": a,
                "company_b": b,
                "topics": topics,
            }));
        }
    }
    let mut header: Vec<String> = vec!["company".to_string()];
    header.extend(matrix.companies.iter().cloned());
    let rows = matrix
        .companies
        .iter()
        .zip(&matrix.values)
        .map(|(c, row)| {
            let mut cells = vec![c.clone()];
            cells.extend(row.iter().map(|v| float(*v)));
            cells
        })
        .collect();
    let report = Report {
        value: json!({
            "top_n": n,
            "leaf_only": leaf_only,
            "matrix": serde_json::to_value(&matrix).map_err(runtime)?,
            "common": common,
        }),
        header,
        rows,
    };
    emit(cli, "compare", &report)
}

fn cmd_emerging(
    cli: &Cli,
    split: NaiveDate,
    min_late_mentions: Option<u64>,
) -> Result<(), CliError> {
    if min_late_mentions == Some(0) {
        return Err(CliError::Usage("--min-late-mentions must be >= 1".into()));
    }
    let config = require_config(cli)?;
    let tree = Ontology::load(&config.io.ontology).map_err(runtime)?;
    let enrichments = load_enrichments_jsonl(&config.io.enrichments).map_err(runtime)?;
    let products = product_set(&config, &tree, None)?;
    let threshold = min_late_mentions.unwrap_or(config.analytics.min_late_mentions);
    let topics =
        emerging_topics(&enrichments, &tree, split, threshold, &products).map_err(runtime)?;
    let rows = topics
        .iter()
        .map(|t| {
            vec![
                t.topic_id.to_string(),
                topic_name(&tree, t.topic_id),
                t.early_count.to_string(),
                t.late_count.to_string(),
            ]
        })
        .collect();
    let listed: Vec<Value> = topics
        .iter()
        .map(|t| {
            json!({
                "topic_id": t.topic_id,
                "topic_name": topic_name(&tree, t.topic_id),
                "early_count": t.early_count,
                "late_count": t.late_count,
            })
        })
        .collect();
    let report = Report {
        value: json!({
            "split": split,
            "min_late_mentions": threshold,
            "topics": listed,
        }),
        header: header(&["topic_id", "topic_name", "early_count", "late_count"]),
        rows,
    };
    emit(cli, "emerging", &report)
}

fn cmd_coherence(cli: &Cli, num_parents: Option<usize>) -> Result<(), CliError> {
    if num_parents == Some(0) {
        return Err(CliError::Usage("--num-parents must be >= 1".into()));
    }
    let config = require_config(cli)?;
    let tree = Ontology::load(&config.io.ontology).map_err(runtime)?;
    let provider = make_provider(cli, &config)?;
    let n = num_parents.unwrap_or(config.analytics.coherence_parents);
    let coherence = coherence_eval(&tree, provider.as_ref(), n, cli.seed).map_err(runtime)?;
    let rows = coherence
        .rows
        .iter()
        .map(|r| {
            vec![
                r.parent_name.clone(),
                float(r.avg_cos_true),
                r.random_parent_name.clone(),
                float(r.avg_cos_random),
                r.sampled_children.join("|"),
            ]
        })
        .collect();
    let report = Report {
        value: json!({
            "num_parents": n,
            "rng_seed": cli.seed,
            "rows": serde_json::to_value(&coherence.rows).map_err(runtime)?,
            "overall_true_avg": coherence.overall_true_avg,
            "overall_random_avg": coherence.overall_random_avg,
        }),
        header: header(&[
            "parent_name",
            "avg_cos_true",
            "random_parent_name",
            "avg_cos_random",
            "sampled_children",
        ]),
        rows,
    };
    emit(cli, "coherence", &report)
}

fn cmd_timeline(cli: &Cli, no_smooth: bool) -> Result<(), CliError> {
    let config = require_config(cli)?;
    let tree = Ontology::load(&config.io.ontology).map_err(runtime)?;
    let smooth = if no_smooth {
        None
    } else {
        Some(LoessParams {
            span: config.analytics.span,
            degree: config.analytics.degree,
        })
    };
    let timeline = discovery_timeline(&tree, smooth).map_err(runtime)?;
    let smoothed_by_index: Vec<Option<f64>> = match &timeline.smoothed {
        Some(points) => points.iter().map(|p| Some(p.value)).collect(),
        None => vec![None; timeline.points.len()],
    };
    let rows = timeline
        .points
        .iter()
        .zip(&smoothed_by_index)
        .map(|(p, smoothed)| {
            vec![
                p.date.to_string(),
                p.new_topics.to_string(),
                smoothed.map(float).unwrap_or_default(),
            ]
        })
        .collect();
    let report = Report {
        value: serde_json::to_value(&timeline).map_err(runtime)?,
        header: header(&["date", "new_topics", "smoothed"]),
        rows,
    };
    emit(cli, "timeline", &report)
}

fn cmd_synth(cli: &Cli) -> Result<(), CliError> {
    let spec = SyntheticCorpusSpec::with_seed(cli.seed);
    let bundle = synth::generate(&spec).map_err(runtime)?;
    let config_path = synth::write_bundle(&bundle, &cli.out_dir).map_err(runtime)?;
    let paragraphs: usize = bundle.corpus.iter().map(|d| d.paragraphs.len()).sum();
    let report = Report {
        value: json!({
            "seed": cli.seed,
            "documents": bundle.corpus.len(),
            "paragraphs": paragraphs,
            "config": config_path,
        }),
        header: header(&["key", "value"]),
        rows: vec![
            vec!["seed".into(), cli.seed.to_string()],
            vec!["documents".into(), bundle.corpus.len().to_string()],
            vec!["paragraphs".into(), paragraphs.to_string()],
            vec!["config".into(), config_path.display().to_string()],
        ],
    };
    emit(cli, "synth", &report)
}
