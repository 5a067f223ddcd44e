//! Run configuration: one JSON file wires provider choice, pipeline knobs,
//! analytics defaults, and data file locations. Secrets never live here;
//! the HTTP section only names the environment variable holding the key.
//!
//! Relative paths are resolved against the config file's directory, so a
//! generated bundle (config + corpus + script) can be moved as a unit.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ontologist::PipelineConfig;
use crate::providers::ProviderConfig;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config {path}: {reason}")]
    Malformed { path: String, reason: String },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProviderSection {
    /// Script file for the deterministic mock provider.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mock_script: Option<PathBuf>,
    /// Remote endpoint settings for the HTTP provider.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub http: Option<ProviderConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyticsSection {
    /// Significance level for trend classification.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Size of the per-company top-topic sets.
    #[serde(default = "default_top_n")]
    pub top_n: usize,
    /// LOESS window fraction for timeline smoothing.
    #[serde(default = "default_span")]
    pub span: f64,
    /// LOESS local fit degree (0 or 1).
    #[serde(default = "default_degree")]
    pub degree: u8,
    /// Minimum covered quarters before a trend is evaluated.
    #[serde(default = "default_min_quarters")]
    pub min_quarters: usize,
    /// Prominence threshold for emerging topics.
    #[serde(default = "default_min_late_mentions")]
    pub min_late_mentions: u64,
    /// Parents sampled by the coherence report.
    #[serde(default = "default_coherence_parents")]
    pub coherence_parents: usize,
    /// JSON array of product topic names to exclude from trend reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product_topics: Option<PathBuf>,
}

impl Default for AnalyticsSection {
    fn default() -> Self {
        Self {
            alpha: default_alpha(),
            top_n: default_top_n(),
            span: default_span(),
            degree: default_degree(),
            min_quarters: default_min_quarters(),
            min_late_mentions: default_min_late_mentions(),
            coherence_parents: default_coherence_parents(),
            product_topics: None,
        }
    }
}

fn default_alpha() -> f64 {
    0.05
}
fn default_top_n() -> usize {
    100
}
fn default_span() -> f64 {
    0.5
}
fn default_degree() -> u8 {
    1
}
fn default_min_quarters() -> usize {
    6
}
fn default_min_late_mentions() -> u64 {
    5
}
fn default_coherence_parents() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IoSection {
    /// Corpus JSONL (one document per line).
    pub corpus: PathBuf,
    /// Ontology JSON snapshot.
    pub ontology: PathBuf,
    /// Enrichments JSONL (one mention per line).
    pub enrichments: PathBuf,
    /// Seed topic spec applied before the first build.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_topics: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub provider: ProviderSection,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    #[serde(default)]
    pub analytics: AnalyticsSection,
    pub io: IoSection,
}

impl RunConfig {
    /// Reads and validates a config file, resolving relative paths against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let raw = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut config: RunConfig =
            serde_json::from_str(&raw).map_err(|e| ConfigError::Malformed {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
        if let Some(base) = path.parent() {
            config.resolve_paths(base);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn save(&self, path: &Path) -> Result<(), ConfigError> {
        let pretty = serde_json::to_string_pretty(self).expect("config serializes");
        std::fs::write(path, pretty + "\n").map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    /// Anchors every relative path at `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let anchor = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        anchor(&mut self.io.corpus);
        anchor(&mut self.io.ontology);
        anchor(&mut self.io.enrichments);
        if let Some(p) = self.io.seed_topics.as_mut() {
            anchor(p);
        }
        if let Some(p) = self.provider.mock_script.as_mut() {
            anchor(p);
        }
        if let Some(p) = self.analytics.product_topics.as_mut() {
            anchor(p);
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.pipeline.validate().map_err(ConfigError::Invalid)?;
        if let Some(http) = &self.provider.http {
            http.validate()
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        let a = &self.analytics;
        if !(a.alpha > 0.0 && a.alpha < 1.0) {
            return Err(ConfigError::Invalid(format!(
                "analytics.alpha must be in (0, 1), got {}",
                a.alpha
            )));
        }
        if !(a.span > 0.0 && a.span <= 1.0) {
            return Err(ConfigError::Invalid(format!(
                "analytics.span must be in (0, 1], got {}",
                a.span
            )));
        }
        if a.degree > 1 {
            return Err(ConfigError::Invalid(format!(
                "analytics.degree must be 0 or 1, got {}",
                a.degree
            )));
        }
        if a.top_n == 0 {
            return Err(ConfigError::Invalid("analytics.top_n must be >= 1".into()));
        }
        if a.min_quarters < crate::analytics::MIN_SERIES_LEN {
            return Err(ConfigError::Invalid(format!(
                "analytics.min_quarters must be >= {}",
                crate::analytics::MIN_SERIES_LEN
            )));
        }
        if a.min_late_mentions == 0 {
            return Err(ConfigError::Invalid(
                "analytics.min_late_mentions must be >= 1".into(),
            ));
        }
        if a.coherence_parents == 0 {
            return Err(ConfigError::Invalid(
                "analytics.coherence_parents must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Loads a product-topic name list (JSON array of strings).
pub fn load_product_list(path: &Path) -> Result<Vec<String>, ConfigError> {
    let raw = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&raw).map_err(|e| ConfigError::Malformed {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}
