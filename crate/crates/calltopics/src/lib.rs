//! Agentic topic extraction and trend analytics for earnings-call
//! transcripts.
//!
//! The pipeline ingests transcripts into a paragraph-level corpus, asks a
//! chat provider to extract financially relevant topics per paragraph,
//! maintains a hierarchical topic ontology (semantic alias merging plus
//! top-down insertion), and computes insight reports on the enriched corpus:
//! mention trends (Kendall's tau), LOESS-smoothed discovery timelines,
//! company-overlap Jaccard matrices, emerging topics, and embedding-based
//! ontology coherence.

pub mod analytics;
pub mod config;
pub mod corpus;
pub mod ontologist;
pub mod ontology;
pub mod prompts;
pub mod providers;
pub mod retriever;
pub mod synth;
