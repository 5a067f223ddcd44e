//! Transcript ingestion, paragraph segmentation, and corpus statistics.
//!
//! A corpus is a flat list of [`TranscriptDocument`]s, one per company and
//! fiscal quarter. Paragraphs are the retrieval granularity for the rest of
//! the pipeline, so segmentation and word counting live here and every other
//! module treats them as fixed.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid fiscal quarter {0:?}: expected YYYYQn with year 1900-2100 and quarter 1-4")]
    InvalidQuarter(String),
    #[error("duplicate doc_id {0:?} in corpus")]
    DuplicateDocId(String),
    #[error("document {0:?} has no paragraphs")]
    EmptyDocument(String),
    #[error("paragraph {para_id:?} in {doc_id:?} is empty after trimming")]
    EmptyParagraph { doc_id: String, para_id: String },
    #[error("paragraph {para_id:?} in {doc_id:?} has doc_index {got}, expected {expected}")]
    ParagraphOrder {
        doc_id: String,
        para_id: String,
        got: usize,
        expected: usize,
    },
    #[error("corpus line {line}: {source}")]
    MalformedRecord {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("metadata file {path}: no entry for {file}")]
    MissingMetadata { path: String, file: String },
    #[error("invalid metadata file {path}: {reason}")]
    InvalidMetadata { path: String, reason: String },
}

/// Fiscal quarter in `YYYYQn` form, e.g. `2021Q4`. Ordered chronologically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiscalQuarter {
    year: u16,
    quarter: u8,
}

impl FiscalQuarter {
    pub fn new(year: u16, quarter: u8) -> Result<Self, CorpusError> {
        if !(1900..=2100).contains(&year) || !(1..=4).contains(&quarter) {
            return Err(CorpusError::InvalidQuarter(format!("{year}Q{quarter}")));
        }
        Ok(Self { year, quarter })
    }

    pub fn year(&self) -> u16 {
        self.year
    }

    pub fn quarter(&self) -> u8 {
        self.quarter
    }

    /// The quarter immediately after this one.
    pub fn next(&self) -> Self {
        if self.quarter == 4 {
            Self {
                year: self.year + 1,
                quarter: 1,
            }
        } else {
            Self {
                year: self.year,
                quarter: self.quarter + 1,
            }
        }
    }

    /// Inclusive range of quarters from `start` to `end`.
    pub fn range_inclusive(start: Self, end: Self) -> Vec<Self> {
        let mut out = Vec::new();
        let mut q = start;
        while q <= end {
            out.push(q);
            q = q.next();
        }
        out
    }
}

impl fmt::Display for FiscalQuarter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Q{}", self.year, self.quarter)
    }
}

impl FromStr for FiscalQuarter {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || CorpusError::InvalidQuarter(s.to_string());
        let (y, q) = s.split_once(['Q', 'q']).ok_or_else(err)?;
        let year: u16 = y.parse().map_err(|_| err())?;
        let quarter: u8 = q.parse().map_err(|_| err())?;
        FiscalQuarter::new(year, quarter)
    }
}

impl Serialize for FiscalQuarter {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FiscalQuarter {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Paragraph {
    pub para_id: String,
    /// 0-based position within the document.
    pub doc_index: usize,
    pub text: String,
    pub word_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptDocument {
    pub doc_id: String,
    pub ticker: String,
    pub sector: String,
    pub call_date: NaiveDate,
    pub fiscal_quarter: FiscalQuarter,
    pub paragraphs: Vec<Paragraph>,
}

impl TranscriptDocument {
    pub fn word_count(&self) -> usize {
        self.paragraphs.iter().map(|p| p.word_count).sum()
    }
}

/// Call metadata supplied alongside raw transcript text.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CallMetadata {
    pub ticker: String,
    pub sector: String,
    pub call_date: NaiveDate,
    pub fiscal_quarter: FiscalQuarter,
}

/// Mean with population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub stddev: f64,
}

impl MeanStd {
    pub fn from_values(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self {
                mean: 0.0,
                stddev: 0.0,
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Self {
            mean,
            stddev: var.max(0.0).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub total_transcripts: usize,
    pub total_paragraphs: usize,
    pub total_quarters: usize,
    pub vocabulary_size: usize,
    pub avg_paragraph_len_words: MeanStd,
    pub avg_document_len_words: f64,
    pub avg_document_len_paragraphs: f64,
    pub avg_sentence_len_words: f64,
}

/// One bucket of the paragraph-length histogram: counts paragraphs with
/// `lo <= word_count < lo + width`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBucket {
    pub lo: usize,
    pub count: usize,
}

/// Word tokenizer used for all word counts and vocabulary statistics:
/// lowercase, split on whitespace, strip leading/trailing punctuation,
/// drop tokens that end up empty.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|raw| {
            let t = raw.trim_matches(|c: char| c.is_ascii_punctuation());
            if t.is_empty() {
                None
            } else {
                Some(t.to_lowercase())
            }
        })
        .collect()
}

pub fn count_words(text: &str) -> usize {
    tokenize(text).len()
}

/// Split on sentence terminators ('.', '!', '?') followed by whitespace or
/// end of text. Pieces are trimmed; empty pieces are dropped.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            let at_boundary = match chars.peek() {
                None => true,
                Some((_, next)) => next.is_whitespace(),
            };
            if at_boundary {
                let piece = text[start..=i].trim();
                if !piece.is_empty() {
                    out.push(piece);
                }
                start = i + 1;
            }
        }
    }
    let tail = text[start..].trim();
    if !tail.is_empty() {
        out.push(tail);
    }
    out
}

/// Split raw text into paragraphs on blank-line boundaries. Blocks are
/// trimmed, empty blocks dropped, indices assigned in order. Paragraph ids
/// are local (`p0000`, ...); ingestion scopes them with the document id.
pub fn segment_paragraphs(raw_text: &str) -> Vec<Paragraph> {
    let mut blocks: Vec<String> = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    for line in raw_text.lines() {
        if line.trim().is_empty() {
            if !current.is_empty() {
                blocks.push(current.join("\n"));
                current.clear();
            }
        } else {
            current.push(line);
        }
    }
    if !current.is_empty() {
        blocks.push(current.join("\n"));
    }

    blocks
        .into_iter()
        .filter_map(|b| {
            let text = b.trim().to_string();
            if text.is_empty() {
                None
            } else {
                Some(text)
            }
        })
        .enumerate()
        .map(|(i, text)| Paragraph {
            para_id: format!("p{i:04}"),
            doc_index: i,
            word_count: count_words(&text),
            text,
        })
        .collect()
}

/// Build a document from raw transcript text plus call metadata. The doc_id
/// is `TICKER-YYYYQn`; paragraph ids are scoped with it.
pub fn document_from_text(
    raw_text: &str,
    meta: &CallMetadata,
) -> Result<TranscriptDocument, CorpusError> {
    let doc_id = format!("{}-{}", meta.ticker, meta.fiscal_quarter);
    let mut paragraphs = segment_paragraphs(raw_text);
    if paragraphs.is_empty() {
        return Err(CorpusError::EmptyDocument(doc_id));
    }
    for p in &mut paragraphs {
        p.para_id = format!("{}-{}", doc_id, p.para_id);
    }
    Ok(TranscriptDocument {
        doc_id,
        ticker: meta.ticker.clone(),
        sector: meta.sector.clone(),
        call_date: meta.call_date,
        fiscal_quarter: meta.fiscal_quarter,
        paragraphs,
    })
}

/// Read one plain-text transcript file.
pub fn ingest_text_file(
    path: &Path,
    meta: &CallMetadata,
) -> Result<TranscriptDocument, CorpusError> {
    let raw = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    document_from_text(&raw, meta)
}

/// Ingest a directory of `.txt` transcripts with a JSON sidecar mapping each
/// filename to its call metadata.
pub fn ingest_text_dir(
    dir: &Path,
    metadata_path: &Path,
) -> Result<Vec<TranscriptDocument>, CorpusError> {
    let raw = fs::read_to_string(metadata_path).map_err(|source| CorpusError::Io {
        path: metadata_path.display().to_string(),
        source,
    })?;
    let meta_map: std::collections::BTreeMap<String, CallMetadata> = serde_json::from_str(&raw)
        .map_err(|e| CorpusError::InvalidMetadata {
            path: metadata_path.display().to_string(),
            reason: e.to_string(),
        })?;

    let mut entries: Vec<_> = fs::read_dir(dir)
        .map_err(|source| CorpusError::Io {
            path: dir.display().to_string(),
            source,
        })?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "txt"))
        .collect();
    entries.sort();

    let mut docs = Vec::new();
    for path in entries {
        let file_name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let meta = meta_map
            .get(&file_name)
            .ok_or_else(|| CorpusError::MissingMetadata {
                path: metadata_path.display().to_string(),
                file: file_name.clone(),
            })?;
        docs.push(ingest_text_file(&path, meta)?);
    }
    check_unique_doc_ids(&docs)?;
    Ok(docs)
}

/// Fail if two documents share a doc_id.
pub fn check_unique_doc_ids(docs: &[TranscriptDocument]) -> Result<(), CorpusError> {
    let mut seen = BTreeSet::new();
    for d in docs {
        if !seen.insert(d.doc_id.as_str()) {
            return Err(CorpusError::DuplicateDocId(d.doc_id.clone()));
        }
    }
    Ok(())
}

// Corpus JSONL wire records. `word_count` is derived, so it is not stored.
#[derive(Serialize, Deserialize)]
struct ParagraphRecord {
    para_id: String,
    doc_index: usize,
    text: String,
}

#[derive(Serialize, Deserialize)]
struct DocumentRecord {
    doc_id: String,
    ticker: String,
    sector: String,
    call_date: NaiveDate,
    fiscal_quarter: FiscalQuarter,
    paragraphs: Vec<ParagraphRecord>,
}

impl From<&TranscriptDocument> for DocumentRecord {
    fn from(d: &TranscriptDocument) -> Self {
        DocumentRecord {
            doc_id: d.doc_id.clone(),
            ticker: d.ticker.clone(),
            sector: d.sector.clone(),
            call_date: d.call_date,
            fiscal_quarter: d.fiscal_quarter,
            paragraphs: d
                .paragraphs
                .iter()
                .map(|p| ParagraphRecord {
                    para_id: p.para_id.clone(),
                    doc_index: p.doc_index,
                    text: p.text.clone(),
                })
                .collect(),
        }
    }
}

impl DocumentRecord {
    fn into_document(self) -> Result<TranscriptDocument, CorpusError> {
        if self.paragraphs.is_empty() {
            return Err(CorpusError::EmptyDocument(self.doc_id));
        }
        let mut paragraphs = Vec::with_capacity(self.paragraphs.len());
        for (expected, rec) in self.paragraphs.into_iter().enumerate() {
            if rec.doc_index != expected {
                return Err(CorpusError::ParagraphOrder {
                    doc_id: self.doc_id,
                    para_id: rec.para_id,
                    got: rec.doc_index,
                    expected,
                });
            }
            if rec.text.trim().is_empty() {
                return Err(CorpusError::EmptyParagraph {
                    doc_id: self.doc_id,
                    para_id: rec.para_id,
                });
            }
            paragraphs.push(Paragraph {
                word_count: count_words(&rec.text),
                para_id: rec.para_id,
                doc_index: rec.doc_index,
                text: rec.text,
            });
        }
        Ok(TranscriptDocument {
            doc_id: self.doc_id,
            ticker: self.ticker,
            sector: self.sector,
            call_date: self.call_date,
            fiscal_quarter: self.fiscal_quarter,
            paragraphs,
        })
    }
}

pub fn save_corpus_jsonl(docs: &[TranscriptDocument], path: &Path) -> Result<(), CorpusError> {
    let io_err = |source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut out = Vec::new();
    for d in docs {
        let rec = DocumentRecord::from(d);
        serde_json::to_writer(&mut out, &rec).expect("document record serializes");
        out.push(b'\n');
    }
    let mut f = fs::File::create(path).map_err(io_err)?;
    f.write_all(&out).map_err(io_err)?;
    Ok(())
}

pub fn load_corpus_jsonl(path: &Path) -> Result<Vec<TranscriptDocument>, CorpusError> {
    let f = fs::File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut docs = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: DocumentRecord = serde_json::from_str(&line)
            .map_err(|source| CorpusError::MalformedRecord { line: i + 1, source })?;
        docs.push(rec.into_document()?);
    }
    check_unique_doc_ids(&docs)?;
    Ok(docs)
}

/// Corpus-level statistics. Empty corpus yields all-zero stats.
pub fn corpus_stats(corpus: &[TranscriptDocument]) -> CorpusStats {
    let mut quarters = BTreeSet::new();
    let mut vocab: BTreeSet<String> = BTreeSet::new();
    let mut paragraph_lens: Vec<f64> = Vec::new();
    let mut doc_word_lens: Vec<f64> = Vec::new();
    let mut doc_para_lens: Vec<f64> = Vec::new();
    let mut sentence_lens: Vec<f64> = Vec::new();

    for doc in corpus {
        quarters.insert(doc.fiscal_quarter);
        let mut doc_words = 0usize;
        for p in &doc.paragraphs {
            doc_words += p.word_count;
            paragraph_lens.push(p.word_count as f64);
            vocab.extend(tokenize(&p.text));
            for s in split_sentences(&p.text) {
                let n = count_words(s);
                if n > 0 {
                    sentence_lens.push(n as f64);
                }
            }
        }
        doc_word_lens.push(doc_words as f64);
        doc_para_lens.push(doc.paragraphs.len() as f64);
    }

    let mean = |v: &[f64]| {
        if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };

    CorpusStats {
        total_transcripts: corpus.len(),
        total_paragraphs: paragraph_lens.len(),
        total_quarters: quarters.len(),
        vocabulary_size: vocab.len(),
        avg_paragraph_len_words: MeanStd::from_values(&paragraph_lens),
        avg_document_len_words: mean(&doc_word_lens),
        avg_document_len_paragraphs: mean(&doc_para_lens),
        avg_sentence_len_words: mean(&sentence_lens),
    }
}

/// Paragraph-length histogram with fixed-width buckets. Bucket counts sum to
/// the corpus's total paragraph count.
pub fn paragraph_length_histogram(
    corpus: &[TranscriptDocument],
    bucket_width: usize,
) -> Vec<HistogramBucket> {
    assert!(bucket_width > 0, "bucket_width must be positive");
    let mut counts: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
    for doc in corpus {
        for p in &doc.paragraphs {
            let lo = (p.word_count / bucket_width) * bucket_width;
            *counts.entry(lo).or_insert(0) += 1;
        }
    }
    counts
        .into_iter()
        .map(|(lo, count)| HistogramBucket { lo, count })
        .collect()
}
