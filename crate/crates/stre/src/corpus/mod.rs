//! Revision-history ingestion and sentence-level edit extraction.
//!
//! Histories come in either as a MediaWiki export XML subset or as JSONL
//! records (one revision per line). Consecutive revision pairs are diffed
//! at sentence granularity to produce [`EditPair`]s.

mod diff;
mod jsonl;
mod sentence;
mod xml;

pub use diff::diff_revisions;
pub use jsonl::{parse_jsonl_history, read_histories_jsonl, write_histories_jsonl};
pub use sentence::split_sentences;
pub use xml::{parse_mediawiki_export, XmlPages};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("malformed XML at byte offset {offset}: {message}")]
    Xml { offset: u64, message: String },
    #[error("line {line}: {message}")]
    Jsonl { line: usize, message: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Ordered revisions of one page. Index 0 is the initial creation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevisionHistory {
    pub page_id: String,
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    pub revisions: Vec<Revision>,
}

impl RevisionHistory {
    /// Number of edits (transitions between consecutive revisions).
    pub fn edit_count(&self) -> usize {
        self.revisions.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Revision {
    pub index: usize,
    /// UTC seconds.
    pub timestamp: i64,
    pub text: String,
    pub content_hash: u64,
}

impl Revision {
    pub fn new(index: usize, timestamp: i64, text: String) -> Self {
        let content_hash = content_hash(&text);
        Revision { index, timestamp, text, content_hash }
    }
}

/// One sentence-level change produced by the edit v_{k-1} -> v_k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EditPair {
    pub page_id: String,
    /// k, the revision produced by this edit. Always >= 1.
    pub rev_index: usize,
    pub s_initial: String,
    pub s_final: String,
}

/// Line-ending and trailing-whitespace normalization applied before hashing.
pub fn normalize_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for (i, line) in text.split('\n').enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(line.trim_end());
    }
    out
}

/// 64-bit FNV-1a digest of the normalized text.
pub fn content_hash(text: &str) -> u64 {
    fnv1a64(normalize_text(text).as_bytes())
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Sort revisions ascending by timestamp (stable) and reassign indices.
pub(crate) fn finalize_revisions(revisions: &mut Vec<Revision>) {
    revisions.sort_by_key(|r| r.timestamp);
    for (i, rev) in revisions.iter_mut().enumerate() {
        rev.index = i;
    }
}
