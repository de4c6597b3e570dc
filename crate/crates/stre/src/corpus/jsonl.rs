//! JSONL ingestion: one revision record per line, grouped by page_id.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{finalize_revisions, CorpusError, Revision, RevisionHistory};

/// Flat per-revision record. `timestamp` accepts UTC seconds or RFC 3339.
#[derive(Debug, Serialize, Deserialize)]
pub struct RevisionRecord {
    pub page_id: String,
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    pub timestamp: Timestamp,
    pub text: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Timestamp {
    Seconds(i64),
    Rfc3339(String),
}

impl Timestamp {
    pub fn as_seconds(&self) -> Result<i64, String> {
        match self {
            Timestamp::Seconds(s) => Ok(*s),
            Timestamp::Rfc3339(s) => chrono::DateTime::parse_from_rfc3339(s)
                .map(|t| t.timestamp())
                .map_err(|e| format!("bad timestamp {s:?}: {e}")),
        }
    }
}

/// Parse flat revision records, grouping by page_id in first-seen order.
/// Revisions are sorted ascending by timestamp and re-indexed.
pub fn parse_jsonl_history<R: BufRead>(reader: R) -> Result<Vec<RevisionHistory>, CorpusError> {
    let mut order: Vec<String> = Vec::new();
    let mut pages: HashMap<String, RevisionHistory> = HashMap::new();
    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        if line.trim().is_empty() {
            return Err(CorpusError::Jsonl { line: lineno, message: "blank line".into() });
        }
        let record: RevisionRecord = serde_json::from_str(&line)
            .map_err(|e| CorpusError::Jsonl { line: lineno, message: e.to_string() })?;
        let ts = record
            .timestamp
            .as_seconds()
            .map_err(|message| CorpusError::Jsonl { line: lineno, message })?;
        let history = pages.entry(record.page_id.clone()).or_insert_with(|| {
            order.push(record.page_id.clone());
            RevisionHistory {
                page_id: record.page_id.clone(),
                title: record.title.clone(),
                category: record.category.clone(),
                revisions: Vec::new(),
            }
        });
        history.revisions.push(Revision::new(history.revisions.len(), ts, record.text));
    }
    let mut out = Vec::with_capacity(order.len());
    for page_id in order {
        let mut history = pages.remove(&page_id).expect("grouped page");
        finalize_revisions(&mut history.revisions);
        out.push(history);
    }
    Ok(out)
}

/// Read histories serialized one per line (the `ingest` output format).
pub fn read_histories_jsonl<R: BufRead>(reader: R) -> Result<Vec<RevisionHistory>, CorpusError> {
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let history: RevisionHistory = serde_json::from_str(&line)
            .map_err(|e| CorpusError::Jsonl { line: lineno + 1, message: e.to_string() })?;
        out.push(history);
    }
    Ok(out)
}

pub fn write_histories_jsonl<W: Write>(
    writer: &mut W,
    histories: &[RevisionHistory],
) -> Result<(), CorpusError> {
    for history in histories {
        serde_json::to_writer(&mut *writer, history)
            .map_err(|e| CorpusError::Jsonl { line: 0, message: e.to_string() })?;
        writeln!(writer)?;
    }
    Ok(())
}
