//! Edit-quality scoring, labeling, and revert mining.
//!
//! The quality of edit k seen from ℓ revisions later is the fraction of the
//! edit's work that survives:
//!
//!   q_step = (d(v_{k-1}, v_{k+ℓ}) − d(v_k, v_{k+ℓ})) / d(v_{k-1}, v_k)
//!
//! clamped to [−1, 1], and the edit's score is the mean over ℓ = 1..L with
//! L capped at 10. A score ≥ 0 labels the edit good-faith (−1), a negative
//! score labels it damaging (+1).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{EditPair, RevisionHistory};

/// Horizon cap for quality averaging.
pub const MAX_HORIZON: usize = 10;

/// Number of uniform histogram bins over [-1, 1].
pub const REPORT_BINS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Unscorable {
    #[error("null edit: d(v_k-1, v_k) = 0")]
    NullEdit,
    #[error("no subsequent revision to judge the edit by")]
    NoFutureRevision,
    #[error("edit index out of range")]
    BadIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceMode {
    /// Character-level Levenshtein over the full revision texts.
    #[default]
    Char,
    /// Whitespace-token Levenshtein; cheaper approximation for long pages.
    Word,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityScore {
    /// Mean capped step quality, in [-1, 1].
    pub q: f64,
    /// Number of future revisions actually averaged over.
    pub horizon_used: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledEdit {
    pub page_id: String,
    pub rev_index: usize,
    pub s_initial: String,
    pub s_final: String,
    pub quality: f64,
    pub horizon_used: usize,
    /// -1 good-faith, +1 damaging.
    pub label: i8,
    pub reverted: bool,
}

impl LabeledEdit {
    pub fn new(pair: EditPair, score: QualityScore, reverted: bool) -> Self {
        LabeledEdit {
            page_id: pair.page_id,
            rev_index: pair.rev_index,
            s_initial: pair.s_initial,
            s_final: pair.s_final,
            quality: score.q,
            horizon_used: score.horizon_used,
            label: label_edit(&score),
            reverted,
        }
    }
}

/// Character-level Levenshtein distance, two-row DP.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    levenshtein_seq(&a, &b)
}

/// Levenshtein distance over whitespace-separated tokens.
pub fn levenshtein_words(a: &str, b: &str) -> usize {
    let a: Vec<&str> = a.split_whitespace().collect();
    let b: Vec<&str> = b.split_whitespace().collect();
    levenshtein_seq(&a, &b)
}

fn levenshtein_seq<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let tmp = row[j + 1];
            let sub = diag + usize::from(ca != cb);
            row[j + 1] = sub.min(tmp + 1).min(row[j] + 1);
            diag = tmp;
        }
    }
    row[b.len()]
}

fn distance(mode: DistanceMode, a: &str, b: &str) -> usize {
    match mode {
        DistanceMode::Char => levenshtein(a, b),
        DistanceMode::Word => levenshtein_words(a, b),
    }
}

/// One capped step-quality term. Errors on a null edit (zero denominator).
pub fn quality_step(
    mode: DistanceMode,
    v_prev: &str,
    v_k: &str,
    v_future: &str,
) -> Result<f64, Unscorable> {
    let denom = distance(mode, v_prev, v_k);
    if denom == 0 {
        return Err(Unscorable::NullEdit);
    }
    let kept = distance(mode, v_prev, v_future) as f64 - distance(mode, v_k, v_future) as f64;
    Ok((kept / denom as f64).clamp(-1.0, 1.0))
}

/// Mean step quality of edit k over up to [`MAX_HORIZON`] future revisions.
pub fn quality_of_edit(
    history: &RevisionHistory,
    k: usize,
    mode: DistanceMode,
) -> Result<QualityScore, Unscorable> {
    let n = history.revisions.len();
    if k == 0 || k >= n {
        return Err(Unscorable::BadIndex);
    }
    if k + 1 >= n {
        return Err(Unscorable::NoFutureRevision);
    }
    let horizon = MAX_HORIZON.min(n - 1 - k);
    let v_prev = &history.revisions[k - 1].text;
    let v_k = &history.revisions[k].text;
    let mut sum = 0.0;
    for step in 1..=horizon {
        sum += quality_step(mode, v_prev, v_k, &history.revisions[k + step].text)?;
    }
    Ok(QualityScore { q: sum / horizon as f64, horizon_used: horizon })
}

/// -1 (good faith) when q >= 0, +1 (damaging) otherwise.
pub fn label_edit(score: &QualityScore) -> i8 {
    if score.q >= 0.0 {
        -1
    } else {
        1
    }
}

/// Identity-revert mining over normalized content hashes.
///
/// A revision j whose hash equals the latest earlier revision i with
/// i < j-1 undoes edits i+1..=j-1; those edit indices are returned. The
/// reverting edit j is not marked by its own match.
pub fn mine_reverts(history: &RevisionHistory) -> BTreeSet<usize> {
    let mut reverted = BTreeSet::new();
    let revs = &history.revisions;
    for j in 2..revs.len() {
        let target = revs[j].content_hash;
        if let Some(i) = (0..j.saturating_sub(1)).rev().find(|&i| revs[i].content_hash == target) {
            for k in i + 1..j {
                reverted.insert(k);
            }
        }
    }
    reverted
}

/// Score, label, and revert-flag every sentence pair of every edit in a
/// history. Returns the labeled edits plus a count of unscorable edits.
pub fn label_history(history: &RevisionHistory, mode: DistanceMode) -> (Vec<LabeledEdit>, usize) {
    let reverted = mine_reverts(history);
    let mut out = Vec::new();
    let mut unscorable = 0;
    for k in 1..history.revisions.len() {
        match quality_of_edit(history, k, mode) {
            Ok(score) => {
                let pairs = crate::corpus::diff_revisions(
                    &history.page_id,
                    &history.revisions[k - 1],
                    &history.revisions[k],
                );
                for pair in pairs {
                    out.push(LabeledEdit::new(pair, score, reverted.contains(&k)));
                }
            }
            Err(_) => unscorable += 1,
        }
    }
    (out, unscorable)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportBin {
    pub bin_low: f64,
    pub bin_high: f64,
    pub count_reverted: usize,
    pub count_unreverted: usize,
}

/// Quality histograms for reverted vs non-reverted edits (20 bins, [-1, 1]).
pub fn quality_revert_report(labeled: &[LabeledEdit]) -> Vec<ReportBin> {
    if labeled.is_empty() {
        return Vec::new();
    }
    let width = 2.0 / REPORT_BINS as f64;
    let mut bins: Vec<ReportBin> = (0..REPORT_BINS)
        .map(|i| ReportBin {
            bin_low: -1.0 + i as f64 * width,
            bin_high: -1.0 + (i + 1) as f64 * width,
            count_reverted: 0,
            count_unreverted: 0,
        })
        .collect();
    for edit in labeled {
        let idx = (((edit.quality + 1.0) / width) as usize).min(REPORT_BINS - 1);
        if edit.reverted {
            bins[idx].count_reverted += 1;
        } else {
            bins[idx].count_unreverted += 1;
        }
    }
    bins
}

pub fn write_report_csv<W: std::io::Write>(
    writer: &mut W,
    bins: &[ReportBin],
) -> std::io::Result<()> {
    writeln!(writer, "bin_low,bin_high,count_reverted,count_unreverted")?;
    for bin in bins {
        writeln!(
            writer,
            "{},{},{},{}",
            bin.bin_low, bin.bin_high, bin.count_reverted, bin.count_unreverted
        )?;
    }
    Ok(())
}
