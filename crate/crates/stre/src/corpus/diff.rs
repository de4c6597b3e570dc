//! Sentence-level diff of consecutive revisions.
//!
//! Sentences of both revisions are aligned by longest common subsequence.
//! Inside each changed block, old and new sentences are paired by position;
//! leftovers pair with the empty string (pure insertions / deletions).

use super::sentence::split_sentences;
use super::{EditPair, Revision};

pub fn diff_revisions(page_id: &str, prev: &Revision, next: &Revision) -> Vec<EditPair> {
    debug_assert_eq!(prev.index + 1, next.index);
    let old = split_sentences(&prev.text);
    let new = split_sentences(&next.text);
    let mut pairs = Vec::new();
    for (old_block, new_block) in changed_blocks(&old, &new) {
        let n = old_block.len().max(new_block.len());
        for i in 0..n {
            let s_initial = old_block.get(i).cloned().unwrap_or_default();
            let s_final = new_block.get(i).cloned().unwrap_or_default();
            pairs.push(EditPair {
                page_id: page_id.to_string(),
                rev_index: next.index,
                s_initial,
                s_final,
            });
        }
    }
    pairs
}

/// LCS alignment; returns the maximal runs of non-matching sentences.
fn changed_blocks(old: &[String], new: &[String]) -> Vec<(Vec<String>, Vec<String>)> {
    let matches = lcs_pairs(old, new);
    let mut blocks = Vec::new();
    let (mut i, mut j) = (0, 0);
    for &(mi, mj) in matches.iter().chain(std::iter::once(&(old.len(), new.len()))) {
        if i < mi || j < mj {
            blocks.push((old[i..mi].to_vec(), new[j..mj].to_vec()));
        }
        i = mi + 1;
        j = mj + 1;
    }
    blocks
}

/// Index pairs of one longest common subsequence, via the classic DP table.
fn lcs_pairs(a: &[String], b: &[String]) -> Vec<(usize, usize)> {
    let (n, m) = (a.len(), b.len());
    let mut dp = vec![vec![0usize; m + 1]; n + 1];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[i][j] = if a[i] == b[j] {
                dp[i + 1][j + 1] + 1
            } else {
                dp[i + 1][j].max(dp[i][j + 1])
            };
        }
    }
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if a[i] == b[j] {
            out.push((i, j));
            i += 1;
            j += 1;
        } else if dp[i + 1][j] >= dp[i][j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rev(index: usize, text: &str) -> Revision {
        Revision::new(index, index as i64, text.to_string())
    }

    #[test]
    fn identical_revisions_yield_nothing() {
        let a = rev(0, "One. Two. Three.");
        let b = rev(1, "One. Two. Three.");
        assert!(diff_revisions("p", &a, &b).is_empty());
    }

    #[test]
    fn single_replacement() {
        let a = rev(0, "One. Two. Three.");
        let b = rev(1, "One. 2! Three.");
        let pairs = diff_revisions("p", &a, &b);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].s_initial, "Two.");
        assert_eq!(pairs[0].s_final, "2!");
        assert_eq!(pairs[0].rev_index, 1);
    }

    #[test]
    fn pure_insertion_pairs_with_empty() {
        let a = rev(0, "One. Two.");
        let b = rev(1, "One. Two. Three.");
        let pairs = diff_revisions("p", &a, &b);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].s_initial, "");
        assert_eq!(pairs[0].s_final, "Three.");
    }

    #[test]
    fn pure_deletion_pairs_with_empty() {
        let a = rev(0, "One. Two. Three.");
        let b = rev(1, "One. Three.");
        let pairs = diff_revisions("p", &a, &b);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].s_initial, "Two.");
        assert_eq!(pairs[0].s_final, "");
    }

    #[test]
    fn unequal_blocks_pair_positionally_then_leftover() {
        let a = rev(0, "Keep. Old one. Keep too.");
        let b = rev(1, "Keep. New one. Extra new. Keep too.");
        let pairs = diff_revisions("p", &a, &b);
        assert_eq!(pairs.len(), 2);
        assert_eq!((pairs[0].s_initial.as_str(), pairs[0].s_final.as_str()), ("Old one.", "New one."));
        assert_eq!((pairs[1].s_initial.as_str(), pairs[1].s_final.as_str()), ("", "Extra new."));
    }

    #[test]
    fn never_both_sides_empty() {
        let a = rev(0, "A. B. C. D.");
        let b = rev(1, "A. X. D. E.");
        for p in diff_revisions("p", &a, &b) {
            assert!(!(p.s_initial.is_empty() && p.s_final.is_empty()));
        }
    }
}
