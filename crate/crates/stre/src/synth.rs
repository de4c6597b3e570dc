//! Synthetic fixtures: randomized revision histories for oracle checks,
//! a revert corpus with known ground truth, and a linearly separable
//! classification task for training sanity runs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Revision, RevisionHistory};
use crate::model::{word_tokens, Example, Vocab};

const WORDS: &[&str] = &[
    "the", "river", "flows", "north", "through", "old", "stone", "bridges", "city", "was",
    "founded", "early", "trade", "routes", "grew", "around", "market", "square", "local",
    "records", "mention", "harvest", "festivals", "every", "autumn", "region", "exports",
    "timber", "wool", "climate", "is", "mild", "with", "wet", "winters",
];

/// Tokens that only ever appear in damaging edits of the separable task.
pub const DAMAGE_MARKERS: &[&str] = &["vandalx", "spamzz", "junkqq"];

fn random_sentence<R: Rng>(rng: &mut R, words: usize) -> String {
    let mut parts = Vec::with_capacity(words);
    for _ in 0..words {
        parts.push(*WORDS.choose(rng).unwrap());
    }
    let mut s = parts.join(" ");
    s.push('.');
    s
}

fn random_text<R: Rng>(rng: &mut R, max_len: usize) -> String {
    let mut text = String::new();
    while text.len() < max_len {
        let words = rng.gen_range(3..8);
        let sentence = random_sentence(rng, words);
        if text.len() + sentence.len() + 1 > max_len {
            break;
        }
        if !text.is_empty() {
            text.push(' ');
        }
        text.push_str(&sentence);
    }
    if text.is_empty() {
        text = random_sentence(rng, 3);
    }
    text
}

fn history_from_texts(page_id: u64, texts: Vec<String>) -> RevisionHistory {
    let revisions = texts
        .into_iter()
        .enumerate()
        .map(|(i, text)| Revision::new(i, 1_000_000 + 60 * i as i64, text))
        .collect();
    RevisionHistory {
        page_id: page_id.to_string(),
        title: format!("Page {page_id}"),
        category: Some("synthetic".to_string()),
        revisions,
    }
}

/// Unstructured random histories for exercising the quality oracle.
/// Each mutation step rewrites, appends, or truncates text.
pub fn random_histories(count: usize, seed: u64) -> Vec<RevisionHistory> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|page| {
            let n_revs = rng.gen_range(2..=20);
            let mut texts = vec![random_text(&mut rng, 200)];
            for _ in 1..n_revs {
                let prev = texts.last().unwrap().clone();
                let next = match rng.gen_range(0..4) {
                    0 => random_text(&mut rng, 200),
                    1 => {
                        let mut t = prev;
                        t.push(' ');
                        t.push_str(&random_sentence(&mut rng, 4));
                        t.truncate(200);
                        t
                    }
                    2 => {
                        let mut cut = rng.gen_range(0..=prev.len());
                        while !prev.is_char_boundary(cut) {
                            cut -= 1;
                        }
                        prev[..cut].to_string()
                    }
                    _ => prev,
                };
                texts.push(next);
            }
            history_from_texts(page as u64, texts)
        })
        .collect()
}

/// A history where every damaging edit is undone by the very next revision
/// (restoring the prior content byte for byte) and every good edit adds a
/// sentence that all later revisions keep. Returns the history plus the
/// ground truth: (revision index, is_damaging) per constructed edit.
pub fn revert_history(page_id: u64, edits: usize, seed: u64) -> (RevisionHistory, Vec<(usize, bool)>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ page_id);
    let mut texts = vec![random_text(&mut rng, 120)];
    let mut truth = Vec::new();
    for step in 0..edits {
        let current = texts.last().unwrap().clone();
        if rng.gen_bool(0.5) {
            truth.push((texts.len(), false));
            texts.push(format!("{current} Good addition {step} stands."));
        } else {
            // Blanking-style vandalism: the whole page is replaced, so the
            // edit looks destructive at every future horizon, not just the
            // one where it gets reverted. Each blob gets its own filler
            // character so two vandal revisions never resemble each other.
            truth.push((texts.len(), true));
            let filler = (b'a' + (step % 26) as u8) as char;
            let blob: String =
                std::iter::repeat(filler).take(current.len()).collect();
            texts.push(format!("{step} {blob}"));
            texts.push(current);
        }
    }
    // Trailing good revisions so the last edits still have a future to be
    // judged against.
    for tail in 0..3 {
        let current = texts.last().unwrap().clone();
        texts.push(format!("{current} Closing note {tail}."));
    }
    (history_from_texts(page_id, texts), truth)
}

pub fn revert_corpus(pages: usize, edits_per_page: usize, seed: u64) -> Vec<(RevisionHistory, Vec<(usize, bool)>)> {
    (0..pages).map(|p| revert_history(p as u64, edits_per_page, seed)).collect()
}

/// Linearly separable edit-classification task. Every damaging example
/// injects one token from `DAMAGE_MARKERS` into the edited sentence; good
/// examples only rephrase or extend. Labels alternate so both classes are
/// balanced.
pub fn separable_examples(count: usize, seed: u64) -> Vec<Example> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let words = rng.gen_range(4..9);
            let s_initial = random_sentence(&mut rng, words);
            let damaging = i % 2 == 0;
            let s_final = if damaging {
                let marker = DAMAGE_MARKERS.choose(&mut rng).unwrap();
                let base = s_initial.trim_end_matches('.');
                format!("{base} {marker}.")
            } else {
                let base = s_initial.trim_end_matches('.');
                format!("{base} {}", random_sentence(&mut rng, 2))
            };
            Example { s_initial, s_final, label: if damaging { 1 } else { -1 } }
        })
        .collect()
}

/// First-occurrence vocabulary over both sides of every example.
pub fn build_vocab(examples: &[Example]) -> Vocab {
    let mut tokens = Vec::new();
    for ex in examples {
        tokens.extend(word_tokens(&ex.s_initial));
        tokens.extend(word_tokens(&ex.s_final));
    }
    Vocab::build(tokens.iter().map(|s| s.as_str()))
}
