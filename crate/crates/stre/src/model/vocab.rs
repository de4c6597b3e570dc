//! Word and character tokenization.
//!
//! The model input for one edit is the original sentence, a `||` delimiter,
//! and the edited sentence. The delimiter is a reserved vocabulary token;
//! content tokenization can never produce it because a literal `||` in text
//! splits into two single-char punctuation tokens.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Shared trainable id for out-of-vocabulary words.
pub const UNK_WORD: usize = 0;
/// Reserved delimiter token id.
pub const DELIM_WORD: usize = 1;
pub const DELIM_TOKEN: &str = "||";

/// Char id 0 is the shared unknown; ASCII byte `b` maps to id `b + 1`.
pub const UNK_CHAR: usize = 0;
pub const CHAR_TABLE_SIZE: usize = 129;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Vocab {
    words: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Vocab {
    /// Build from token streams in first-occurrence order (deterministic).
    pub fn build<'a, I: IntoIterator<Item = &'a str>>(tokens: I) -> Vocab {
        let mut vocab = Vocab::reserved();
        for token in tokens {
            if !vocab.index.contains_key(token) {
                vocab.index.insert(token.to_string(), vocab.words.len());
                vocab.words.push(token.to_string());
            }
        }
        vocab
    }

    fn reserved() -> Vocab {
        let words = vec!["<unk>".to_string(), DELIM_TOKEN.to_string()];
        let index =
            words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Vocab { words, index }
    }

    pub fn from_words(words: Vec<String>) -> Vocab {
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Vocab { words, index }
    }

    /// Rebuild the lookup index after deserialization.
    pub fn reindex(&mut self) {
        self.index = self.words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    }

    pub fn id(&self, token: &str) -> usize {
        self.index.get(token).copied().unwrap_or(UNK_WORD)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }
}

/// Lowercase tokens: alphanumeric runs, with every punctuation mark as its
/// own single-char token.
pub fn word_tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
        } else {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
            if !c.is_whitespace() {
                out.push(c.to_string());
            }
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// `tokens(s_initial) ++ ["||"] ++ tokens(s_final)`, truncated to `max_words`.
pub fn tokenize_words(vocab: &Vocab, s_initial: &str, s_final: &str, max_words: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = word_tokens(s_initial).iter().map(|t| vocab.id(t)).collect();
    ids.push(DELIM_WORD);
    ids.extend(word_tokens(s_final).iter().map(|t| vocab.id(t.as_str())));
    ids.truncate(max_words);
    ids
}

pub fn char_id(c: char) -> usize {
    if c.is_ascii() {
        c as usize + 1
    } else {
        UNK_CHAR
    }
}

/// Raw characters of `s_initial ++ "||" ++ s_final`, truncated to `max_chars`.
pub fn tokenize_chars(s_initial: &str, s_final: &str, max_chars: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = s_initial.chars().map(char_id).collect();
    ids.push(char_id('|'));
    ids.push(char_id('|'));
    ids.extend(s_final.chars().map(char_id));
    ids.truncate(max_chars);
    ids
}
