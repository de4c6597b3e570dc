//! Deterministic sentence splitting.
//!
//! The rule is intentionally simple: a split happens after '.', '!' or '?'
//! when the next character is whitespace, and at blank lines. No
//! abbreviation handling; stability of the units matters more than
//! linguistic accuracy here.

pub fn split_sentences(text: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    for paragraph in paragraphs(text) {
        split_paragraph(&paragraph, &mut sentences);
    }
    sentences
}

/// Blank lines (whitespace-only) separate paragraphs.
fn paragraphs(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    for line in text.split('\n') {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            if !current.is_empty() {
                out.push(std::mem::take(&mut current));
            }
        } else {
            if !current.is_empty() {
                current.push('\n');
            }
            current.push_str(line);
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

fn split_paragraph(paragraph: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = paragraph.chars().collect();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let next_is_ws = chars.get(i + 1).map_or(true, |n| n.is_whitespace());
        if matches!(c, '.' | '!' | '?') && next_is_ws && i + 1 < chars.len() {
            push_trimmed(&chars[start..=i], out);
            start = i + 1;
        }
        i += 1;
    }
    if start < chars.len() {
        push_trimmed(&chars[start..], out);
    }
}

fn push_trimmed(chars: &[char], out: &mut Vec<String>) {
    let s: String = chars.iter().collect();
    let s = s.trim();
    if !s.is_empty() {
        out.push(s.to_string());
    }
}
