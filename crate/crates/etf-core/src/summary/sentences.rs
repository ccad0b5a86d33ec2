//! Sentence segmentation for summaries.

use serde::{Deserialize, Serialize};

use super::Summary;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    /// Byte offset of the first non-whitespace character.
    pub start: usize,
    /// Byte offset one past the last non-whitespace character.
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SentenceList {
    pub sentences: Vec<Sentence>,
}

impl SentenceList {
    /// Sentences whose range covers the given byte offset.
    pub fn covering(&self, offset: usize) -> Option<&Sentence> {
        self.sentences.iter().find(|s| s.start <= offset && offset < s.end)
    }
}

const ABBREVIATIONS: &[&str] = &["e.g.", "i.e.", "etc.", "vs.", "cf."];

fn ends_with_abbreviation(text_upto: &str) -> bool {
    let tail_start = text_upto
        .rfind(|c: char| c.is_whitespace() || c == '(' || c == '"' || c == '`')
        .map(|i| i + 1)
        .unwrap_or(0);
    let word = &text_upto[tail_start..];
    ABBREVIATIONS.iter().any(|a| word.eq_ignore_ascii_case(a))
}

/// Split a summary into sentences on `.`/`!`/`?` followed by whitespace and
/// an uppercase letter or a line break. Terminators inside backtick spans or
/// parentheses never split, nor do the dots of known abbreviations or dots
/// between digits. Line breaks always end the current sentence, so list
/// items segment one per line. The resulting ranges are disjoint, ordered,
/// and jointly cover every non-whitespace character.
pub fn segment_sentences(summary: &Summary) -> SentenceList {
    let text = &summary.text;
    let mut sentences = Vec::new();
    let mut start: Option<usize> = None;
    let mut last_end = 0usize;
    let mut paren_depth = 0usize;
    let mut in_backtick = false;

    let mut close = |sentences: &mut Vec<Sentence>, start: &mut Option<usize>, end: usize| {
        if let Some(s) = start.take() {
            if end > s {
                sentences.push(Sentence { text: text[s..end].to_string(), start: s, end });
            }
        }
    };

    let chars: Vec<(usize, char)> = text.char_indices().collect();
    for (k, &(i, c)) in chars.iter().enumerate() {
        if c == '\n' {
            close(&mut sentences, &mut start, last_end);
            paren_depth = 0;
            in_backtick = false;
            continue;
        }
        if c.is_whitespace() {
            continue;
        }
        if start.is_none() {
            start = Some(i);
        }
        last_end = i + c.len_utf8();
        if c == '`' {
            in_backtick = !in_backtick;
            continue;
        }
        if in_backtick {
            continue;
        }
        match c {
            '(' => paren_depth += 1,
            ')' => paren_depth = paren_depth.saturating_sub(1),
            '.' | '!' | '?' if paren_depth == 0 => {
                if c == '.' {
                    // version numbers and decimals
                    let prev_digit =
                        k > 0 && chars[k - 1].1.is_ascii_digit();
                    let next_digit =
                        chars.get(k + 1).is_some_and(|&(_, n)| n.is_ascii_digit());
                    if prev_digit && next_digit {
                        continue;
                    }
                    if ends_with_abbreviation(&text[..last_end]) {
                        continue;
                    }
                }
                // split when whitespace then an uppercase letter or a line
                // break follows
                let mut j = k + 1;
                let mut saw_ws = false;
                let splits = loop {
                    match chars.get(j) {
                        None => break false, // end of text closes anyway
                        Some(&(_, '\n')) => break true,
                        Some(&(_, n)) if n.is_whitespace() => {
                            saw_ws = true;
                            j += 1;
                        }
                        Some(&(_, n)) => break saw_ws && n.is_uppercase(),
                    }
                };
                if splits {
                    close(&mut sentences, &mut start, last_end);
                }
            }
            _ => {}
        }
    }
    close(&mut sentences, &mut start, last_end);
    SentenceList { sentences }
}
