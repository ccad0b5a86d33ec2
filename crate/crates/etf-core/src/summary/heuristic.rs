//! Deterministic rule-based entity extraction.
//!
//! An offline stand-in for the model-backed extractor: backtick and quoted
//! spans, code-shaped tokens (camelCase, snake_case, trailing `()`/`[]`),
//! dotted paths, and numbers. Tags come from token shape alone, so this
//! backend never emits natural-language tags.

use super::{EntityTag, Summary, SummaryEntity};

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$' || c == '.'
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_' || c == '$')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$')
}

fn is_number(s: &str) -> bool {
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    !digits.is_empty()
        && digits.chars().all(|c| c.is_ascii_digit() || c == '.')
        && digits.chars().any(|c| c.is_ascii_digit())
        && digits.matches('.').count() <= 1
        && !digits.starts_with('.')
        && !digits.ends_with('.')
}

fn has_camel_hump(s: &str) -> bool {
    s.as_bytes().windows(2).any(|w| w[0].is_ascii_lowercase() && w[1].is_ascii_uppercase())
}

fn is_snake_case(s: &str) -> bool {
    s.as_bytes()
        .windows(3)
        .any(|w| w[1] == b'_' && w[0].is_ascii_alphanumeric() && w[2].is_ascii_alphanumeric())
}

fn is_all_caps(s: &str) -> bool {
    s.len() >= 2
        && s.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
        && s.chars().any(|c| c.is_ascii_uppercase())
}

/// Dotted path of identifier segments, at least one of them longer than a
/// single letter (keeps `e.g.` out).
fn is_dotted_path(s: &str) -> bool {
    let segments: Vec<&str> = s.split('.').collect();
    segments.len() >= 2
        && segments.iter().all(|seg| is_identifier(seg))
        && segments.iter().any(|seg| seg.len() >= 2)
}

/// Shape classification for a bare (unquoted) token. `None` means the token
/// is not code-shaped enough to extract from running prose.
fn classify_bare(token: &str) -> Option<EntityTag> {
    if is_number(token) {
        return Some(EntityTag::Value);
    }
    if is_dotted_path(token) {
        return Some(EntityTag::Library);
    }
    if !is_identifier(token) {
        return None;
    }
    if is_all_caps(token) || token.starts_with('_') {
        return Some(EntityTag::Variable);
    }
    if has_camel_hump(token) {
        let first_upper = token.chars().next().is_some_and(|c| c.is_ascii_uppercase());
        return Some(if first_upper { EntityTag::Class } else { EntityTag::Variable });
    }
    if is_snake_case(token) {
        return Some(EntityTag::Variable);
    }
    None
}

/// Classification for quoted/backticked content, which is trusted to be a
/// deliberate code mention even without a distinctive shape.
fn classify_quoted(token: &str) -> Option<EntityTag> {
    if let Some(tag) = classify_bare(token) {
        return Some(tag);
    }
    if is_number(token) {
        return Some(EntityTag::Value);
    }
    if is_identifier(token) {
        let first_upper = token.chars().next().is_some_and(|c| c.is_ascii_uppercase());
        return Some(if first_upper { EntityTag::Class } else { EntityTag::Variable });
    }
    None
}

/// Strips one trailing `()` or `[]`, returning the bare name and the tag the
/// suffix implies.
fn split_suffix(token: &str) -> (&str, Option<EntityTag>) {
    if let Some(bare) = token.strip_suffix("()") {
        (bare, Some(EntityTag::Function))
    } else if let Some(bare) = token.strip_suffix("[]") {
        (bare, Some(EntityTag::Variable))
    } else {
        (token, None)
    }
}

struct Candidates {
    out: Vec<SummaryEntity>,
}

impl Candidates {
    fn push(&mut self, surface: &str, tag: EntityTag) {
        if surface.is_empty() {
            return;
        }
        if self.out.iter().any(|e| e.surface == surface) {
            return;
        }
        self.out.push(SummaryEntity::new(surface, tag));
    }
}

fn delimited_spans(text: &str, open: char, close: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut rest = text;
    loop {
        let Some(s) = rest.find(open) else { break };
        let after = &rest[s + open.len_utf8()..];
        let Some(e) = after.find(close) else { break };
        out.push(&after[..e]);
        rest = &after[e + close.len_utf8()..];
    }
    out
}

/// Rule-based extraction over the summary text. Deterministic and pure.
pub fn extract_entities_heuristic(summary: &Summary) -> Vec<SummaryEntity> {
    let text = &summary.text;
    let mut candidates = Candidates { out: Vec::new() };

    // delimited mentions first: they are deliberate and carry the most signal
    for (open, close) in [('`', '`'), ('"', '"'), ('\u{2018}', '\u{2019}'), ('\u{201C}', '\u{201D}')]
    {
        for span in delimited_spans(text, open, close) {
            let token = span.trim();
            if token.contains(char::is_whitespace) {
                continue;
            }
            let (bare, suffix_tag) = split_suffix(token);
            if let Some(tag) = suffix_tag.or_else(|| classify_quoted(bare)) {
                candidates.push(bare, tag);
            }
        }
    }

    // bare code-shaped tokens
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < text.len() {
        if !is_word_char(bytes[i] as char) {
            i += 1;
            continue;
        }
        let start = i;
        while i < text.len() && is_word_char(bytes[i] as char) {
            i += 1;
        }
        let mut end = i;
        // attach a trailing call or index suffix
        if text[end..].starts_with("()") || text[end..].starts_with("[]") {
            end += 2;
            i = end;
        }
        let mut word = &text[start..end];
        // leading/trailing dots are sentence punctuation, not path separators
        word = word.trim_matches('.');
        if word.is_empty() {
            continue;
        }
        let (bare, suffix_tag) = split_suffix(word);
        let bare = bare.trim_matches('.');
        if let Some(tag) = suffix_tag {
            if is_identifier(bare) || is_dotted_path(bare) {
                candidates.push(bare, tag);
            }
            continue;
        }
        if is_number(bare) {
            // fold a directly attached minus sign into the value
            let prev = text[..start].chars().next_back();
            let before_prev = text[..start.saturating_sub(1)].chars().next_back();
            let surface = if prev == Some('-')
                && before_prev.is_none_or(|c| c.is_whitespace() || c == '(' || c == '"' || c == '`')
            {
                format!("-{bare}")
            } else {
                bare.to_string()
            };
            candidates.push(&surface, EntityTag::Value);
            continue;
        }
        if let Some(tag) = classify_bare(bare) {
            candidates.push(bare, tag);
        }
    }

    candidates.out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heuristic(text: &str) -> Vec<(String, EntityTag)> {
        extract_entities_heuristic(&Summary::new("s", text))
            .into_iter()
            .map(|e| (e.surface, e.tag))
            .collect()
    }

    #[test]
    fn pascal_case_object_is_class() {
        let got = heuristic("creates a new ColumnInt16 object");
        assert!(got.contains(&("ColumnInt16".to_string(), EntityTag::Class)));
    }

    #[test]
    fn call_suffix_and_camel_case() {
        let got = heuristic("calls getJobID() with jobName");
        assert!(got.contains(&("getJobID".to_string(), EntityTag::Function)));
        assert!(got.contains(&("jobName".to_string(), EntityTag::Variable)));
    }

    #[test]
    fn plain_prose_yields_nothing() {
        assert!(heuristic("this method returns a value").is_empty());
    }

    #[test]
    fn quoted_and_backticked_mentions() {
        let got = heuristic("stores the \"jobStatus\" in a variable and returns the `jedis` object");
        assert!(got.contains(&("jobStatus".to_string(), EntityTag::Variable)));
        assert!(got.contains(&("jedis".to_string(), EntityTag::Variable)));
    }

    #[test]
    fn dotted_paths_become_libraries() {
        let got = heuristic("imports java.util.List for the list");
        assert!(got.contains(&("java.util.List".to_string(), EntityTag::Library)));
    }

    #[test]
    fn numbers_and_negative_values() {
        let got = heuristic("the method simply returns -1 or 16 on success");
        assert!(got.contains(&("-1".to_string(), EntityTag::Value)));
        assert!(got.contains(&("16".to_string(), EntityTag::Value)));
    }

    #[test]
    fn abbreviations_are_not_paths() {
        let got = heuristic("e.g. the value, i.e. the result");
        assert!(got.is_empty());
    }

    #[test]
    fn snake_case_and_underscore_prefix() {
        let got = heuristic("updates _offset and row_count fields");
        assert!(got.contains(&("_offset".to_string(), EntityTag::Variable)));
        assert!(got.contains(&("row_count".to_string(), EntityTag::Variable)));
    }

    #[test]
    fn never_emits_natural_language_tags() {
        let got = heuristic(
            "Written in Java 1.8, parses config.xml with XmlParser and calls getData() storing MAX_SIZE",
        );
        assert!(got.iter().all(|(_, tag)| tag.is_code_tag()));
    }

    #[test]
    fn deterministic() {
        let text = "calls getJobID() with `jobName` and returns -1";
        assert_eq!(heuristic(text), heuristic(text));
    }
}
