//! Backend-facing extraction and the fabrication filter.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{EntityTag, Span, Summary, SummaryEntity};
use crate::matching::normalize;

#[derive(Debug, Error)]
pub enum NerError {
    #[error("entity extraction backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("malformed backend output: {detail}")]
    MalformedBackendOutput { detail: String },
}

/// Source of raw summary-entity candidates. Implementations may call out to
/// a model or run entirely offline.
pub trait EntityExtractorBackend: Sync {
    fn extract(&self, summary: &Summary) -> Result<Vec<SummaryEntity>, NerError>;
}

/// A candidate as parsed from backend output, before span validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawCandidate {
    pub surface: String,
    pub tag: String,
}

/// Parses model NER output. Accepts the line-oriented `entity ||| TAG`
/// template as well as a JSON list of objects, since models drift between
/// the two. Lines or items with unknown tags are rejected (returned
/// separately), not silently retagged.
pub fn parse_backend_entities(
    raw: &str,
) -> Result<(Vec<SummaryEntity>, Vec<RawCandidate>), NerError> {
    let trimmed = raw.trim();
    if trimmed.is_empty() || trimmed == "[]" {
        return Ok((Vec::new(), Vec::new()));
    }

    if trimmed.starts_with('[') || trimmed.starts_with('{') {
        if let Ok(value) = serde_json::from_str::<serde_json::Value>(trimmed) {
            return parse_json_entities(&value);
        }
    }

    let mut kept = Vec::new();
    let mut rejected = Vec::new();
    let mut any_line = false;
    for line in trimmed.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let Some((surface, tag)) = line.split_once("|||") else {
            continue;
        };
        any_line = true;
        let surface = surface.trim();
        match EntityTag::parse(tag.trim()) {
            Some(tag) if !surface.is_empty() => kept.push(SummaryEntity::new(surface, tag)),
            _ => rejected
                .push(RawCandidate { surface: surface.to_string(), tag: tag.trim().to_string() }),
        }
    }
    if !any_line {
        return Err(NerError::MalformedBackendOutput {
            detail: format!("no `entity ||| TAG` lines or JSON list found in {trimmed:?}"),
        });
    }
    Ok((kept, rejected))
}

fn parse_json_entities(
    value: &serde_json::Value,
) -> Result<(Vec<SummaryEntity>, Vec<RawCandidate>), NerError> {
    let items = value.as_array().ok_or_else(|| NerError::MalformedBackendOutput {
        detail: "JSON output is not a list".to_string(),
    })?;
    let mut kept = Vec::new();
    let mut rejected = Vec::new();
    for item in items {
        let Some(obj) = item.as_object() else {
            return Err(NerError::MalformedBackendOutput {
                detail: format!("non-object item in JSON list: {item}"),
            });
        };
        let surface = ["entity", "entity_name", "name", "surface"]
            .iter()
            .find_map(|k| obj.get(*k).and_then(|v| v.as_str()));
        let tag = ["type", "entity_type", "tag", "label"]
            .iter()
            .find_map(|k| obj.get(*k).and_then(|v| v.as_str()));
        let (Some(surface), Some(tag)) = (surface, tag) else {
            return Err(NerError::MalformedBackendOutput {
                detail: format!("item missing entity/type fields: {item}"),
            });
        };
        match EntityTag::parse(tag) {
            Some(parsed) if !surface.trim().is_empty() => {
                kept.push(SummaryEntity::new(surface.trim(), parsed))
            }
            _ => rejected
                .push(RawCandidate { surface: surface.to_string(), tag: tag.to_string() }),
        }
    }
    Ok((kept, rejected))
}

/// Runs the backend, retrying on malformed output up to `max_retries`
/// additional attempts before surfacing the error. Spans are not validated
/// here; that is the filtration step's job.
pub fn extract_entities(
    summary: &Summary,
    backend: &dyn EntityExtractorBackend,
    max_retries: usize,
) -> Result<Vec<SummaryEntity>, NerError> {
    let mut last_err = None;
    for _ in 0..=max_retries {
        match backend.extract(summary) {
            Ok(entities) => return Ok(entities),
            Err(e @ NerError::MalformedBackendOutput { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt"))
}

/// Surfaces that double as ordinary English words. They are kept only when
/// the summary sets them off as code (backticks, quotes, or parentheses).
const POLYSEMOUS_SURFACES: &[&str] = &[
    "a", "an", "and", "class", "do", "else", "for", "get", "if", "in", "is", "it", "list",
    "method", "new", "not", "object", "of", "or", "set", "the", "this", "to", "value", "while",
];

#[derive(Debug, Clone, Copy, Default)]
pub struct FilterOptions {
    /// Match surfaces case-insensitively. Java identifiers are
    /// case-sensitive, so this is off by default.
    pub case_insensitive: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FiltrationResult {
    /// Candidates whose normalized surface occurs in the summary, with all
    /// occurrence spans recorded.
    pub kept: Vec<SummaryEntity>,
    /// Candidates that do not occur in the summary text at all.
    pub fabricated: Vec<SummaryEntity>,
    /// Polysemous bare words dropped because nothing marks them as code.
    pub suppressed: Vec<SummaryEntity>,
}

fn find_occurrences(text: &str, needle: &str, case_insensitive: bool) -> Vec<Span> {
    if needle.is_empty() {
        return Vec::new();
    }
    let (haystack, needle_cmp) = if case_insensitive {
        (text.to_lowercase(), needle.to_lowercase())
    } else {
        (text.to_string(), needle.to_string())
    };
    // lowercasing can change byte lengths for non-ASCII text; fall back to
    // exact matching when it does
    let haystack = if haystack.len() == text.len() { haystack } else { text.to_string() };
    let mut spans = Vec::new();
    let mut from = 0;
    while let Some(idx) = haystack[from..].find(&needle_cmp) {
        let start = from + idx;
        spans.push(Span { start, end: start + needle_cmp.len() });
        from = start + 1;
    }
    spans
}

/// True when some occurrence is set off as code: fenced by backticks or
/// quotes, or enclosed in parentheses.
fn marked_as_code(text: &str, spans: &[Span]) -> bool {
    const OPENERS: &[char] = &['`', '"', '\'', '(', '\u{2018}', '\u{201C}'];
    const CLOSERS: &[char] = &['`', '"', '\'', ')', '\u{2019}', '\u{201D}'];
    spans.iter().any(|span| {
        let before = text[..span.start].chars().next_back();
        let after = text[span.end..].chars().next();
        before.is_some_and(|c| OPENERS.contains(&c)) || after.is_some_and(|c| CLOSERS.contains(&c))
    })
}

/// Drops candidates whose normalized surface does not occur in the summary
/// (fabricated) and bare polysemous words, recording every occurrence span
/// for the survivors. Deduplicates on (normalized surface, tag). Idempotent.
pub fn filter_fabricated(
    candidates: &[SummaryEntity],
    summary: &Summary,
    options: FilterOptions,
) -> FiltrationResult {
    let mut result = FiltrationResult::default();
    let mut seen: Vec<(String, EntityTag)> = Vec::new();
    for candidate in candidates {
        let surface = normalize(&candidate.surface);
        if surface.is_empty() {
            result.fabricated.push(candidate.clone());
            continue;
        }
        let key = (surface.clone(), candidate.tag);
        if seen.contains(&key) {
            continue;
        }
        seen.push(key);
        let spans = find_occurrences(&summary.text, &surface, options.case_insensitive);
        if spans.is_empty() {
            result.fabricated.push(candidate.clone());
            continue;
        }
        let raw_was_marked = candidate.surface.trim() != surface;
        if POLYSEMOUS_SURFACES.contains(&surface.to_lowercase().as_str())
            && !raw_was_marked
            && !marked_as_code(&summary.text, &spans)
        {
            result.suppressed.push(SummaryEntity { surface, tag: candidate.tag, spans });
            continue;
        }
        result.kept.push(SummaryEntity { surface, tag: candidate.tag, spans });
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(text: &str) -> Summary {
        Summary::new("s", text)
    }

    #[test]
    fn normalized_call_suffix_is_kept() {
        let result = filter_fabricated(
            &[SummaryEntity::new("getJobID()", EntityTag::Function)],
            &summary("The method getJobID returns -1."),
            FilterOptions::default(),
        );
        assert_eq!(result.kept.len(), 1);
        let e = &result.kept[0];
        assert_eq!(e.surface, "getJobID");
        assert_eq!(e.spans, vec![Span { start: 11, end: 19 }]);
    }

    #[test]
    fn absent_candidate_is_fabricated() {
        let result = filter_fabricated(
            &[SummaryEntity::new("DatabaseManager", EntityTag::Class)],
            &summary("The method stores a value."),
            FilterOptions::default(),
        );
        assert!(result.kept.is_empty());
        assert_eq!(result.fabricated[0].surface, "DatabaseManager");
    }

    #[test]
    fn backticked_occurrence_is_found() {
        let result = filter_fabricated(
            &[SummaryEntity::new("`jedis`", EntityTag::Variable)],
            &summary("returns the `jedis` object to the pool"),
            FilterOptions::default(),
        );
        assert_eq!(result.kept.len(), 1);
        assert_eq!(result.kept[0].surface, "jedis");
    }

    #[test]
    fn all_occurrences_are_recorded() {
        let result = filter_fabricated(
            &[SummaryEntity::new("ps", EntityTag::Variable)],
            &summary("sets ps and returns ps"),
            FilterOptions::default(),
        );
        assert_eq!(result.kept[0].spans.len(), 2);
    }

    #[test]
    fn case_sensitivity_is_configurable() {
        let cands = [SummaryEntity::new("getjobid", EntityTag::Function)];
        let text = summary("calls getJobID here");
        let strict = filter_fabricated(&cands, &text, FilterOptions::default());
        assert!(strict.kept.is_empty());
        let lenient = filter_fabricated(&cands, &text, FilterOptions { case_insensitive: true });
        assert_eq!(lenient.kept.len(), 1);
    }

    #[test]
    fn bare_polysemous_word_is_suppressed() {
        let cands = [SummaryEntity::new("list", EntityTag::DataStructure)];
        let bare = filter_fabricated(&cands, &summary("adds it to the list"), FilterOptions::default());
        assert!(bare.kept.is_empty());
        assert_eq!(bare.suppressed.len(), 1);
        let quoted =
            filter_fabricated(&cands, &summary("adds it to the `list`"), FilterOptions::default());
        assert_eq!(quoted.kept.len(), 1);
    }

    #[test]
    fn filtration_is_idempotent() {
        let cands = [
            SummaryEntity::new("getJobID()", EntityTag::Function),
            SummaryEntity::new("missing", EntityTag::Variable),
        ];
        let text = summary("The method getJobID returns -1.");
        let once = filter_fabricated(&cands, &text, FilterOptions::default());
        let twice = filter_fabricated(&once.kept, &text, FilterOptions::default());
        assert_eq!(once.kept, twice.kept);
        assert!(twice.fabricated.is_empty());
    }

    #[test]
    fn duplicate_candidates_collapse() {
        let cands = [
            SummaryEntity::new("jobName", EntityTag::Variable),
            SummaryEntity::new("`jobName`", EntityTag::Variable),
        ];
        let result =
            filter_fabricated(&cands, &summary("takes jobName as input"), FilterOptions::default());
        assert_eq!(result.kept.len(), 1);
    }

    #[test]
    fn line_template_parses() {
        let (kept, rejected) = parse_backend_entities(
            "getJobID() ||| FUNCTION\njobName ||| VARIABLE\nint16 ||| DATA TYPE\nweird ||| NOPE",
        )
        .unwrap();
        let got: Vec<(&str, EntityTag)> =
            kept.iter().map(|e| (e.surface.as_str(), e.tag)).collect();
        assert_eq!(
            got,
            vec![
                ("getJobID()", EntityTag::Function),
                ("jobName", EntityTag::Variable),
                ("int16", EntityTag::DataType),
            ]
        );
        assert_eq!(rejected.len(), 1);
        assert_eq!(rejected[0].tag, "NOPE");
    }

    #[test]
    fn json_list_parses() {
        let (kept, _) = parse_backend_entities(
            r#"[{"entity": "ColumnInt16", "type": "CLASS"}, {"entity_name": "int16", "entity_type": "DATA TYPE"}]"#,
        )
        .unwrap();
        assert_eq!(kept.len(), 2);
        assert_eq!(kept[1].tag, EntityTag::DataType);
    }

    #[test]
    fn empty_list_yields_nothing() {
        let (kept, rejected) = parse_backend_entities("[]").unwrap();
        assert!(kept.is_empty() && rejected.is_empty());
    }

    #[test]
    fn prose_response_is_malformed() {
        let err = parse_backend_entities("Sure! Here are the entities I found.").unwrap_err();
        assert!(matches!(err, NerError::MalformedBackendOutput { .. }));
    }

    #[test]
    fn retries_then_surfaces_malformed() {
        struct Flaky(std::sync::atomic::AtomicUsize);
        impl EntityExtractorBackend for Flaky {
            fn extract(&self, _: &Summary) -> Result<Vec<SummaryEntity>, NerError> {
                let n = self.0.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if n < 2 {
                    Err(NerError::MalformedBackendOutput { detail: "noise".into() })
                } else {
                    Ok(vec![SummaryEntity::new("x", EntityTag::Variable)])
                }
            }
        }
        let backend = Flaky(Default::default());
        let got = extract_entities(&summary("x"), &backend, 3).unwrap();
        assert_eq!(got.len(), 1);

        let strict = Flaky(Default::default());
        let err = extract_entities(&summary("x"), &strict, 1).unwrap_err();
        assert!(matches!(err, NerError::MalformedBackendOutput { .. }));
    }
}
