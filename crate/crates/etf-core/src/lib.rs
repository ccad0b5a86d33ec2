//! Entity tracing for code-summary hallucination detection.
//!
//! The pipeline takes a Java snippet and a natural-language summary of it,
//! extracts entities from both sides, grounds summary entities in the code,
//! verifies the described intent of each grounded entity with a pluggable
//! judge, and aggregates the verdicts into a localized per-summary report.
//! Corpus-level evaluation (macro P/R/F1, Cohen's kappa, NER coverage,
//! per-model statistics) lives in [`eval`].

pub mod client;
pub mod code;
pub mod dataset;
pub mod eval;
pub mod matching;
pub mod pipeline;
pub mod prompts;
pub mod summary;
pub mod verify;

pub use code::{CodeEntity, CodeEntityKind, CodeEntitySet, ParseMode, SourceUnit};
pub use matching::{MatchOptions, MatchResult};
pub use summary::{EntityTag, Summary, SummaryEntity};
pub use verify::{InstanceLabel, SummaryReport, Verdict, VerdictLabel};
