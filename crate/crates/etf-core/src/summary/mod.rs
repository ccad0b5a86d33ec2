//! Summary-side entity extraction.
//!
//! Entities are pulled out of the natural-language summary by a pluggable
//! backend (a remote model or the deterministic heuristic in
//! [`heuristic`]), then run through a filtration step that drops fabricated
//! mentions and pins every survivor to its character spans.

mod heuristic;
mod ner;
mod sentences;

pub use heuristic::extract_entities_heuristic;
pub use ner::{
    extract_entities, filter_fabricated, parse_backend_entities, EntityExtractorBackend,
    FilterOptions, FiltrationResult, NerError, RawCandidate,
};
pub use sentences::{segment_sentences, Sentence, SentenceList};

use serde::{Deserialize, Serialize};

/// A generated code summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub id: String,
    pub text: String,
    /// Model that produced the summary, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_model: Option<String>,
}

impl Summary {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self { id: id.into(), text: text.into(), source_model: None }
    }

    pub fn with_model(mut self, model: impl Into<String>) -> Self {
        self.source_model = Some(model.into());
        self
    }
}

/// The 19-tag summary entity tagset: seven code tags and twelve
/// natural-language tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EntityTag {
    // code tags
    Class,
    Variable,
    Function,
    Library,
    Value,
    DataType,
    HtmlXmlTag,
    // natural-language tags
    Application,
    UiElement,
    Language,
    DataStructure,
    Algorithm,
    FileType,
    FileName,
    Version,
    Device,
    Os,
    Website,
    UserName,
}

impl EntityTag {
    /// True for the seven tags whose mentions must be grounded in code.
    pub fn is_code_tag(&self) -> bool {
        matches!(
            self,
            EntityTag::Class
                | EntityTag::Variable
                | EntityTag::Function
                | EntityTag::Library
                | EntityTag::Value
                | EntityTag::DataType
                | EntityTag::HtmlXmlTag
        )
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            EntityTag::Class => "CLASS",
            EntityTag::Variable => "VARIABLE",
            EntityTag::Function => "FUNCTION",
            EntityTag::Library => "LIBRARY",
            EntityTag::Value => "VALUE",
            EntityTag::DataType => "DATA_TYPE",
            EntityTag::HtmlXmlTag => "HTML_XML_TAG",
            EntityTag::Application => "APPLICATION",
            EntityTag::UiElement => "UI_ELEMENT",
            EntityTag::Language => "LANGUAGE",
            EntityTag::DataStructure => "DATA_STRUCTURE",
            EntityTag::Algorithm => "ALGORITHM",
            EntityTag::FileType => "FILE_TYPE",
            EntityTag::FileName => "FILE_NAME",
            EntityTag::Version => "VERSION",
            EntityTag::Device => "DEVICE",
            EntityTag::Os => "OS",
            EntityTag::Website => "WEBSITE",
            EntityTag::UserName => "USER_NAME",
        }
    }

    /// Parses a tag name, tolerating the spacing and separator variants
    /// model output drifts into (`DATA TYPE`, `data-type`, `HTML or XML
    /// TAG`). Unknown names yield `None` so callers can reject them.
    pub fn parse(raw: &str) -> Option<Self> {
        let folded: String =
            raw.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_uppercase();
        Some(match folded.as_str() {
            "CLASS" => EntityTag::Class,
            "VARIABLE" => EntityTag::Variable,
            "FUNCTION" | "METHOD" => EntityTag::Function,
            "LIBRARY" => EntityTag::Library,
            "VALUE" => EntityTag::Value,
            "DATATYPE" => EntityTag::DataType,
            "HTMLXMLTAG" | "HTMLORXMLTAG" => EntityTag::HtmlXmlTag,
            "APPLICATION" => EntityTag::Application,
            "UIELEMENT" => EntityTag::UiElement,
            "LANGUAGE" => EntityTag::Language,
            "DATASTRUCTURE" => EntityTag::DataStructure,
            "ALGORITHM" => EntityTag::Algorithm,
            "FILETYPE" => EntityTag::FileType,
            "FILENAME" => EntityTag::FileName,
            "VERSION" => EntityTag::Version,
            "DEVICE" => EntityTag::Device,
            "OS" => EntityTag::Os,
            "WEBSITE" => EntityTag::Website,
            "USERNAME" => EntityTag::UserName,
            _ => return None,
        })
    }
}

impl std::fmt::Display for EntityTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A byte range into the summary text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

/// A tagged mention extracted from the summary.
///
/// `spans` is empty on raw backend candidates and populated by
/// [`filter_fabricated`], after which the normalized surface occurs at every
/// recorded span.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryEntity {
    pub surface: String,
    pub tag: EntityTag,
    #[serde(default)]
    pub spans: Vec<Span>,
}

impl SummaryEntity {
    pub fn new(surface: impl Into<String>, tag: EntityTag) -> Self {
        Self { surface: surface.into(), tag, spans: Vec::new() }
    }
}
