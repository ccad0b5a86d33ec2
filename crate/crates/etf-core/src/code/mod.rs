//! Java code analysis: tokenization, lightweight parsing, and entity
//! extraction.
//!
//! The extractor classifies every named element of a snippet (classes,
//! methods, variables, imports, literals, type references, annotations,
//! keywords) so summary mentions can later be grounded against them. When
//! the snippet does not parse, extraction degrades to a lexical pass that
//! only distinguishes keywords, literals, and identifiers.

mod extract;
mod lexer;
mod parser;

pub use extract::extract_code_entities;
pub use lexer::{tokenize, LexDiagnostic, LexDiagnosticKind, Token, TokenCategory, TokenStream};
pub use parser::{
    parse, Body, CompilationUnit, FieldDecl, ImportDecl, LocalDecl, MethodDecl, NameRef, Param,
    ParseError, TypeDecl, TypeDeclKind, TypeRef,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Name of the synthetic class used to wrap isolated methods so they parse
/// as a compilation unit. Never reported as an entity.
pub(crate) const WRAPPER_CLASS_NAME: &str = "__Wrapper__";

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("source text is empty")]
    EmptySource,
}

/// A unit of Java source: a method, class fragment, or compilation unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceUnit {
    pub id: String,
    pub text: String,
}

impl SourceUnit {
    /// Rejects text that is empty after whitespace trimming.
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Result<Self, CodeError> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(CodeError::EmptySource);
        }
        Ok(Self { id: id.into(), text })
    }
}

/// Role of a named element in the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CodeEntityKind {
    Class,
    Function,
    Variable,
    Library,
    Value,
    DataType,
    Annotation,
    Keyword,
}

impl CodeEntityKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CodeEntityKind::Class => "CLASS",
            CodeEntityKind::Function => "FUNCTION",
            CodeEntityKind::Variable => "VARIABLE",
            CodeEntityKind::Library => "LIBRARY",
            CodeEntityKind::Value => "VALUE",
            CodeEntityKind::DataType => "DATA_TYPE",
            CodeEntityKind::Annotation => "ANNOTATION",
            CodeEntityKind::Keyword => "KEYWORD",
        }
    }
}

impl std::fmt::Display for CodeEntityKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A named program element extracted from source.
///
/// An identifier used in multiple roles yields one record per role, so
/// `(name, kind)` is the identity of a record within a [`CodeEntitySet`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeEntity {
    /// Exact identifier or literal text as it appears in source.
    pub name: String,
    pub kind: CodeEntityKind,
    /// 1-based line of the first occurrence.
    pub line: usize,
    /// 1-based column of the first occurrence.
    pub column: usize,
    pub occurrences: usize,
}

/// How a [`CodeEntitySet`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ParseMode {
    FullAst,
    LexicalFallback,
}

/// All entities extracted from one source unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeEntitySet {
    pub unit_id: String,
    pub entities: Vec<CodeEntity>,
    pub parse_mode: ParseMode,
}

impl CodeEntitySet {
    /// All records with the given exact name, in document order.
    pub fn by_name<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a CodeEntity> + 'a {
        self.entities.iter().filter(move |e| e.name == name)
    }

    pub fn contains(&self, name: &str, kind: CodeEntityKind) -> bool {
        self.entities.iter().any(|e| e.name == name && e.kind == kind)
    }
}
