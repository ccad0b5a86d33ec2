//! Java lexer.
//!
//! Total over arbitrary input: every byte of the source lands in exactly one
//! token, so concatenating token texts with the original inter-token
//! whitespace reconstructs the source. Comments are kept as tokens (they are
//! inspected downstream) but never become entities. Malformed constructs are
//! reported as diagnostics and lexing resumes after the offending line.

use serde::{Deserialize, Serialize};

/// Java reserved words. `true`, `false`, and `null` are classified as
/// literals, matching their role as values.
pub(crate) const JAVA_KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "final", "finally", "float",
    "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "return", "short", "static",
    "strictfp", "super", "switch", "synchronized", "this", "throw", "throws", "transient", "try",
    "void", "volatile", "while",
];

pub(crate) fn is_java_keyword(word: &str) -> bool {
    JAVA_KEYWORDS.binary_search(&word).is_ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenCategory {
    Identifier,
    Keyword,
    Literal,
    Operator,
    Separator,
    Comment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub category: TokenCategory,
    /// 1-based line of the first character.
    pub line: usize,
    /// 1-based column of the first character.
    pub column: usize,
    /// Byte offset into the source.
    pub offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexDiagnosticKind {
    UnterminatedString,
    UnterminatedComment,
    UnterminatedChar,
}

/// A recoverable problem found while lexing, anchored to the opening
/// character of the offending construct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexDiagnostic {
    pub kind: LexDiagnosticKind,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenStream {
    pub tokens: Vec<Token>,
    pub diagnostics: Vec<LexDiagnostic>,
}

impl TokenStream {
    /// Tokens that participate in parsing (everything but comments).
    pub fn significant(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(|t| t.category != TokenCategory::Comment)
    }
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphanumeric()
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: usize,
    column: usize,
    tokens: Vec<Token>,
    diagnostics: Vec<LexDiagnostic>,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            line: 1,
            column: 1,
            tokens: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn push(&mut self, start: usize, line: usize, column: usize, category: TokenCategory) {
        self.tokens.push(Token {
            text: self.src[start..self.pos].to_string(),
            category,
            line,
            column,
            offset: start,
        });
    }

    fn run(mut self) -> TokenStream {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            let (start, line, column) = (self.pos, self.line, self.column);
            if is_ident_start(c) {
                self.lex_word(start, line, column);
            } else if c.is_ascii_digit() {
                self.lex_number(start, line, column);
            } else if c == '"' {
                self.lex_string(start, line, column);
            } else if c == '\'' {
                self.lex_char(start, line, column);
            } else if c == '/' && self.peek_at(1) == Some('/') {
                self.lex_line_comment(start, line, column);
            } else if c == '/' && self.peek_at(1) == Some('*') {
                self.lex_block_comment(start, line, column);
            } else if c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) {
                self.lex_number(start, line, column);
            } else {
                self.lex_symbol(start, line, column);
            }
        }
        TokenStream { tokens: self.tokens, diagnostics: self.diagnostics }
    }

    fn lex_word(&mut self, start: usize, line: usize, column: usize) {
        while self.peek().is_some_and(is_ident_char) {
            self.bump();
        }
        let text = &self.src[start..self.pos];
        let category = if is_java_keyword(text) {
            TokenCategory::Keyword
        } else if text == "true" || text == "false" || text == "null" {
            TokenCategory::Literal
        } else {
            TokenCategory::Identifier
        };
        self.push(start, line, column, category);
    }

    fn lex_number(&mut self, start: usize, line: usize, column: usize) {
        if self.peek() == Some('0')
            && self.peek_at(1).is_some_and(|c| matches!(c, 'x' | 'X' | 'b' | 'B'))
        {
            self.bump();
            self.bump();
            while self.peek().is_some_and(|c| c.is_ascii_hexdigit() || c == '_') {
                self.bump();
            }
        } else {
            while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '_') {
                self.bump();
            }
            if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '_') {
                    self.bump();
                }
            }
            if self.peek().is_some_and(|c| matches!(c, 'e' | 'E')) {
                let mut ahead = 1;
                if self.peek_at(1).is_some_and(|c| matches!(c, '+' | '-')) {
                    ahead = 2;
                }
                if self.peek_at(ahead).is_some_and(|c| c.is_ascii_digit()) {
                    for _ in 0..=ahead {
                        self.bump();
                    }
                    while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '_') {
                        self.bump();
                    }
                }
            }
        }
        if self.peek().is_some_and(|c| matches!(c, 'l' | 'L' | 'f' | 'F' | 'd' | 'D')) {
            self.bump();
        }
        self.push(start, line, column, TokenCategory::Literal);
    }

    fn lex_string(&mut self, start: usize, line: usize, column: usize) {
        self.bump(); // opening quote
        loop {
            match self.peek() {
                None | Some('\n') => {
                    self.diagnostics.push(LexDiagnostic {
                        kind: LexDiagnosticKind::UnterminatedString,
                        line,
                        column,
                    });
                    break;
                }
                Some('\\') => {
                    self.bump();
                    if self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                Some('"') => {
                    self.bump();
                    break;
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
        self.push(start, line, column, TokenCategory::Literal);
    }

    fn lex_char(&mut self, start: usize, line: usize, column: usize) {
        self.bump(); // opening quote
        loop {
            match self.peek() {
                None | Some('\n') => {
                    self.diagnostics.push(LexDiagnostic {
                        kind: LexDiagnosticKind::UnterminatedChar,
                        line,
                        column,
                    });
                    break;
                }
                Some('\\') => {
                    self.bump();
                    if self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                Some('\'') => {
                    self.bump();
                    break;
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
        self.push(start, line, column, TokenCategory::Literal);
    }

    fn lex_line_comment(&mut self, start: usize, line: usize, column: usize) {
        while self.peek().is_some_and(|c| c != '\n') {
            self.bump();
        }
        self.push(start, line, column, TokenCategory::Comment);
    }

    fn lex_block_comment(&mut self, start: usize, line: usize, column: usize) {
        self.bump();
        self.bump();
        let mut closed = false;
        while let Some(c) = self.peek() {
            if c == '*' && self.peek_at(1) == Some('/') {
                self.bump();
                self.bump();
                closed = true;
                break;
            }
            self.bump();
        }
        if !closed {
            self.diagnostics.push(LexDiagnostic {
                kind: LexDiagnosticKind::UnterminatedComment,
                line,
                column,
            });
        }
        self.push(start, line, column, TokenCategory::Comment);
    }

    fn lex_symbol(&mut self, start: usize, line: usize, column: usize) {
        let c = self.bump().expect("symbol char present");
        let category = match c {
            '(' | ')' | '{' | '}' | '[' | ']' | ';' | ',' | '@' => TokenCategory::Separator,
            '.' => {
                // varargs `...`
                if self.peek() == Some('.') && self.peek_at(1) == Some('.') {
                    self.bump();
                    self.bump();
                }
                TokenCategory::Separator
            }
            ':' => {
                if self.peek() == Some(':') {
                    self.bump();
                    TokenCategory::Separator
                } else {
                    TokenCategory::Operator
                }
            }
            // `>` never combines, so nested generic closers like `>>` stay
            // splittable without parser-side token surgery.
            '>' => TokenCategory::Operator,
            _ => {
                let rest: &[&str] = match c {
                    '=' => &["="],
                    '!' => &["="],
                    '<' => &["<=", "<", "="],
                    '&' => &["&=", "&", "="],
                    '|' => &["|=", "|", "="],
                    '+' => &["+", "="],
                    '-' => &["-", "=", ">"],
                    '*' => &["="],
                    '/' => &["="],
                    '%' => &["="],
                    '^' => &["="],
                    _ => &[],
                };
                for suffix in rest {
                    if self.src[self.pos..].starts_with(suffix) {
                        for _ in 0..suffix.chars().count() {
                            self.bump();
                        }
                        break;
                    }
                }
                TokenCategory::Operator
            }
        };
        self.push(start, line, column, category);
    }
}

/// Tokenize Java source. Never fails: malformed constructs produce
/// diagnostics and lexing continues.
pub fn tokenize(source: &str) -> TokenStream {
    Lexer::new(source).run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cats(stream: &TokenStream) -> Vec<(TokenCategory, &str)> {
        stream.tokens.iter().map(|t| (t.category, t.text.as_str())).collect()
    }

    /// Every token slice matches the source at its offset, and everything
    /// between tokens is whitespace.
    fn assert_round_trip(src: &str, stream: &TokenStream) {
        let mut cursor = 0;
        for t in &stream.tokens {
            assert!(
                src[cursor..t.offset].chars().all(char::is_whitespace),
                "non-whitespace gap before token {:?}",
                t
            );
            assert_eq!(&src[t.offset..t.offset + t.text.len()], t.text, "token text mismatch");
            cursor = t.offset + t.text.len();
        }
        assert!(src[cursor..].chars().all(char::is_whitespace));
    }

    #[test]
    fn keyword_only_fragment() {
        let stream = tokenize("return this;");
        assert_eq!(
            cats(&stream),
            vec![
                (TokenCategory::Keyword, "return"),
                (TokenCategory::Keyword, "this"),
                (TokenCategory::Separator, ";"),
            ]
        );
    }

    #[test]
    fn minimal_declaration() {
        let stream = tokenize("int x = 16;");
        assert_eq!(
            cats(&stream),
            vec![
                (TokenCategory::Keyword, "int"),
                (TokenCategory::Identifier, "x"),
                (TokenCategory::Operator, "="),
                (TokenCategory::Literal, "16"),
                (TokenCategory::Separator, ";"),
            ]
        );
    }

    #[test]
    fn example_method_identifiers() {
        let src = "ColumnInt16 column = new ColumnInt16(_columns.size(), name, _offset);";
        let stream = tokenize(src);
        let idents: Vec<&str> = stream
            .tokens
            .iter()
            .filter(|t| t.category == TokenCategory::Identifier)
            .map(|t| t.text.as_str())
            .collect();
        assert!(idents.contains(&"ColumnInt16"));
        assert!(idents.contains(&"_offset"));
        assert!(!stream.tokens.iter().any(|t| t.category == TokenCategory::Literal));
        assert_round_trip(src, &stream);
    }

    #[test]
    fn comments_are_tokens() {
        let src = "int a; // trailing\n/* block */ int b;";
        let stream = tokenize(src);
        let comments: Vec<&str> = stream
            .tokens
            .iter()
            .filter(|t| t.category == TokenCategory::Comment)
            .map(|t| t.text.as_str())
            .collect();
        assert_eq!(comments, vec!["// trailing", "/* block */"]);
        assert_round_trip(src, &stream);
    }

    #[test]
    fn unterminated_string_recovers_on_next_line() {
        let src = "String s = \"oops;\nint x = 1;";
        let stream = tokenize(src);
        assert_eq!(stream.diagnostics.len(), 1);
        let d = &stream.diagnostics[0];
        assert_eq!(d.kind, LexDiagnosticKind::UnterminatedString);
        assert_eq!((d.line, d.column), (1, 12));
        // the second line still lexes
        assert!(stream.tokens.iter().any(|t| t.text == "x"));
        assert_round_trip(src, &stream);
    }

    #[test]
    fn unterminated_block_comment() {
        let src = "int a; /* never closed";
        let stream = tokenize(src);
        assert_eq!(stream.diagnostics.len(), 1);
        assert_eq!(stream.diagnostics[0].kind, LexDiagnosticKind::UnterminatedComment);
        assert_eq!((stream.diagnostics[0].line, stream.diagnostics[0].column), (1, 8));
        assert_round_trip(src, &stream);
    }

    #[test]
    fn string_escapes_and_numbers() {
        let src = r#"p = Pattern.compile("([\\w]+)[;]*"); double d = 1.5e-3; long n = 0xFF_EC L;"#;
        let stream = tokenize(src);
        let lits: Vec<&str> = stream
            .tokens
            .iter()
            .filter(|t| t.category == TokenCategory::Literal)
            .map(|t| t.text.as_str())
            .collect();
        assert_eq!(lits, vec![r#""([\\w]+)[;]*""#, "1.5e-3", "0xFF_EC", "L"]);
        assert_round_trip(src, &stream);
    }

    #[test]
    fn gt_never_combines() {
        let stream = tokenize("Map<String, List<Integer>> m; int s = a >> 2;");
        let ops: Vec<&str> = stream
            .tokens
            .iter()
            .filter(|t| t.category == TokenCategory::Operator)
            .map(|t| t.text.as_str())
            .collect();
        assert_eq!(ops, vec!["<", "<", ">", ">", "=", ">", ">"]);
    }

    proptest! {
        #[test]
        fn round_trip_arbitrary_input(src in "[ -~\n\t]{0,200}") {
            let stream = tokenize(&src);
            assert_round_trip(&src, &stream);
        }

        #[test]
        fn positions_are_consistent(src in "[a-zA-Z0-9_$ .;(){}\"'/*\n]{0,200}") {
            let stream = tokenize(&src);
            for t in &stream.tokens {
                let upto = &src[..t.offset];
                let line = upto.matches('\n').count() + 1;
                let column = upto.chars().rev().take_while(|&c| c != '\n').count() + 1;
                prop_assert_eq!((t.line, t.column), (line, column));
            }
        }
    }
}
