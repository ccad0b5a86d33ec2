//! Code entity extraction.
//!
//! Combines a token-level pass (keywords, literal values) with a walk over
//! the parsed declaration structure. When parsing fails the extractor
//! degrades to a lexical pass that only distinguishes keywords, literals,
//! and identifiers, so every non-empty snippet yields a usable entity set.

use std::collections::HashMap;

use super::lexer::{is_ident_char, tokenize, Token, TokenCategory};
use super::parser::{parse, Body, TypeDecl, TypeRef, PRIMITIVES};
use super::{CodeEntity, CodeEntityKind, CodeEntitySet, CodeError, ParseMode, SourceUnit};

/// Returns true when `name` occurs in `text` with non-identifier characters
/// (or the text edge) on both sides.
pub(crate) fn occurs_at_boundary(text: &str, name: &str) -> bool {
    if name.is_empty() {
        return false;
    }
    let mut from = 0;
    while let Some(idx) = text[from..].find(name) {
        let start = from + idx;
        let end = start + name.len();
        let before_ok = text[..start].chars().next_back().is_none_or(|c| !is_ident_char(c));
        let after_ok = text[end..].chars().next().is_none_or(|c| !is_ident_char(c));
        if before_ok && after_ok {
            return true;
        }
        from = start + 1;
    }
    false
}

#[derive(Default)]
struct Collector {
    records: HashMap<(String, CodeEntityKind), (usize, usize, usize)>, // (line, col, count)
}

impl Collector {
    fn add(&mut self, name: &str, kind: CodeEntityKind, line: usize, column: usize) {
        if name.is_empty() {
            return;
        }
        let entry =
            self.records.entry((name.to_string(), kind)).or_insert((line, column, 0));
        entry.2 += 1;
        if (line, column) < (entry.0, entry.1) {
            entry.0 = line;
            entry.1 = column;
        }
    }

    /// Finalize into a deterministic, source-sound entity list. Names that
    /// do not occur verbatim at a token boundary (possible for dotted names
    /// written with interior whitespace) fall back to their last segment,
    /// and are dropped if still unlocatable.
    fn finish(self, source: &str) -> Vec<CodeEntity> {
        let mut merged: HashMap<(String, CodeEntityKind), (usize, usize, usize)> = HashMap::new();
        for ((name, kind), (line, column, count)) in self.records {
            let resolved = if occurs_at_boundary(source, &name) {
                Some(name)
            } else {
                name.rsplit('.')
                    .next()
                    .filter(|seg| occurs_at_boundary(source, seg))
                    .map(str::to_string)
            };
            let Some(name) = resolved else { continue };
            let entry = merged.entry((name, kind)).or_insert((line, column, 0));
            entry.2 += count;
            if (line, column) < (entry.0, entry.1) {
                entry.0 = line;
                entry.1 = column;
            }
        }
        let mut entities: Vec<CodeEntity> = merged
            .into_iter()
            .map(|((name, kind), (line, column, occurrences))| CodeEntity {
                name,
                kind,
                line,
                column,
                occurrences,
            })
            .collect();
        entities.sort_by(|a, b| {
            (a.line, a.column, a.kind, a.name.as_str())
                .cmp(&(b.line, b.column, b.kind, b.name.as_str()))
        });
        entities
    }
}

/// Literal token text as recorded: string and char literals keep their
/// content verbatim with the quotes stripped; numeric literals are verbatim,
/// folding an immediately preceding unary minus into the value.
fn literal_value(tokens: &[Token], idx: usize) -> String {
    let text = &tokens[idx].text;
    if text.starts_with('"') || text.starts_with('\'') {
        let quote = text.chars().next().expect("non-empty literal");
        let inner = text.strip_prefix(quote).unwrap_or(text);
        return inner.strip_suffix(quote).unwrap_or(inner).to_string();
    }
    if text.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '.') {
        let mut prior = tokens[..idx].iter().rev().filter(|t| t.category != TokenCategory::Comment);
        if let Some(prev) = prior.next() {
            if prev.text == "-" && prev.category == TokenCategory::Operator {
                let unary = match prior.next() {
                    None => true,
                    Some(t) => !matches!(
                        t.category,
                        TokenCategory::Identifier | TokenCategory::Literal
                    ) && t.text != ")"
                        && t.text != "]",
                };
                if unary {
                    return format!("-{text}");
                }
            }
        }
    }
    text.clone()
}

fn collect_token_pass(tokens: &[Token], collector: &mut Collector, lexical_fallback: bool) {
    for (idx, token) in tokens.iter().enumerate() {
        match token.category {
            TokenCategory::Keyword => {
                collector.add(&token.text, CodeEntityKind::Keyword, token.line, token.column)
            }
            TokenCategory::Literal => {
                let value = literal_value(tokens, idx);
                collector.add(&value, CodeEntityKind::Value, token.line, token.column);
            }
            TokenCategory::Identifier if lexical_fallback => {
                collector.add(&token.text, CodeEntityKind::Variable, token.line, token.column)
            }
            _ => {}
        }
    }
}

fn collect_type_ref(ty: &TypeRef, collector: &mut Collector) {
    if ty.name != "void" && ty.name != "?" {
        collector.add(&ty.name, CodeEntityKind::DataType, ty.line, ty.column);
    }
    for arg in &ty.args {
        collect_type_ref(arg, collector);
    }
}

fn collect_body(body: &Body, collector: &mut Collector) {
    for local in &body.locals {
        collect_type_ref(&local.ty, collector);
        collector.add(
            &local.name.name,
            CodeEntityKind::Variable,
            local.name.line,
            local.name.column,
        );
    }
    for call in &body.invocations {
        collector.add(&call.name, CodeEntityKind::Function, call.line, call.column);
    }
    for ctor in &body.constructions {
        collector.add(&ctor.name, CodeEntityKind::Class, ctor.line, ctor.column);
        for arg in &ctor.args {
            collect_type_ref(arg, collector);
        }
    }
    for arr in &body.array_creations {
        if !PRIMITIVES.contains(&arr.name.as_str()) {
            collector.add(&arr.name, CodeEntityKind::DataType, arr.line, arr.column);
        }
        for arg in &arr.args {
            collect_type_ref(arg, collector);
        }
    }
    for cast in &body.casts {
        if !PRIMITIVES.contains(&cast.name.as_str()) {
            collector.add(&cast.name, CodeEntityKind::DataType, cast.line, cast.column);
        }
    }
    for var in &body.var_refs {
        collector.add(&var.name, CodeEntityKind::Variable, var.line, var.column);
    }
    for class_ref in &body.class_refs {
        collector.add(&class_ref.name, CodeEntityKind::Class, class_ref.line, class_ref.column);
    }
    for m in &body.method_refs {
        collector.add(&m.name, CodeEntityKind::Function, m.line, m.column);
    }
    for ty in &body.type_refs {
        collect_type_ref(ty, collector);
    }
}

fn collect_type_decl(decl: &TypeDecl, collector: &mut Collector) {
    if !decl.synthetic {
        collector.add(&decl.name.name, CodeEntityKind::Class, decl.name.line, decl.name.column);
    }
    for ann in &decl.annotations {
        collector.add(&ann.name, CodeEntityKind::Annotation, ann.line, ann.column);
    }
    for tp in &decl.type_params {
        collector.add(&tp.name, CodeEntityKind::DataType, tp.line, tp.column);
    }
    for bound in &decl.bound_refs {
        collect_type_ref(bound, collector);
    }
    for sup in &decl.supertypes {
        collect_type_ref(sup, collector);
    }
    for constant in &decl.enum_constants {
        collector.add(&constant.name, CodeEntityKind::Variable, constant.line, constant.column);
    }
    for field in &decl.fields {
        collect_type_ref(&field.ty, collector);
        for ann in &field.annotations {
            collector.add(&ann.name, CodeEntityKind::Annotation, ann.line, ann.column);
        }
        for name in &field.names {
            collector.add(&name.name, CodeEntityKind::Variable, name.line, name.column);
        }
        collect_body(&field.init, collector);
    }
    for method in &decl.methods {
        collector.add(
            &method.name.name,
            CodeEntityKind::Function,
            method.name.line,
            method.name.column,
        );
        for ann in &method.annotations {
            collector.add(&ann.name, CodeEntityKind::Annotation, ann.line, ann.column);
        }
        for tp in &method.type_params {
            collector.add(&tp.name, CodeEntityKind::DataType, tp.line, tp.column);
        }
        for bound in &method.bound_refs {
            collect_type_ref(bound, collector);
        }
        if let Some(rt) = &method.return_type {
            collect_type_ref(rt, collector);
        }
        for param in &method.params {
            collect_type_ref(&param.ty, collector);
            collector.add(
                &param.name.name,
                CodeEntityKind::Variable,
                param.name.line,
                param.name.column,
            );
        }
        for thrown in &method.throws {
            collect_type_ref(thrown, collector);
        }
        if let Some(body) = &method.body {
            collect_body(body, collector);
        }
    }
    for init in &decl.initializers {
        collect_body(init, collector);
    }
    for nested in &decl.nested {
        collect_type_decl(nested, collector);
    }
}

/// Extract and classify every code entity in the unit. Falls back to a
/// lexical pass (keywords, values, identifiers-as-variables) when the
/// snippet does not parse.
pub fn extract_code_entities(unit: &SourceUnit) -> Result<CodeEntitySet, CodeError> {
    if unit.text.trim().is_empty() {
        return Err(CodeError::EmptySource);
    }
    let stream = tokenize(&unit.text);
    let mut collector = Collector::default();
    let parse_mode = match parse(&unit.text) {
        Ok(tree) => {
            collect_token_pass(&stream.tokens, &mut collector, false);
            for import in &tree.imports {
                collector.add(&import.path, CodeEntityKind::Library, import.line, import.column);
                if let Some(terminal) = &import.terminal {
                    collector.add(terminal, CodeEntityKind::Library, import.line, import.column);
                }
            }
            for decl in &tree.types {
                collect_type_decl(decl, &mut collector);
            }
            ParseMode::FullAst
        }
        Err(_) => {
            collect_token_pass(&stream.tokens, &mut collector, true);
            ParseMode::LexicalFallback
        }
    };
    Ok(CodeEntitySet {
        unit_id: unit.id.clone(),
        entities: collector.finish(&unit.text),
        parse_mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(text: &str) -> SourceUnit {
        SourceUnit::new("t", text).unwrap()
    }

    fn extract(text: &str) -> CodeEntitySet {
        extract_code_entities(&unit(text)).unwrap()
    }

    const EXAMPLE_1: &str = r#"public RowBuilder int16(String name)
    {
    ColumnInt16 column = new ColumnInt16(_columns.size(), name, _offset);
    _offset += column.length();
    _columns.add(column);
    return this;
 }"#;

    #[test]
    fn example_method_entities() {
        let set = extract(EXAMPLE_1);
        assert_eq!(set.parse_mode, ParseMode::FullAst);
        for (name, kind) in [
            ("int16", CodeEntityKind::Function),
            ("ColumnInt16", CodeEntityKind::Class),
            ("ColumnInt16", CodeEntityKind::DataType),
            ("name", CodeEntityKind::Variable),
            ("_offset", CodeEntityKind::Variable),
            ("_columns", CodeEntityKind::Variable),
            ("RowBuilder", CodeEntityKind::DataType),
        ] {
            assert!(set.contains(name, kind), "missing ({name}, {kind})");
        }
        assert!(!set.entities.iter().any(|e| e.name.contains("__Wrapper__")));
    }

    #[test]
    fn insufficient_knowledge_example_entities() {
        let src = "public String getString (int columnPosition) throws \nSQLException {\n    return (String) resultSet.getObject(columnPosition);\n    }";
        let set = extract(src);
        for (name, kind) in [
            ("getString", CodeEntityKind::Function),
            ("columnPosition", CodeEntityKind::Variable),
            ("SQLException", CodeEntityKind::DataType),
            ("resultSet", CodeEntityKind::Variable),
            ("getObject", CodeEntityKind::Function),
        ] {
            assert!(set.contains(name, kind), "missing ({name}, {kind})");
        }
    }

    #[test]
    fn single_declaration_is_exact() {
        let set = extract("class A {}");
        let got: Vec<(String, CodeEntityKind)> =
            set.entities.iter().map(|e| (e.name.clone(), e.kind)).collect();
        assert_eq!(
            got,
            vec![
                ("class".to_string(), CodeEntityKind::Keyword),
                ("A".to_string(), CodeEntityKind::Class),
            ]
        );
    }

    #[test]
    fn fallback_restricts_kinds() {
        let set = extract("return this;");
        assert_eq!(set.parse_mode, ParseMode::LexicalFallback);
        assert!(set.entities.iter().all(|e| matches!(
            e.kind,
            CodeEntityKind::Keyword | CodeEntityKind::Value | CodeEntityKind::Variable
        )));
        assert!(set.contains("return", CodeEntityKind::Keyword));
        assert!(set.contains("this", CodeEntityKind::Keyword));
    }

    #[test]
    fn unary_minus_folds_into_value() {
        let set = extract("public int getJobID(String jobName) {\n    return -1;\n}");
        assert!(set.contains("-1", CodeEntityKind::Value));
        assert!(set.contains("getJobID", CodeEntityKind::Function));
        assert!(set.contains("jobName", CodeEntityKind::Variable));
    }

    #[test]
    fn binary_minus_is_not_folded() {
        let set = extract("class A { int f(int a) { return a - 1; } }");
        assert!(set.contains("1", CodeEntityKind::Value));
        assert!(!set.contains("-1", CodeEntityKind::Value));
    }

    #[test]
    fn string_values_keep_content_verbatim() {
        let set = extract(
            "class H { void go(String property) { Pattern p = Pattern.compile(\"([\\\\w]+)[;]*\"); } }",
        );
        assert!(set.contains("([\\\\w]+)[;]*".trim_matches('"'), CodeEntityKind::Value));
        assert!(set.contains("Pattern", CodeEntityKind::Class));
        assert!(set.contains("Pattern", CodeEntityKind::DataType));
    }

    #[test]
    fn imports_record_path_and_terminal() {
        let set = extract("import java.util.List;\nclass C { List<String> xs; }");
        assert!(set.contains("java.util.List", CodeEntityKind::Library));
        assert!(set.contains("List", CodeEntityKind::Library));
        assert!(set.contains("List", CodeEntityKind::DataType));
        assert!(set.contains("String", CodeEntityKind::DataType));
    }

    #[test]
    fn comments_never_become_entities() {
        let set = extract("class A { // mentions widgetFactory here\nint x; }");
        assert!(!set.entities.iter().any(|e| e.name.contains("widgetFactory")));
        assert!(!set.entities.iter().any(|e| e.name.contains("mentions")));
    }

    #[test]
    fn no_duplicate_name_kind_pairs_and_sound_names() {
        let set = extract(EXAMPLE_1);
        let mut seen = std::collections::HashSet::new();
        for e in &set.entities {
            assert!(seen.insert((e.name.clone(), e.kind)), "duplicate {:?}", e);
            assert!(
                occurs_at_boundary(EXAMPLE_1, &e.name),
                "entity {:?} not found at a token boundary",
                e
            );
            assert!(e.occurrences >= 1);
        }
    }

    #[test]
    fn occurrences_are_counted() {
        let set = extract(EXAMPLE_1);
        let column = set
            .entities
            .iter()
            .find(|e| e.name == "column" && e.kind == CodeEntityKind::Variable)
            .unwrap();
        // declaration + three references
        assert_eq!(column.occurrences, 4);
    }

    #[test]
    fn deterministic_output() {
        let a = extract(EXAMPLE_1);
        let b = extract(EXAMPLE_1);
        assert_eq!(a, b);
    }

    #[test]
    fn empty_source_is_rejected() {
        assert!(SourceUnit::new("t", "   \n  ").is_err());
    }

    #[test]
    fn boundary_scan_rejects_substrings() {
        assert!(occurs_at_boundary("return getJobID(jobName);", "getJobID"));
        assert!(!occurs_at_boundary("return getJobID(jobName);", "JobID"));
        assert!(!occurs_at_boundary("void f()", "id"));
        assert!(occurs_at_boundary("int id = 3;", "id"));
    }
}
