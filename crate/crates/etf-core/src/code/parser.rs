//! Lightweight Java parser.
//!
//! Parses the declaration structure a snippet exposes (types, methods,
//! fields, parameters, locals, imports) and harvests expression-level facts
//! (invocations, constructor targets, casts, identifier references) without
//! building a full expression tree. Isolated methods are parsed inside a
//! synthetic wrapper type so bare CodeXGLUE-style rows work; the wrapper
//! never surfaces as an entity.

use super::lexer::{tokenize, Token, TokenCategory};
use super::WRAPPER_CLASS_NAME;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("parse error at {line}:{column} near {token:?}: {message}")]
pub struct ParseError {
    pub message: String,
    pub token: String,
    pub line: usize,
    pub column: usize,
}

/// A named occurrence with its source position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameRef {
    pub name: String,
    pub line: usize,
    pub column: usize,
}

/// A type reference as written, possibly dotted, with generic arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRef {
    pub name: String,
    pub args: Vec<TypeRef>,
    pub dims: usize,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportDecl {
    pub path: String,
    /// Last identifier segment of the path (wildcards excluded).
    pub terminal: Option<String>,
    pub is_static: bool,
    pub wildcard: bool,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeDeclKind {
    Class,
    Interface,
    Enum,
    AnnotationType,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Body {
    pub locals: Vec<LocalDecl>,
    pub invocations: Vec<NameRef>,
    pub constructions: Vec<TypeRef>,
    pub array_creations: Vec<TypeRef>,
    pub casts: Vec<NameRef>,
    pub var_refs: Vec<NameRef>,
    pub class_refs: Vec<NameRef>,
    pub method_refs: Vec<NameRef>,
    pub type_refs: Vec<TypeRef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDecl {
    pub ty: TypeRef,
    pub name: NameRef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub ty: TypeRef,
    pub name: NameRef,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub name: NameRef,
    pub is_constructor: bool,
    pub annotations: Vec<NameRef>,
    pub type_params: Vec<NameRef>,
    pub bound_refs: Vec<TypeRef>,
    pub return_type: Option<TypeRef>,
    pub params: Vec<Param>,
    pub throws: Vec<TypeRef>,
    pub body: Option<Body>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDecl {
    pub ty: TypeRef,
    pub names: Vec<NameRef>,
    pub annotations: Vec<NameRef>,
    /// Facts harvested from initializer expressions.
    pub init: Body,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecl {
    pub kind: TypeDeclKind,
    pub name: NameRef,
    pub synthetic: bool,
    pub annotations: Vec<NameRef>,
    pub type_params: Vec<NameRef>,
    pub bound_refs: Vec<TypeRef>,
    pub supertypes: Vec<TypeRef>,
    pub fields: Vec<FieldDecl>,
    pub methods: Vec<MethodDecl>,
    pub nested: Vec<TypeDecl>,
    pub enum_constants: Vec<NameRef>,
    pub initializers: Vec<Body>,
}

impl TypeDecl {
    fn new(kind: TypeDeclKind, name: NameRef) -> Self {
        Self {
            kind,
            name,
            synthetic: false,
            annotations: Vec::new(),
            type_params: Vec::new(),
            bound_refs: Vec::new(),
            supertypes: Vec::new(),
            fields: Vec::new(),
            methods: Vec::new(),
            nested: Vec::new(),
            enum_constants: Vec::new(),
            initializers: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompilationUnit {
    pub imports: Vec<ImportDecl>,
    pub types: Vec<TypeDecl>,
}

impl CompilationUnit {
    /// All non-synthetic declared type names.
    pub fn declared_types(&self) -> impl Iterator<Item = &TypeDecl> {
        self.types.iter().filter(|t| !t.synthetic)
    }
}

const MODIFIERS: &[&str] = &[
    "public", "protected", "private", "static", "final", "abstract", "native", "synchronized",
    "transient", "volatile", "strictfp", "default",
];

pub(crate) const PRIMITIVES: &[&str] =
    &["boolean", "byte", "char", "double", "float", "int", "long", "short", "void"];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&Token> {
        self.toks.get(self.pos + n)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn at_text(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.text == text)
    }

    fn at_category(&self, cat: TokenCategory) -> bool {
        self.peek().is_some_and(|t| t.category == cat)
    }

    fn eat_text(&mut self, text: &str) -> bool {
        if self.at_text(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_text(&mut self, text: &str) -> PResult<Token> {
        if self.at_text(text) {
            Ok(self.bump().expect("token present"))
        } else {
            Err(self.error_here(&format!("expected `{text}`")))
        }
    }

    fn expect_identifier(&mut self) -> PResult<NameRef> {
        match self.peek() {
            Some(t) if t.category == TokenCategory::Identifier => {
                let name = NameRef { name: t.text.clone(), line: t.line, column: t.column };
                self.pos += 1;
                Ok(name)
            }
            _ => Err(self.error_here("expected identifier")),
        }
    }

    fn error_here(&self, message: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError {
                message: message.to_string(),
                token: t.text.clone(),
                line: t.line,
                column: t.column,
            },
            None => {
                let (line, column) = self
                    .toks
                    .last()
                    .map(|t| (t.line, t.column + t.text.chars().count()))
                    .unwrap_or((1, 1));
                ParseError {
                    message: format!("{message} (unexpected end of input)"),
                    token: String::from("<eof>"),
                    line,
                    column,
                }
            }
        }
    }

    // ---- top level -------------------------------------------------------

    fn parse_unit(&mut self) -> PResult<CompilationUnit> {
        let mut imports = Vec::new();
        if self.at_text("package") {
            self.bump();
            while self.peek().is_some() && !self.at_text(";") {
                self.bump();
            }
            self.expect_text(";")?;
        }
        while self.at_text("import") {
            imports.push(self.parse_import()?);
        }

        let mut types = Vec::new();
        if self.looks_like_type_decl() {
            while self.peek().is_some() {
                if self.eat_text(";") {
                    continue;
                }
                types.push(self.parse_type_decl()?);
            }
        } else if self.peek().is_some() {
            // bare members: wrap them in a synthetic type
            let mut wrapper = TypeDecl::new(
                TypeDeclKind::Class,
                NameRef { name: WRAPPER_CLASS_NAME.to_string(), line: 1, column: 1 },
            );
            wrapper.synthetic = true;
            while self.peek().is_some() {
                self.parse_member(&mut wrapper)?;
            }
            types.push(wrapper);
        }
        Ok(CompilationUnit { imports, types })
    }

    fn parse_import(&mut self) -> PResult<ImportDecl> {
        let kw = self.expect_text("import")?;
        let is_static = self.eat_text("static");
        let mut segments = vec![self.expect_identifier()?.name];
        let mut wildcard = false;
        while self.eat_text(".") {
            if self.eat_text("*") {
                wildcard = true;
                break;
            }
            segments.push(self.expect_identifier()?.name);
        }
        self.expect_text(";")?;
        let mut path = segments.join(".");
        if wildcard {
            path.push_str(".*");
        }
        Ok(ImportDecl {
            path,
            terminal: segments.last().cloned(),
            is_static,
            wildcard,
            line: kw.line,
            column: kw.column,
        })
    }

    /// Looks ahead across annotations and modifiers for a type-declaration
    /// keyword, deciding whether the snippet is a compilation unit or a bare
    /// member list.
    fn looks_like_type_decl(&self) -> bool {
        let mut i = 0;
        loop {
            let Some(t) = self.peek_at(i) else { return false };
            match t.text.as_str() {
                "@" => {
                    // annotation or `@interface`
                    match self.peek_at(i + 1) {
                        Some(n) if n.text == "interface" => return true,
                        Some(n) if n.category == TokenCategory::Identifier => {
                            i += 2;
                            // skip argument list if present
                            if self.peek_at(i).is_some_and(|t| t.text == "(") {
                                let mut depth = 0usize;
                                loop {
                                    let Some(t) = self.peek_at(i) else { return false };
                                    match t.text.as_str() {
                                        "(" => depth += 1,
                                        ")" => {
                                            depth -= 1;
                                            if depth == 0 {
                                                i += 1;
                                                break;
                                            }
                                        }
                                        _ => {}
                                    }
                                    i += 1;
                                }
                            }
                        }
                        _ => return false,
                    }
                }
                "class" | "interface" | "enum" => return true,
                text if MODIFIERS.contains(&text) => i += 1,
                _ => return false,
            }
        }
    }

    // ---- declarations ----------------------------------------------------

    fn parse_annotations(&mut self) -> PResult<Vec<NameRef>> {
        let mut out = Vec::new();
        while self.at_text("@") && self.peek_at(1).is_some_and(|t| t.text != "interface") {
            self.bump();
            let first = self.expect_identifier()?;
            let mut name = first.name.clone();
            while self.at_text(".") && self.peek_at(1).is_some_and(|t| t.category == TokenCategory::Identifier) {
                self.bump();
                name.push('.');
                name.push_str(&self.expect_identifier()?.name);
            }
            out.push(NameRef { name, line: first.line, column: first.column });
            if self.at_text("(") {
                self.skip_balanced("(", ")")?;
            }
        }
        Ok(out)
    }

    fn skip_modifiers(&mut self) {
        while self.peek().is_some_and(|t| MODIFIERS.contains(&t.text.as_str())) {
            self.bump();
        }
    }

    fn skip_balanced(&mut self, open: &str, close: &str) -> PResult<()> {
        self.expect_text(open)?;
        let mut depth = 1usize;
        while depth > 0 {
            match self.bump() {
                Some(t) if t.text == open => depth += 1,
                Some(t) if t.text == close => depth -= 1,
                Some(_) => {}
                None => return Err(self.error_here(&format!("unbalanced `{open}`"))),
            }
        }
        Ok(())
    }

    fn parse_type_decl(&mut self) -> PResult<TypeDecl> {
        let annotations = self.parse_annotations()?;
        self.skip_modifiers();
        let kind = if self.eat_text("class") {
            TypeDeclKind::Class
        } else if self.eat_text("interface") {
            TypeDeclKind::Interface
        } else if self.eat_text("enum") {
            TypeDeclKind::Enum
        } else if self.at_text("@") && self.peek_at(1).is_some_and(|t| t.text == "interface") {
            self.bump();
            self.bump();
            TypeDeclKind::AnnotationType
        } else {
            return Err(self.error_here("expected type declaration"));
        };
        let name = self.expect_identifier()?;
        let mut decl = TypeDecl::new(kind, name);
        decl.annotations = annotations;
        if self.at_text("<") {
            let mut bounds = Vec::new();
            decl.type_params = self.parse_type_params(&mut bounds)?;
            decl.bound_refs = bounds;
        }
        while self.at_text("extends") || self.at_text("implements") || self.at_text("permits") {
            self.bump();
            loop {
                decl.supertypes.push(self.parse_type()?);
                if !self.eat_text(",") {
                    break;
                }
            }
        }
        match kind {
            TypeDeclKind::Enum => self.parse_enum_body(&mut decl)?,
            _ => self.parse_type_body(&mut decl)?,
        }
        Ok(decl)
    }

    fn parse_type_body(&mut self, decl: &mut TypeDecl) -> PResult<()> {
        self.expect_text("{")?;
        while !self.at_text("}") {
            if self.peek().is_none() {
                return Err(self.error_here("unterminated type body"));
            }
            self.parse_member(decl)?;
        }
        self.expect_text("}")?;
        Ok(())
    }

    fn parse_enum_body(&mut self, decl: &mut TypeDecl) -> PResult<()> {
        self.expect_text("{")?;
        // constant list
        while self.at_category(TokenCategory::Identifier) {
            let constant = self.expect_identifier()?;
            decl.enum_constants.push(constant);
            if self.at_text("(") {
                let mut body = Body::default();
                self.scan_paren_region(&mut body)?;
                decl.initializers.push(body);
            }
            if self.at_text("{") {
                // constant class body: harvest as an initializer
                let mut body = Body::default();
                self.scan_brace_region(&mut body)?;
                decl.initializers.push(body);
            }
            if !self.eat_text(",") {
                break;
            }
        }
        if self.eat_text(";") {
            while !self.at_text("}") {
                if self.peek().is_none() {
                    return Err(self.error_here("unterminated enum body"));
                }
                self.parse_member(decl)?;
            }
        }
        self.expect_text("}")?;
        Ok(())
    }

    fn parse_member(&mut self, decl: &mut TypeDecl) -> PResult<()> {
        if self.eat_text(";") {
            return Ok(());
        }
        let annotations = self.parse_annotations()?;
        self.skip_modifiers();

        // initializer block
        if self.at_text("{") {
            let body = self.parse_block()?;
            decl.initializers.push(body);
            return Ok(());
        }
        // nested type
        if self.at_text("class")
            || self.at_text("interface")
            || self.at_text("enum")
            || (self.at_text("@") && self.peek_at(1).is_some_and(|t| t.text == "interface"))
        {
            // re-parse annotations inside parse_type_decl is not possible;
            // attach the ones already consumed
            let mut nested = self.parse_type_decl()?;
            nested.annotations.extend(annotations);
            decl.nested.push(nested);
            return Ok(());
        }

        let mut type_params = Vec::new();
        let mut bound_refs = Vec::new();
        if self.at_text("<") {
            type_params = self.parse_type_params(&mut bound_refs)?;
        }

        // constructor: identifier directly followed by `(`
        if self.at_category(TokenCategory::Identifier) && self.peek_at(1).is_some_and(|t| t.text == "(") {
            let name = self.expect_identifier()?;
            let method = self.parse_method_rest(name, true, annotations, type_params, bound_refs, None)?;
            decl.methods.push(method);
            return Ok(());
        }

        let ty = self.parse_type()?;
        let name = self.expect_identifier()?;
        if self.at_text("(") {
            let method =
                self.parse_method_rest(name, false, annotations, type_params, bound_refs, Some(ty))?;
            decl.methods.push(method);
            return Ok(());
        }

        // field declaration
        let mut field = FieldDecl { ty, names: vec![name], annotations, init: Body::default() };
        loop {
            while self.eat_text("[") {
                self.expect_text("]")?;
            }
            if self.eat_text("=") {
                let mut init = std::mem::take(&mut field.init);
                self.scan_expression(&mut init, &[",", ";"])?;
                field.init = init;
            }
            if self.eat_text(",") {
                field.names.push(self.expect_identifier()?);
                continue;
            }
            break;
        }
        self.expect_text(";")?;
        decl.fields.push(field);
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn parse_method_rest(
        &mut self,
        name: NameRef,
        is_constructor: bool,
        annotations: Vec<NameRef>,
        type_params: Vec<NameRef>,
        bound_refs: Vec<TypeRef>,
        return_type: Option<TypeRef>,
    ) -> PResult<MethodDecl> {
        let params = self.parse_params()?;
        // array-returning methods in C style: `int values()[]`
        while self.eat_text("[") {
            self.expect_text("]")?;
        }
        let mut throws = Vec::new();
        if self.eat_text("throws") {
            loop {
                throws.push(self.parse_type()?);
                if !self.eat_text(",") {
                    break;
                }
            }
        }
        // annotation-type members: `String value() default "x";`
        if self.eat_text("default") {
            let mut sink = Body::default();
            self.scan_expression(&mut sink, &[";"])?;
        }
        let body = if self.at_text("{") {
            Some(self.parse_block()?)
        } else {
            self.expect_text(";")?;
            None
        };
        Ok(MethodDecl {
            name,
            is_constructor,
            annotations,
            type_params,
            bound_refs,
            return_type,
            params,
            throws,
            body,
        })
    }

    fn parse_params(&mut self) -> PResult<Vec<Param>> {
        self.expect_text("(")?;
        let mut params = Vec::new();
        if self.eat_text(")") {
            return Ok(params);
        }
        loop {
            self.parse_annotations()?;
            while self.eat_text("final") {}
            let ty = self.parse_type()?;
            self.eat_text("...");
            let name = self.expect_identifier()?;
            let mut dims = 0;
            while self.eat_text("[") {
                self.expect_text("]")?;
                dims += 1;
            }
            let mut ty = ty;
            ty.dims += dims;
            params.push(Param { ty, name });
            if self.eat_text(",") {
                continue;
            }
            break;
        }
        self.expect_text(")")?;
        Ok(params)
    }

    /// `<T, U extends Bound & Other>`; bound types land in `bounds`.
    fn parse_type_params(&mut self, bounds: &mut Vec<TypeRef>) -> PResult<Vec<NameRef>> {
        self.expect_text("<")?;
        let mut names = Vec::new();
        loop {
            names.push(self.expect_identifier()?);
            if self.eat_text("extends") {
                loop {
                    bounds.push(self.parse_type()?);
                    if !self.eat_text("&") {
                        break;
                    }
                }
            }
            if self.eat_text(",") {
                continue;
            }
            break;
        }
        self.expect_text(">")?;
        Ok(names)
    }

    /// Primitive or (possibly dotted) class type, with optional generic
    /// arguments and array dimensions.
    fn parse_type(&mut self) -> PResult<TypeRef> {
        let first = self.peek().cloned().ok_or_else(|| self.error_here("expected type"))?;
        let mut name;
        if first.category == TokenCategory::Keyword && PRIMITIVES.contains(&first.text.as_str()) {
            self.bump();
            name = first.text.clone();
        } else if first.category == TokenCategory::Identifier {
            self.bump();
            name = first.text.clone();
            while self.at_text(".")
                && self.peek_at(1).is_some_and(|t| t.category == TokenCategory::Identifier)
            {
                self.bump();
                name.push('.');
                name.push_str(&self.expect_identifier()?.name);
            }
        } else {
            return Err(self.error_here("expected type"));
        }
        let mut ty =
            TypeRef { name, args: Vec::new(), dims: 0, line: first.line, column: first.column };
        if self.at_text("<") {
            let save = self.pos;
            match self.parse_type_args() {
                Ok(args) => ty.args = args,
                Err(_) => self.pos = save, // `<` was a comparison, not generics
            }
        }
        while self.at_text("[") && self.peek_at(1).is_some_and(|t| t.text == "]") {
            self.bump();
            self.bump();
            ty.dims += 1;
        }
        Ok(ty)
    }

    fn parse_type_args(&mut self) -> PResult<Vec<TypeRef>> {
        self.expect_text("<")?;
        let mut args = Vec::new();
        if self.eat_text(">") {
            return Ok(args); // diamond
        }
        loop {
            if self.eat_text("?") {
                if self.eat_text("extends") || self.eat_text("super") {
                    args.push(self.parse_type()?);
                }
            } else {
                args.push(self.parse_type()?);
            }
            if self.eat_text(",") {
                continue;
            }
            break;
        }
        self.expect_text(">")?;
        Ok(args)
    }

    // ---- statements & expression fact harvesting --------------------------

    fn parse_block(&mut self) -> PResult<Body> {
        let mut body = Body::default();
        self.expect_text("{")?;
        while !self.at_text("}") {
            if self.peek().is_none() {
                return Err(self.error_here("unterminated block"));
            }
            self.parse_statement(&mut body)?;
        }
        self.expect_text("}")?;
        Ok(body)
    }

    fn parse_statement(&mut self, body: &mut Body) -> PResult<()> {
        let Some(t) = self.peek().cloned() else {
            return Err(self.error_here("expected statement"));
        };
        match t.text.as_str() {
            "{" => {
                let inner = self.parse_block()?;
                merge_body(body, inner);
            }
            ";" => {
                self.bump();
            }
            "if" | "while" | "switch" | "synchronized" => {
                self.bump();
                self.scan_paren_region(body)?;
            }
            "do" | "else" | "finally" | "try" => {
                self.bump();
                if t.text == "try" && self.at_text("(") {
                    self.parse_resource_list(body)?;
                }
            }
            "for" => {
                self.bump();
                self.expect_text("(")?;
                if self.try_parse_local_decl(body)? {
                    // declaration consumed; scan the remainder of the header
                }
                self.scan_expression(body, &[")"])?;
                self.expect_text(")")?;
            }
            "catch" => {
                self.bump();
                self.expect_text("(")?;
                self.parse_annotations()?;
                while self.eat_text("final") {}
                let first = self.parse_type()?;
                let mut catch_ty = first.clone();
                body.type_refs.push(first);
                while self.eat_text("|") {
                    let ty = self.parse_type()?;
                    body.type_refs.push(ty.clone());
                    catch_ty = ty;
                }
                let name = self.expect_identifier()?;
                body.locals.push(LocalDecl { ty: catch_ty, name });
                self.expect_text(")")?;
            }
            "return" | "throw" | "assert" => {
                self.bump();
                self.scan_expression(body, &[";"])?;
                self.expect_text(";")?;
            }
            "break" | "continue" => {
                self.bump();
                if self.at_category(TokenCategory::Identifier) {
                    self.bump(); // label
                }
                self.expect_text(";")?;
            }
            "case" => {
                self.bump();
                self.scan_expression(body, &[":"])?;
                self.eat_text(":");
            }
            "default" => {
                self.bump();
                self.eat_text(":");
            }
            "class" | "interface" | "enum" => {
                let nested = self.parse_type_decl()?;
                // local classes: keep their facts by flattening declarations
                flatten_type_into_body(body, &nested);
            }
            _ => {
                if self.try_parse_local_decl(body)? {
                    return Ok(());
                }
                self.scan_expression(body, &[";"])?;
                if !self.eat_text(";") && !self.at_text("}") {
                    return Err(self.error_here("expected `;`"));
                }
            }
        }
        Ok(())
    }

    fn parse_resource_list(&mut self, body: &mut Body) -> PResult<()> {
        self.expect_text("(")?;
        loop {
            let _ = self.try_parse_local_decl_header(body)?;
            self.scan_expression(body, &[";", ")"])?;
            if self.eat_text(";") && !self.at_text(")") {
                continue;
            }
            break;
        }
        self.expect_text(")")?;
        Ok(())
    }

    /// Speculative local-variable declaration. Consumes through the
    /// terminating `;` on success.
    fn try_parse_local_decl(&mut self, body: &mut Body) -> PResult<bool> {
        if !self.try_parse_local_decl_header(body)? {
            return Ok(false);
        }
        // declarators
        loop {
            if self.eat_text("=") {
                self.scan_expression(body, &[",", ";", ")"])?;
            } else if self.eat_text(":") {
                // enhanced for header: `for (Type x : expr)`
                return Ok(true);
            }
            if self.eat_text(",") {
                let name = self.expect_identifier()?;
                while self.eat_text("[") {
                    self.expect_text("]")?;
                }
                let ty = body.locals.last().map(|l| l.ty.clone());
                if let Some(ty) = ty {
                    body.locals.push(LocalDecl { ty, name });
                }
                continue;
            }
            break;
        }
        if self.at_text(")") {
            return Ok(true); // for-header without `;` (shouldn't happen, but harmless)
        }
        self.expect_text(";")?;
        Ok(true)
    }

    /// Tries `final? Type name` and records the declaration. Does not touch
    /// the initializer. Restores the cursor when the tokens are not a
    /// declaration header.
    fn try_parse_local_decl_header(&mut self, body: &mut Body) -> PResult<bool> {
        let save = self.pos;
        if self.parse_annotations().is_err() {
            self.pos = save;
            return Ok(false);
        }
        while self.eat_text("final") {}
        let Ok(ty) = self.parse_type() else {
            self.pos = save;
            return Ok(false);
        };
        let Ok(name) = self.expect_identifier() else {
            self.pos = save;
            return Ok(false);
        };
        let mut dims = 0;
        while self.at_text("[") && self.peek_at(1).is_some_and(|t| t.text == "]") {
            self.bump();
            self.bump();
            dims += 1;
        }
        let next_ok = matches!(
            self.peek().map(|t| t.text.as_str()),
            Some("=") | Some(",") | Some(";") | Some(":")
        );
        if !next_ok {
            self.pos = save;
            return Ok(false);
        }
        let mut ty = ty;
        ty.dims += dims;
        body.locals.push(LocalDecl { ty, name });
        Ok(true)
    }

    /// Consumes a parenthesized region (including the parens) collecting
    /// expression facts.
    fn scan_paren_region(&mut self, body: &mut Body) -> PResult<()> {
        self.expect_text("(")?;
        self.scan_expression(body, &[")"])?;
        self.expect_text(")")?;
        Ok(())
    }

    /// Consumes a braced region (including the braces) collecting facts.
    fn scan_brace_region(&mut self, body: &mut Body) -> PResult<()> {
        self.expect_text("{")?;
        self.scan_expression(body, &["}"])?;
        self.expect_text("}")?;
        Ok(())
    }

    /// Walks expression tokens collecting facts, stopping before any of
    /// `stops` at nesting depth zero (the stop token is not consumed).
    /// Balanced `()`/`[]`/`{}` groups are traversed, not skipped.
    fn scan_expression(&mut self, body: &mut Body, stops: &[&str]) -> PResult<()> {
        let mut depth = 0usize;
        loop {
            let Some(t) = self.peek().cloned() else {
                if depth == 0 {
                    return Ok(());
                }
                return Err(self.error_here("unterminated expression"));
            };
            if depth == 0 && stops.contains(&t.text.as_str()) {
                return Ok(());
            }
            match t.text.as_str() {
                "(" => {
                    if self.try_scan_cast(body)? {
                        continue;
                    }
                    depth += 1;
                    self.bump();
                }
                "[" | "{" => {
                    depth += 1;
                    self.bump();
                }
                ")" | "]" | "}" => {
                    if depth == 0 {
                        return Ok(()); // unbalanced closer ends the expression
                    }
                    depth -= 1;
                    self.bump();
                }
                "new" => {
                    self.bump();
                    self.scan_creation(body)?;
                }
                "instanceof" => {
                    self.bump();
                    if let Ok(ty) = self.parse_type() {
                        body.type_refs.push(ty);
                    }
                }
                "::" => {
                    self.bump();
                    if self.at_text("new") {
                        self.bump();
                    } else if self.at_category(TokenCategory::Identifier) {
                        let m = self.expect_identifier()?;
                        body.method_refs.push(m);
                    }
                }
                _ if t.category == TokenCategory::Identifier => {
                    self.bump();
                    let name = NameRef { name: t.text.clone(), line: t.line, column: t.column };
                    match self.peek().map(|n| n.text.as_str()) {
                        Some("(") => body.invocations.push(name),
                        Some(".") => {
                            if starts_uppercase(&name.name) {
                                body.class_refs.push(name);
                            } else {
                                body.var_refs.push(name);
                            }
                        }
                        _ => body.var_refs.push(name),
                    }
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    /// `new Type(...)`, `new Type[...]`, `new Type[]{...}`.
    fn scan_creation(&mut self, body: &mut Body) -> PResult<()> {
        let Ok(ty) = self.parse_type() else {
            return Ok(()); // tolerate odd shapes; the scan continues
        };
        if ty.dims > 0 || self.at_text("[") {
            body.array_creations.push(ty);
        } else if self.at_text("(") {
            body.constructions.push(ty);
        } else {
            body.array_creations.push(ty);
        }
        Ok(())
    }

    /// Detects `(Type) operand` casts: parenthesized single type followed by
    /// an operand-starting token.
    fn try_scan_cast(&mut self, body: &mut Body) -> PResult<bool> {
        let save = self.pos;
        if !self.eat_text("(") {
            return Ok(false);
        }
        let Ok(ty) = self.parse_type() else {
            self.pos = save;
            return Ok(false);
        };
        if !self.eat_text(")") {
            self.pos = save;
            return Ok(false);
        }
        let operand_follows = match self.peek() {
            Some(n) => {
                n.category == TokenCategory::Identifier
                    || n.category == TokenCategory::Literal
                    || n.text == "("
                    || n.text == "new"
                    || n.text == "this"
                    || n.text == "super"
            }
            None => false,
        };
        // lowercase bare names are almost always parenthesized expressions,
        // not casts, unless they are primitive types
        let plausible_type = ty.dims > 0
            || !ty.args.is_empty()
            || PRIMITIVES.contains(&ty.name.as_str())
            || starts_uppercase(&ty.name);
        if operand_follows && plausible_type {
            body.casts.push(NameRef { name: ty.name.clone(), line: ty.line, column: ty.column });
            if !ty.args.is_empty() {
                body.type_refs.push(ty);
            }
            Ok(true)
        } else {
            self.pos = save;
            Ok(false)
        }
    }
}

fn starts_uppercase(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_uppercase())
}

fn merge_body(into: &mut Body, from: Body) {
    into.locals.extend(from.locals);
    into.invocations.extend(from.invocations);
    into.constructions.extend(from.constructions);
    into.array_creations.extend(from.array_creations);
    into.casts.extend(from.casts);
    into.var_refs.extend(from.var_refs);
    into.class_refs.extend(from.class_refs);
    into.method_refs.extend(from.method_refs);
    into.type_refs.extend(from.type_refs);
}

/// Local classes inside method bodies keep their declaration facts by being
/// flattened into the surrounding body.
fn flatten_type_into_body(body: &mut Body, decl: &TypeDecl) {
    body.class_refs.push(decl.name.clone());
    for ty in &decl.supertypes {
        body.type_refs.push(ty.clone());
    }
    for field in &decl.fields {
        for name in &field.names {
            body.locals.push(LocalDecl { ty: field.ty.clone(), name: name.clone() });
        }
        merge_body(body, field.init.clone());
    }
    for method in &decl.methods {
        body.method_refs.push(method.name.clone());
        if let Some(rt) = &method.return_type {
            body.type_refs.push(rt.clone());
        }
        for p in &method.params {
            body.type_refs.push(p.ty.clone());
            body.locals.push(LocalDecl { ty: p.ty.clone(), name: p.name.clone() });
        }
        for t in &method.throws {
            body.type_refs.push(t.clone());
        }
        if let Some(b) = &method.body {
            merge_body(body, b.clone());
        }
    }
    for nested in &decl.nested {
        flatten_type_into_body(body, nested);
    }
}

/// Parse a source unit into its declaration structure. Bare member lists
/// (isolated methods, fields) are wrapped in a synthetic type.
pub fn parse(source: &str) -> Result<CompilationUnit, ParseError> {
    let stream = tokenize(source);
    let toks: Vec<Token> = stream.significant().cloned().collect();
    let mut parser = Parser { toks, pos: 0 };
    let unit = parser.parse_unit()?;
    if parser.peek().is_some() {
        return Err(parser.error_here("trailing tokens"));
    }
    Ok(unit)
}
