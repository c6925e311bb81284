//! Lexing, parsing and printing of the genspec text form.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use super::{Field, GenExpr, GenSpec, GenSpecError, OperationStanza};
use crate::ir::Bound;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    Namespace(String),
    Punct(char),
    Newline,
    Eof,
}

struct Lexer<'a> {
    chars: core::iter::Peekable<core::str::Chars<'a>>,
    line: usize,
    depth: usize,
}

const PUNCT: &[char] = &['(', ')', ',', '=', ':', '<', '>'];

fn ident_char(c: char) -> bool {
    !c.is_whitespace() && !PUNCT.contains(&c) && !matches!(c, '{' | '}' | '"' | '#')
}

fn syntax(line: usize, message: impl Into<String>) -> GenSpecError {
    GenSpecError::SyntaxError {
        line,
        message: message.into(),
    }
}

impl<'a> Lexer<'a> {
    fn new(input: &'a str) -> Self {
        Lexer {
            chars: input.chars().peekable(),
            line: 1,
            depth: 0,
        }
    }

    /// Next token and the line it starts on. Newlines inside parentheses
    /// are skipped.
    fn next(&mut self) -> Result<(Tok, usize), GenSpecError> {
        loop {
            let Some(&c) = self.chars.peek() else {
                return Ok((Tok::Eof, self.line));
            };
            match c {
                '\n' => {
                    self.chars.next();
                    self.line += 1;
                    if self.depth == 0 {
                        return Ok((Tok::Newline, self.line - 1));
                    }
                }
                '#' => {
                    while self.chars.peek().is_some_and(|&c| c != '\n') {
                        self.chars.next();
                    }
                }
                c if c.is_whitespace() => {
                    self.chars.next();
                }
                _ => break,
            }
        }
        let line = self.line;
        let c = self.chars.next().unwrap_or('\0');
        let tok = match c {
            '(' => {
                self.depth += 1;
                Tok::Punct(c)
            }
            ')' => {
                self.depth = self.depth.saturating_sub(1);
                Tok::Punct(c)
            }
            c if PUNCT.contains(&c) => Tok::Punct(c),
            '"' => Tok::Str(self.string(line)?),
            '{' => {
                let mut ns = String::new();
                loop {
                    match self.chars.next() {
                        Some('}') => break,
                        Some('\n') | None => return Err(syntax(line, "unterminated namespace")),
                        Some(c) => ns.push(c),
                    }
                }
                Tok::Namespace(ns)
            }
            '}' => return Err(syntax(line, "unexpected `}`")),
            c if c.is_ascii_digit() || c == '-' => {
                let mut text = String::from(c);
                while let Some(&d) = self.chars.peek() {
                    let exponent_sign = matches!(d, '+' | '-') && text.ends_with(['e', 'E']);
                    if d.is_ascii_alphanumeric() || d == '.' || exponent_sign {
                        text.push(d);
                        self.chars.next();
                    } else {
                        break;
                    }
                }
                Tok::Number(text)
            }
            c => {
                let mut text = String::from(c);
                while let Some(&d) = self.chars.peek() {
                    if !ident_char(d) {
                        break;
                    }
                    text.push(d);
                    self.chars.next();
                }
                Tok::Ident(text)
            }
        };
        Ok((tok, line))
    }

    fn string(&mut self, line: usize) -> Result<String, GenSpecError> {
        let mut out = String::new();
        loop {
            match self.chars.next() {
                None | Some('\n') => return Err(syntax(line, "unterminated string")),
                Some('"') => return Ok(out),
                Some('\\') => match self.chars.next() {
                    Some('"') => out.push('"'),
                    Some('\\') => out.push('\\'),
                    Some('n') => out.push('\n'),
                    Some('t') => out.push('\t'),
                    Some('r') => out.push('\r'),
                    Some('u') => {
                        if self.chars.next() != Some('{') {
                            return Err(syntax(line, "expected `{` after \\u"));
                        }
                        let mut hex = String::new();
                        loop {
                            match self.chars.next() {
                                Some('}') => break,
                                Some(h) if h.is_ascii_hexdigit() && hex.len() < 6 => hex.push(h),
                                _ => return Err(syntax(line, "bad \\u{...} escape")),
                            }
                        }
                        let c = u32::from_str_radix(&hex, 16)
                            .ok()
                            .and_then(char::from_u32)
                            .ok_or_else(|| syntax(line, "bad \\u{...} escape"))?;
                        out.push(c);
                    }
                    _ => return Err(syntax(line, "unknown escape")),
                },
                Some(c) => out.push(c),
            }
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    line: usize,
}

/// Parses the text without resolving references. Also returns the line of
/// every statement, keyed by definition name or `operation NAME`.
pub(super) fn parse(input: &str) -> Result<(GenSpec, BTreeMap<String, usize>), GenSpecError> {
    let mut lexer = Lexer::new(input);
    let (tok, line) = lexer.next()?;
    let mut p = Parser { lexer, tok, line };
    let mut spec = GenSpec::default();
    let mut lines = BTreeMap::new();
    loop {
        match p.tok.clone() {
            Tok::Eof => break,
            Tok::Newline => p.bump()?,
            Tok::Ident(kw) if kw == "gen" => {
                let line = p.line;
                p.bump()?;
                let name = p.ident("generator name")?;
                p.punct('=')?;
                let expr = p.expr()?;
                p.end_of_statement()?;
                if lines.insert(name.clone(), line).is_some() {
                    return Err(syntax(line, format!("`{name}` is defined twice")));
                }
                spec.definitions.push((name, expr));
            }
            Tok::Ident(kw) if kw == "operation" => {
                let line = p.line;
                p.bump()?;
                let op_name = p.ident("operation name")?;
                p.keyword("input")?;
                p.punct('=')?;
                let input_gen = p.ident("generator name")?;
                p.keyword("output")?;
                p.punct('=')?;
                let output_type = p.ident("generator name")?;
                p.end_of_statement()?;
                if lines.insert(format!("operation {op_name}"), line).is_some() {
                    return Err(syntax(line, format!("operation `{op_name}` is declared twice")));
                }
                spec.operations.push(OperationStanza {
                    op_name,
                    input_gen,
                    output_type,
                });
            }
            other => {
                return Err(syntax(
                    p.line,
                    format!("expected `gen` or `operation`, found {}", describe(&other)),
                ))
            }
        }
    }
    Ok((spec, lines))
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Number(s) => format!("number {s}"),
        Tok::Str(s) => format!("string {s:?}"),
        Tok::Namespace(s) => format!("namespace {{{s}}}"),
        Tok::Punct(c) => format!("`{c}`"),
        Tok::Newline => "end of line".to_string(),
        Tok::Eof => "end of input".to_string(),
    }
}

impl Parser<'_> {
    fn bump(&mut self) -> Result<(), GenSpecError> {
        let (tok, line) = self.lexer.next()?;
        self.tok = tok;
        self.line = line;
        Ok(())
    }

    fn unexpected(&self, wanted: &str) -> GenSpecError {
        syntax(self.line, format!("expected {wanted}, found {}", describe(&self.tok)))
    }

    fn punct(&mut self, c: char) -> Result<(), GenSpecError> {
        if self.tok != Tok::Punct(c) {
            return Err(self.unexpected(&format!("`{c}`")));
        }
        self.bump()
    }

    fn ident(&mut self, wanted: &str) -> Result<String, GenSpecError> {
        let Tok::Ident(s) = &self.tok else {
            return Err(self.unexpected(wanted));
        };
        let s = s.clone();
        self.bump()?;
        Ok(s)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), GenSpecError> {
        if !matches!(&self.tok, Tok::Ident(s) if s == kw) {
            return Err(self.unexpected(&format!("`{kw}`")));
        }
        self.bump()
    }

    fn end_of_statement(&mut self) -> Result<(), GenSpecError> {
        match self.tok {
            Tok::Newline => self.bump(),
            Tok::Eof => Ok(()),
            _ => Err(self.unexpected("end of line")),
        }
    }

    fn expr(&mut self) -> Result<GenExpr, GenSpecError> {
        let line = self.line;
        let head = self.ident("a generator expression")?;
        match head.as_str() {
            "bool" => return Ok(GenExpr::Bool),
            "int" | "float" | "enum" | "list" | "tuple" | "choice" | "text_of" | "ref" => {}
            other => return Err(syntax(line, format!("unknown generator `{other}`"))),
        }
        self.punct('(')?;
        let expr = match head.as_str() {
            "int" => {
                let lo = self.int_bound()?;
                self.punct(',')?;
                let hi = self.int_bound()?;
                GenExpr::Int { lo, hi }
            }
            "float" => {
                let lo_open = self.eat('>')?;
                let lo = self.float_bound()?;
                self.punct(',')?;
                let hi_open = self.eat('<')?;
                let hi = self.float_bound()?;
                if (lo_open && lo == Bound::Infinite) || (hi_open && hi == Bound::Infinite) {
                    return Err(syntax(line, "an infinite bound cannot be exclusive"));
                }
                GenExpr::Float {
                    lo,
                    hi,
                    lo_open,
                    hi_open,
                }
            }
            "enum" => {
                let mut values = Vec::new();
                loop {
                    let Tok::Str(s) = &self.tok else {
                        return Err(self.unexpected("a string literal"));
                    };
                    values.push(s.clone());
                    self.bump()?;
                    if !self.eat(',')? {
                        break;
                    }
                }
                GenExpr::Enum(values)
            }
            "list" => {
                let min = self.natural()?;
                self.punct(',')?;
                let max = if self.eat_inf()? {
                    Bound::Infinite
                } else {
                    Bound::Finite(self.natural()?)
                };
                self.punct(',')?;
                let inner = self.expr()?;
                GenExpr::List {
                    min,
                    max,
                    inner: Box::new(inner),
                }
            }
            "tuple" => GenExpr::Tuple(self.fields(true)?),
            "choice" => GenExpr::Choice(self.fields(false)?),
            "text_of" => GenExpr::TextOf(Box::new(self.expr()?)),
            _ => GenExpr::Ref(self.ident("a generator name")?),
        };
        self.punct(')')?;
        Ok(expr)
    }

    fn fields(&mut self, allow_empty: bool) -> Result<Vec<Field>, GenSpecError> {
        let mut fields = Vec::new();
        if allow_empty && self.tok == Tok::Punct(')') {
            return Ok(fields);
        }
        loop {
            let namespace = match &self.tok {
                Tok::Namespace(ns) => {
                    let ns = ns.clone();
                    self.bump()?;
                    ns
                }
                _ => String::new(),
            };
            let name = self.ident("a field name")?;
            let type_name = if matches!(&self.tok, Tok::Ident(s) if s == "as") {
                self.bump()?;
                Some(self.ident("a type name")?)
            } else {
                None
            };
            self.punct(':')?;
            let expr = self.expr()?;
            fields.push(Field {
                name,
                namespace,
                type_name,
                expr,
            });
            if !self.eat(',')? {
                return Ok(fields);
            }
        }
    }

    fn eat(&mut self, c: char) -> Result<bool, GenSpecError> {
        if self.tok == Tok::Punct(c) {
            self.bump()?;
            return Ok(true);
        }
        Ok(false)
    }

    fn eat_inf(&mut self) -> Result<bool, GenSpecError> {
        if matches!(&self.tok, Tok::Ident(s) if s == "inf") {
            self.bump()?;
            return Ok(true);
        }
        Ok(false)
    }

    fn number(&mut self) -> Result<String, GenSpecError> {
        let Tok::Number(s) = &self.tok else {
            return Err(self.unexpected("a number or `inf`"));
        };
        let s = s.clone();
        self.bump()?;
        Ok(s)
    }

    fn int_bound(&mut self) -> Result<Bound<i128>, GenSpecError> {
        if self.eat_inf()? {
            return Ok(Bound::Infinite);
        }
        let line = self.line;
        let s = self.number()?;
        s.parse()
            .map(Bound::Finite)
            .map_err(|_| syntax(line, format!("`{s}` is not an integer in range")))
    }

    fn natural(&mut self) -> Result<u64, GenSpecError> {
        let line = self.line;
        let s = self.number()?;
        s.parse()
            .map_err(|_| syntax(line, format!("`{s}` is not a natural number in range")))
    }

    fn float_bound(&mut self) -> Result<Bound<f64>, GenSpecError> {
        if self.eat_inf()? {
            return Ok(Bound::Infinite);
        }
        let line = self.line;
        let s = self.number()?;
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Bound::Finite(v)),
            _ => Err(syntax(line, format!("`{s}` is not a finite number"))),
        }
    }
}

pub(super) fn print(spec: &GenSpec, header: &str) -> String {
    let mut out = String::new();
    for line in header.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    if !spec.definitions.is_empty() {
        out.push('\n');
    }
    for (name, expr) in &spec.definitions {
        let _ = write!(out, "gen {name} = ");
        expr_text(&mut out, expr, 0);
        out.push('\n');
    }
    if !spec.operations.is_empty() {
        out.push('\n');
    }
    for op in &spec.operations {
        let _ = writeln!(
            out,
            "operation {} input={} output={}",
            op.op_name, op.input_gen, op.output_type
        );
    }
    out
}

fn expr_text(out: &mut String, expr: &GenExpr, indent: usize) {
    match expr {
        GenExpr::Int { lo, hi } => {
            let _ = write!(out, "int({lo}, {hi})");
        }
        GenExpr::Float {
            lo,
            hi,
            lo_open,
            hi_open,
        } => {
            out.push_str("float(");
            if *lo_open {
                out.push('>');
            }
            float_bound_text(out, *lo);
            out.push_str(", ");
            if *hi_open {
                out.push('<');
            }
            float_bound_text(out, *hi);
            out.push(')');
        }
        GenExpr::Bool => out.push_str("bool"),
        GenExpr::Enum(values) => {
            out.push_str("enum(");
            for (i, v) in values.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                string_text(out, v);
            }
            out.push(')');
        }
        GenExpr::List { min, max, inner } => {
            let _ = write!(out, "list({min}, {max}, ");
            expr_text(out, inner, indent);
            out.push(')');
        }
        GenExpr::Tuple(fields) => fields_text(out, "tuple", fields, indent),
        GenExpr::Choice(fields) => fields_text(out, "choice", fields, indent),
        GenExpr::TextOf(inner) => {
            out.push_str("text_of(");
            expr_text(out, inner, indent);
            out.push(')');
        }
        GenExpr::Ref(name) => {
            let _ = write!(out, "ref({name})");
        }
    }
}

fn fields_text(out: &mut String, head: &str, fields: &[Field], indent: usize) {
    out.push_str(head);
    out.push('(');
    if fields.is_empty() {
        out.push(')');
        return;
    }
    for (i, f) in fields.iter().enumerate() {
        out.push('\n');
        push_indent(out, indent + 1);
        if !f.namespace.is_empty() {
            let _ = write!(out, "{{{}}}", f.namespace);
        }
        out.push_str(&f.name);
        if let Some(t) = &f.type_name {
            let _ = write!(out, " as {t}");
        }
        out.push_str(": ");
        expr_text(out, &f.expr, indent + 1);
        if i + 1 < fields.len() {
            out.push(',');
        }
    }
    out.push('\n');
    push_indent(out, indent);
    out.push(')');
}

fn push_indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("    ");
    }
}

fn float_bound_text(out: &mut String, b: Bound<f64>) {
    match b {
        Bound::Finite(v) => {
            let _ = write!(out, "{v:?}");
        }
        Bound::Infinite => out.push_str("inf"),
    }
}

fn string_text(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{{{:x}}}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}
