//! Concrete syntax for terms, formulas, derivation files and model files.
//!
//! Grammar:
//!
//! ```text
//! t ::= ident | (t . t) | (t + t) | !t | ?t | b(t) | gen[x](t)
//! A ::= P(x,...) | false | ~A | (A -> A) | (A & A) | (A | A) | (A <-> A)
//!     | forall x. A | exists x. A | [t]{x,...} A
//! ```
//!
//! Prefix forms bind tightest, then `&`, `|`, `->` (right associative) and
//! `<->`. The printer parenthesizes every binary node, so printed text parses
//! back to the same tree.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::axioms::{ConstantSpec, Logic, SchemaId};
use crate::kernel::{Derivation, Rule, Step};
use crate::semantics::{Evidence, FittingModel};
use crate::syntax::{Formula, Term, Var, VarSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}{}", expected_suffix(.expected))]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected one of: {})", expected.join(" "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TextError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}: index {index} duplicates or does not follow the previous one")]
    DuplicateIndex { index: usize, line: usize },
    #[error("line {line}: unknown section `{name}`")]
    UnknownSection { name: String, line: usize },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Context that affects how identifiers are read.
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// `None` admits both `?` and `b(..)`.
    pub logic: Option<Logic>,
    /// Extra names read as justification constants.
    pub constants: BTreeSet<String>,
}

impl ParseOptions {
    pub fn for_logic(logic: Logic) -> Self {
        ParseOptions {
            logic: Some(logic),
            constants: BTreeSet::new(),
        }
    }
}

/// `c<digits>` and `c_<ident>` are constants; declared names are too.
pub fn is_constant_name(name: &str, declared: &BTreeSet<String>) -> bool {
    if declared.contains(name) {
        return true;
    }
    if let Some(rest) = name.strip_prefix('c') {
        if !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()) {
            return true;
        }
        if let Some(tail) = rest.strip_prefix('_') {
            return !tail.is_empty();
        }
    }
    false
}

// ---------------------------------------------------------------- lexer

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Witness(String),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

const SYMBOLS: [&str; 17] = [
    "<->", "->", "(", ")", "[", "]", "{", "}", ",", ".", "+", "!", "?", "~", "&", "|", ":",
];

fn lex(text: &str, line: usize, col0: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = line;
    let mut col = col0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = col;
        if c.is_ascii_alphabetic() || c == '_' || c == '@' {
            let witness = c == '@';
            let mut j = if witness { i + 1 } else { i };
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            if witness && word.len() == 1 {
                return Err(ParseError {
                    span: SourceSpan { line, column: start, length: 1 },
                    message: "`@` must be followed by an identifier".into(),
                    expected: vec!["identifier".into()],
                });
            }
            let len = j - i;
            out.push(Token {
                tok: if witness { Tok::Witness(word) } else { Tok::Ident(word) },
                span: SourceSpan { line, column: start, length: len },
            });
            col += len;
            i = j;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_alphanumeric() {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            let len = j - i;
            out.push(Token {
                tok: Tok::Ident(word),
                span: SourceSpan { line, column: start, length: len },
            });
            col += len;
            i = j;
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(sym) => {
                out.push(Token {
                    tok: Tok::Sym(sym),
                    span: SourceSpan { line, column: start, length: sym.len() },
                });
                i += sym.len();
                col += sym.len();
            }
            None => {
                return Err(ParseError {
                    span: SourceSpan { line, column: start, length: 1 },
                    message: format!("unexpected character `{c}`"),
                    expected: vec![],
                })
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: SourceSpan { line, column: col, length: 0 },
    });
    Ok(out)
}

// ---------------------------------------------------------------- parser

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    opts: &'a ParseOptions,
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Witness(s) => format!("`{s}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
    }
}

impl<'a> Parser<'a> {
    fn new(text: &str, line: usize, col0: usize, opts: &'a ParseOptions) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(text, line, col0)?,
            pos: 0,
            opts,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, ParseError> {
        Err(ParseError {
            span: self.span(),
            message: format!("unexpected {}", describe(self.peek())),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn fail_msg<T>(&self, span: SourceSpan, message: String) -> Result<T, ParseError> {
        Err(ParseError {
            span,
            message,
            expected: vec![],
        })
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(s) if *s == sym) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<(), ParseError> {
        if self.eat(sym) {
            Ok(())
        } else {
            self.fail(&[sym])
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if matches!(self.peek(), Tok::Eof) {
            Ok(())
        } else {
            self.fail(&["end of input"])
        }
    }

    fn basic_var(&mut self) -> Result<Var, ParseError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Ident(name) if is_basic_name(&name) => {
                self.bump();
                Ok(Var::basic(&name))
            }
            Tok::Witness(name) => self.fail_msg(span, format!("witness variable {name} cannot be bound")),
            _ => self.fail(&["basic variable"]),
        }
    }

    fn any_var(&mut self) -> Result<Var, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) if is_basic_name(&name) => {
                self.bump();
                Ok(Var::basic(&name))
            }
            Tok::Witness(name) => {
                self.bump();
                Ok(Var::new(&name))
            }
            _ => self.fail(&["variable"]),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Sym("(") => {
                self.bump();
                let left = self.term()?;
                let op = if self.eat(".") {
                    "."
                } else if self.eat("+") {
                    "+"
                } else {
                    return self.fail(&[".", "+"]);
                };
                let right = self.term()?;
                self.expect(")")?;
                Ok(if op == "." { Term::app(left, right) } else { Term::sum(left, right) })
            }
            Tok::Sym("!") => {
                self.bump();
                Ok(Term::bang(self.term()?))
            }
            Tok::Sym("?") => {
                if self.opts.logic == Some(Logic::Folpb) {
                    return self.fail_msg(span, "`?` is not a FOLPb operator".into());
                }
                self.bump();
                Ok(Term::query(self.term()?))
            }
            Tok::Ident(name) if name == "b" && matches!(self.peek_at(1), Tok::Sym("(")) => {
                if self.opts.logic == Some(Logic::Fojt45) {
                    return self.fail_msg(span, "`b(..)` is not primitive in FOJT45".into());
                }
                self.bump();
                self.bump();
                let inner = self.term()?;
                self.expect(")")?;
                Ok(Term::bar(inner))
            }
            Tok::Ident(name) if name == "gen" && matches!(self.peek_at(1), Tok::Sym("[")) => {
                self.bump();
                self.bump();
                let x = self.basic_var()?;
                self.expect("]")?;
                self.expect("(")?;
                let inner = self.term()?;
                self.expect(")")?;
                Ok(Term::gen(x, inner))
            }
            Tok::Ident(name) if name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') => {
                self.bump();
                if is_constant_name(&name, &self.opts.constants) {
                    Ok(Term::constant(&name))
                } else {
                    Ok(Term::var(&name))
                }
            }
            _ => self.fail(&["term"]),
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let left = self.implication()?;
        if self.eat("<->") {
            let right = self.formula()?;
            return Ok(Formula::iff(left, right));
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let left = self.disjunction()?;
        if self.eat("->") {
            let right = self.implication()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.conjunction()?;
        while self.eat("|") {
            let right = self.conjunction()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut left = self.unary()?;
        while self.eat("&") {
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Sym("~") => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Sym("(") => {
                self.bump();
                let inner = self.formula()?;
                self.expect(")")?;
                Ok(inner)
            }
            Tok::Sym("[") => {
                self.bump();
                let t = self.term()?;
                self.expect("]")?;
                self.expect("{")?;
                let mut xs = VarSet::new();
                if !self.eat("}") {
                    loop {
                        let span = self.span();
                        let v = self.any_var()?;
                        if !xs.insert(v.clone()) {
                            return self.fail_msg(span, format!("{v} repeated in subscript"));
                        }
                        if self.eat("}") {
                            break;
                        }
                        if !self.eat(",") {
                            return self.fail(&[",", "}"]);
                        }
                    }
                }
                let body = self.unary()?;
                Ok(Formula::just(t, xs, body))
            }
            Tok::Ident(word) if word == "false" => {
                self.bump();
                Ok(Formula::Bottom)
            }
            Tok::Ident(word) if word == "forall" || word == "exists" => {
                self.bump();
                let x = self.basic_var()?;
                self.expect(".")?;
                let body = self.unary()?;
                Ok(if word == "forall" {
                    Formula::forall(x, body)
                } else {
                    Formula::exists(x, body)
                })
            }
            Tok::Ident(pred) if pred.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) => {
                self.bump();
                let mut args = Vec::new();
                if self.eat("(") && !self.eat(")") {
                    loop {
                        args.push(self.any_var()?);
                        if self.eat(")") {
                            break;
                        }
                        if !self.eat(",") {
                            return self.fail(&[",", ")"]);
                        }
                    }
                }
                Ok(Formula::Atom(Arc::from(pred.as_str()), args))
            }
            _ => self.fail(&["formula"]),
        }
    }
}

fn is_basic_name(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_ascii_lowercase() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    parse_term_with(text, &ParseOptions::default())
}

pub fn parse_term_with(text: &str, opts: &ParseOptions) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, 1, 1, opts)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_with(text, &ParseOptions::default())
}

pub fn parse_formula_with(text: &str, opts: &ParseOptions) -> Result<Formula, ParseError> {
    parse_formula_at(text, 1, 1, opts)
}

fn parse_formula_at(text: &str, line: usize, col: usize, opts: &ParseOptions) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, line, col, opts)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

fn parse_term_at(text: &str, line: usize, col: usize, opts: &ParseOptions) -> Result<Term, ParseError> {
    let mut p = Parser::new(text, line, col, opts)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

// ---------------------------------------------------------------- printer

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(n) | Term::Const(n) => f.write_str(n),
            Term::App(a, b) => write!(f, "({a} . {b})"),
            Term::Sum(a, b) => write!(f, "({a} + {b})"),
            Term::Bang(a) => write!(f, "!{a}"),
            Term::Query(a) => write!(f, "?{a}"),
            Term::Bar(a) => write!(f, "b({a})"),
            Term::Gen(x, a) => write!(f, "gen[{x}]({a})"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(p, args) => {
                f.write_str(p)?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
            Formula::Bottom => f.write_str("false"),
            Formula::Not(a) => write!(f, "~{a}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Iff(a, b) => write!(f, "({a} <-> {b})"),
            Formula::Forall(x, a) => write!(f, "forall {x}. {a}"),
            Formula::Exists(x, a) => write!(f, "exists {x}. {a}"),
            Formula::Just(t, xs, a) => {
                write!(f, "[{t}]{{")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "}} {a}")
            }
        }
    }
}

pub fn print_term(t: &Term) -> String {
    t.to_string()
}

pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

// ---------------------------------------------------------------- shared line helpers

/// Splits off a trailing `#` comment.
fn split_comment(line: &str) -> (&str, Option<&str>) {
    match line.find('#') {
        Some(i) => (&line[..i], Some(line[i + 1..].trim())),
        None => (line, None),
    }
}

fn line_error(line: usize, column: usize, length: usize, message: impl Into<String>, expected: &[&str]) -> ParseError {
    ParseError {
        span: SourceSpan { line, column, length },
        message: message.into(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

fn column_of(line: &str, sub: &str) -> usize {
    let offset = sub.as_ptr() as usize - line.as_ptr() as usize;
    line[..offset].chars().count() + 1
}

fn parse_logic_word(word: &str, line: usize, col: usize) -> Result<Logic, ParseError> {
    word.parse::<Logic>()
        .map_err(|_| line_error(line, col, word.len(), format!("unknown logic `{word}`"), &["FOLPb", "FOJT45"]))
}

fn parse_index(word: &str, line: usize, col: usize) -> Result<usize, ParseError> {
    word.parse::<usize>()
        .map_err(|_| line_error(line, col, word.len(), format!("`{word}` is not an index"), &["number"]))
}

fn read_file(path: &Path) -> Result<String, TextError> {
    std::fs::read_to_string(path).map_err(|e| TextError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

// ---------------------------------------------------------------- constant specification files

/// Reads `<const> : <formula>` lines.
pub fn parse_cs_entries(text: &str, opts: &ParseOptions) -> Result<Vec<(String, Formula)>, ParseError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let (body, _) = split_comment(raw);
        if body.trim().is_empty() {
            continue;
        }
        out.push(parse_cs_line(raw, body, line_no, opts)?);
    }
    Ok(out)
}

fn parse_cs_line(raw: &str, body: &str, line_no: usize, opts: &ParseOptions) -> Result<(String, Formula), ParseError> {
    let Some(colon) = body.find(':') else {
        return Err(line_error(line_no, 1, raw.len(), "expected `<const> : <formula>`", &[":"]));
    };
    let name = body[..colon].trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(line_error(line_no, 1, colon, "expected a constant name", &["identifier"]));
    }
    let rest = &body[colon + 1..];
    let mut local = opts.clone();
    local.constants.insert(name.to_string());
    let f = parse_formula_at(rest, line_no, column_of(raw, rest), &local)?;
    Ok((name.to_string(), f))
}

fn parse_schema_map(text: &str) -> Result<BTreeMap<SchemaId, String>, ParseError> {
    let mut map = SchemaId::default_constants();
    for (n, raw) in text.lines().enumerate() {
        let (body, _) = split_comment(raw);
        let words: Vec<&str> = body.split_whitespace().collect();
        match words.as_slice() {
            [] => {}
            [schema, name] => {
                let id = schema
                    .parse::<SchemaId>()
                    .map_err(|_| line_error(n + 1, column_of(raw, schema), schema.len(), "unknown schema", &[]))?;
                map.insert(id, name.to_string());
            }
            _ => return Err(line_error(n + 1, 1, raw.len(), "expected `<schema> <const>`", &[])),
        }
    }
    Ok(map)
}

// ---------------------------------------------------------------- derivations

/// Parses a derivation; relative CS paths resolve against the working directory.
pub fn parse_derivation(text: &str) -> Result<Derivation, TextError> {
    parse_derivation_in(text, Path::new("."))
}

pub fn parse_derivation_file(path: &Path) -> Result<Derivation, TextError> {
    let text = read_file(path)?;
    let dir = path.parent().unwrap_or(Path::new("."));
    parse_derivation_in(&text, dir)
}

fn parse_rule(raw: &str, text: &str, line_no: usize) -> Result<Rule, ParseError> {
    let words: Vec<&str> = text.split(|c: char| c.is_whitespace() || c == ',').filter(|w| !w.is_empty()).collect();
    let col = |w: &str| column_of(raw, w);
    let Some(head) = words.first() else {
        return Err(line_error(line_no, column_of(raw, text), 0, "missing rule", &["AX", "CS", "HYP", "MP", "GEN", "TAUT"]));
    };
    let arity = |n: usize| -> Result<(), ParseError> {
        if words.len() == n + 1 {
            Ok(())
        } else {
            Err(line_error(line_no, col(head), head.len(), format!("{head} takes {n} argument(s)"), &[]))
        }
    };
    match *head {
        "AX" => {
            arity(1)?;
            let id = words[1].parse::<SchemaId>().map_err(|_| {
                line_error(line_no, col(words[1]), words[1].len(), format!("unknown schema `{}`", words[1]), &["schema id"])
            })?;
            Ok(Rule::Ax(id))
        }
        "CS" => {
            arity(1)?;
            Ok(Rule::Cs(words[1].to_string()))
        }
        "HYP" => {
            arity(1)?;
            Ok(Rule::Hyp(parse_index(words[1], line_no, col(words[1]))?))
        }
        "MP" => {
            arity(2)?;
            Ok(Rule::Mp(
                parse_index(words[1], line_no, col(words[1]))?,
                parse_index(words[2], line_no, col(words[2]))?,
            ))
        }
        "GEN" => {
            arity(2)?;
            let v = words[2];
            if !is_basic_name(v) {
                return Err(line_error(line_no, col(v), v.len(), format!("GEN needs a basic variable, got `{v}`"), &["basic variable"]));
            }
            Ok(Rule::Gen(parse_index(words[1], line_no, col(words[1]))?, Var::basic(v)))
        }
        "TAUT" => {
            let mut is = Vec::new();
            for w in &words[1..] {
                is.push(parse_index(w, line_no, col(w))?);
            }
            Ok(Rule::Taut(is))
        }
        other => Err(line_error(
            line_no,
            col(other),
            other.len(),
            format!("unknown rule `{other}`"),
            &["AX", "CS", "HYP", "MP", "GEN", "TAUT"],
        )),
    }
}

fn parse_derivation_in(text: &str, dir: &Path) -> Result<Derivation, TextError> {
    let mut logic = None;
    let mut cs: Option<ConstantSpec> = None;
    let mut opts = ParseOptions::default();
    let mut hypotheses = Vec::new();
    let mut steps: Vec<Step> = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let (body, note) = split_comment(raw);
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let first = trimmed.split_whitespace().next().unwrap_or("");
        let rest_of = |w: &str| trimmed[w.len()..].trim();
        match first {
            "logic" => {
                let word = rest_of(first);
                let l = parse_logic_word(word, line_no, column_of(raw, word))?;
                logic = Some(l);
                opts.logic = Some(l);
            }
            "cs" => {
                let args: Vec<&str> = rest_of(first).split_whitespace().collect();
                cs = Some(match args.as_slice() {
                    ["schematic"] => ConstantSpec::schematic(),
                    ["schematic", path] => ConstantSpec::Schematic(parse_schema_map(&read_file(&dir.join(path))?)?),
                    ["explicit"] => ConstantSpec::Explicit(Vec::new()),
                    ["explicit", path] => {
                        let text = read_file(&dir.join(path))?;
                        let entries = parse_cs_entries(&text, &opts)?;
                        opts.constants.extend(entries.iter().map(|(c, _)| c.clone()));
                        ConstantSpec::Explicit(entries)
                    }
                    _ => {
                        return Err(line_error(line_no, 1, raw.len(), "expected `cs schematic|explicit [path]`", &["schematic", "explicit"]).into())
                    }
                });
            }
            "entry" => {
                let rest = rest_of(first);
                let (name, f) = parse_cs_line(raw, rest, line_no, &opts)?;
                opts.constants.insert(name.clone());
                match cs.as_mut() {
                    Some(ConstantSpec::Explicit(entries)) => entries.push((name, f)),
                    _ => return Err(line_error(line_no, 1, raw.len(), "`entry` requires `cs explicit` first", &[]).into()),
                }
            }
            "const" => {
                for w in rest_of(first).split(|c: char| c.is_whitespace() || c == ',').filter(|w| !w.is_empty()) {
                    opts.constants.insert(w.to_string());
                }
            }
            "hyp" => {
                let rest = rest_of(first);
                let Some(colon) = rest.find(':') else {
                    return Err(line_error(line_no, 1, raw.len(), "expected `hyp <k>: <formula>`", &[":"]).into());
                };
                let label = rest[..colon].trim();
                let k = parse_index(label, line_no, column_of(raw, label))?;
                if k != hypotheses.len() + 1 {
                    return Err(TextError::DuplicateIndex { index: k, line: line_no });
                }
                let ftext = &rest[colon + 1..];
                hypotheses.push(parse_formula_at(ftext, line_no, column_of(raw, ftext), &opts)?);
            }
            _ => {
                let Some(dot) = trimmed.find('.') else {
                    return Err(line_error(line_no, 1, raw.len(), "expected a header or a numbered step", &["logic", "cs", "hyp", "<n>."]).into());
                };
                let label = &trimmed[..dot];
                let index = parse_index(label, line_no, column_of(raw, label))?;
                if steps.last().is_some_and(|s| s.index >= index) {
                    return Err(TextError::DuplicateIndex { index, line: line_no });
                }
                let after = &trimmed[dot + 1..];
                let Some(semi) = after.find(';') else {
                    return Err(line_error(line_no, 1, raw.len(), "missing `; RULE`", &[";"]).into());
                };
                let ftext = &after[..semi];
                let rtext = &after[semi + 1..];
                let formula = parse_formula_at(ftext, line_no, column_of(raw, ftext), &opts)?;
                let rule = parse_rule(raw, rtext, line_no)?;
                steps.push(Step {
                    index,
                    formula,
                    rule,
                    note: note.filter(|s| !s.is_empty()).map(str::to_string),
                });
            }
        }
    }
    let logic = logic.ok_or_else(|| line_error(1, 1, 0, "missing `logic` header", &["logic"]))?;
    Ok(Derivation {
        logic,
        cs: cs.unwrap_or_else(ConstantSpec::schematic),
        hypotheses,
        steps,
        constants: opts.constants,
    })
}

fn print_rule(rule: &Rule) -> String {
    match rule {
        Rule::Ax(id) => format!("AX {id}"),
        Rule::Cs(c) => format!("CS {c}"),
        Rule::Hyp(k) => format!("HYP {k}"),
        Rule::Mp(i, j) => format!("MP {i} {j}"),
        Rule::Gen(i, x) => format!("GEN {i} {x}"),
        Rule::Taut(is) => {
            let parts: Vec<String> = is.iter().map(|i| i.to_string()).collect();
            format!("TAUT {}", parts.join(","))
        }
    }
}

/// Canonical text of a derivation. Explicit constant specifications are
/// written inline so the file is self-contained.
pub fn print_derivation(d: &Derivation) -> String {
    let mut out = String::new();
    out.push_str(&format!("logic {}\n", d.logic));
    match &d.cs {
        ConstantSpec::Schematic(map) if *map == SchemaId::default_constants() => out.push_str("cs schematic\n"),
        ConstantSpec::Schematic(map) => {
            // Non-default names: declare them so the step terms re-read as constants.
            out.push_str("cs schematic\n");
            let names: Vec<&str> = map.values().map(String::as_str).collect();
            out.push_str(&format!("const {}\n", names.join(" ")));
        }
        ConstantSpec::Explicit(entries) => {
            out.push_str("cs explicit\n");
            for (c, f) in entries {
                out.push_str(&format!("entry {c} : {f}\n"));
            }
        }
    }
    let declared: Vec<&str> = d
        .constants
        .iter()
        .filter(|c| !is_constant_name(c, &BTreeSet::new()))
        .map(String::as_str)
        .collect();
    if !declared.is_empty() {
        out.push_str(&format!("const {}\n", declared.join(" ")));
    }
    for (k, h) in d.hypotheses.iter().enumerate() {
        out.push_str(&format!("hyp {}: {h}\n", k + 1));
    }
    for s in &d.steps {
        out.push_str(&format!("{}. {} ; {}", s.index, s.formula, print_rule(&s.rule)));
        if let Some(note) = &s.note {
            out.push_str(&format!("  # {note}"));
        }
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------- models

const SECTIONS: [&str; 8] = ["LOGIC", "WORLDS", "REL", "DOMAIN", "INTERP", "EVIDENCE", "CS", "END"];

fn world_index(worlds: &[String], name: &str, line: usize, col: usize) -> Result<usize, ParseError> {
    worlds
        .iter()
        .position(|w| w == name)
        .ok_or_else(|| line_error(line, col, name.len(), format!("unknown world `{name}`"), &["world name"]))
}

#[derive(Clone, Copy, PartialEq)]
enum EvidenceMode {
    Full,
    Closure,
    Table,
}

pub fn parse_model(text: &str) -> Result<FittingModel, TextError> {
    let mut section: Option<&str> = None;
    let mut logic: Option<Logic> = None;
    let mut worlds: Vec<String> = Vec::new();
    let mut rel = BTreeSet::new();
    let mut domain: Vec<Var> = Vec::new();
    let mut interp: BTreeMap<(String, usize), BTreeSet<Vec<Var>>> = BTreeMap::new();
    let mut mode = EvidenceMode::Full;
    let mut closure_base: Vec<(Term, Formula, usize)> = Vec::new();
    let mut table: Vec<(Term, Formula, BTreeSet<usize>)> = Vec::new();
    let mut cs_entries: Option<Vec<(String, Formula)>> = None;
    let mut opts = ParseOptions::default();

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let (body, _) = split_comment(raw);
        let trimmed = body.trim();
        if trimmed.is_empty() {
            continue;
        }
        let first = trimmed.split_whitespace().next().unwrap_or("");
        let is_header = first.len() > 1 && first.chars().all(|c| c.is_ascii_uppercase());
        if is_header {
            let Some(name) = SECTIONS.iter().find(|s| **s == first) else {
                return Err(TextError::UnknownSection {
                    name: first.to_string(),
                    line: line_no,
                });
            };
            section = Some(name);
            let rest = trimmed[first.len()..].trim();
            match *name {
                "LOGIC" if !rest.is_empty() => {
                    let l = parse_logic_word(rest, line_no, column_of(raw, rest))?;
                    logic = Some(l);
                    opts.logic = Some(l);
                }
                "EVIDENCE" => {
                    mode = match rest {
                        "" | "mode=full" => EvidenceMode::Full,
                        "mode=closure" => EvidenceMode::Closure,
                        "mode=table" => EvidenceMode::Table,
                        _ => {
                            return Err(line_error(line_no, column_of(raw, rest), rest.len(), "unknown evidence mode", &["mode=full", "mode=closure", "mode=table"]).into())
                        }
                    }
                }
                "CS" => {
                    cs_entries = match rest {
                        "schematic" => None,
                        "" | "explicit" => Some(Vec::new()),
                        _ => return Err(line_error(line_no, column_of(raw, rest), rest.len(), "unknown CS mode", &["schematic", "explicit"]).into()),
                    };
                }
                _ if !rest.is_empty() => {
                    return Err(line_error(line_no, column_of(raw, rest), rest.len(), "unexpected text after section header", &[]).into())
                }
                _ => {}
            }
            continue;
        }
        match section {
            None => {
                return Err(line_error(line_no, 1, raw.len(), "content before the first section", &SECTIONS[..7]).into())
            }
            Some("LOGIC") => {
                let l = parse_logic_word(trimmed, line_no, column_of(raw, trimmed))?;
                logic = Some(l);
                opts.logic = Some(l);
            }
            Some("WORLDS") => worlds.extend(trimmed.split_whitespace().map(str::to_string)),
            Some("REL") => {
                let ws: Vec<&str> = trimmed.split_whitespace().collect();
                if ws.len() != 2 {
                    return Err(line_error(line_no, 1, raw.len(), "expected `w v`", &["world pair"]).into());
                }
                let a = world_index(&worlds, ws[0], line_no, column_of(raw, ws[0]))?;
                let b = world_index(&worlds, ws[1], line_no, column_of(raw, ws[1]))?;
                rel.insert((a, b));
            }
            Some("DOMAIN") => domain.extend(trimmed.split(|c: char| c.is_whitespace() || c == ',').filter(|w| !w.is_empty()).map(Var::witness)),
            Some("INTERP") => {
                let (Some(at), Some(colon)) = (trimmed.find('@'), trimmed.find(':')) else {
                    return Err(line_error(line_no, 1, raw.len(), "expected `P @ w : (d1,...)`", &["@", ":"]).into());
                };
                let pred = trimmed[..at].trim().to_string();
                let wname = trimmed[at + 1..colon].trim();
                let w = world_index(&worlds, wname, line_no, column_of(raw, wname))?;
                let tuple_text = trimmed[colon + 1..].trim();
                let inner = tuple_text
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| line_error(line_no, column_of(raw, tuple_text), tuple_text.len(), "expected a parenthesized tuple", &["("]))?;
                let tuple: Vec<Var> = inner.split(',').map(str::trim).filter(|s| !s.is_empty()).map(Var::witness).collect();
                interp.entry((pred, w)).or_default().insert(tuple);
            }
            Some("EVIDENCE") => {
                let parts: Vec<&str> = trimmed.split('|').collect();
                if parts.len() != 3 {
                    return Err(line_error(line_no, 1, raw.len(), "expected `t | formula | worlds`", &["|"]).into());
                }
                let t = parse_term_at(parts[0], line_no, column_of(raw, parts[0]), &opts)?;
                let f = parse_formula_at(parts[1], line_no, column_of(raw, parts[1]), &opts)?;
                let mut ws = BTreeSet::new();
                for w in parts[2].split_whitespace() {
                    ws.insert(world_index(&worlds, w, line_no, column_of(raw, w))?);
                }
                match mode {
                    EvidenceMode::Full => {
                        return Err(line_error(line_no, 1, raw.len(), "full evidence takes no entries", &[]).into())
                    }
                    EvidenceMode::Closure => closure_base.extend(ws.into_iter().map(|w| (t.clone(), f.clone(), w))),
                    EvidenceMode::Table => table.push((t, f, ws)),
                }
            }
            Some("CS") => {
                let (name, f) = parse_cs_line(raw, trimmed, line_no, &opts)?;
                opts.constants.insert(name.clone());
                cs_entries.get_or_insert_with(Vec::new).push((name, f));
            }
            Some(_) => return Err(line_error(line_no, 1, raw.len(), "unexpected line", &[]).into()),
        }
    }
    let logic = logic.ok_or_else(|| line_error(1, 1, 0, "missing LOGIC section", &["LOGIC"]))?;
    let cs = match cs_entries {
        Some(entries) => ConstantSpec::Explicit(entries),
        None => ConstantSpec::schematic(),
    };
    // Entry names may be declared after the evidence section mentions them.
    let declared: BTreeSet<String> = match &cs {
        ConstantSpec::Explicit(entries) => entries.iter().map(|(c, _)| c.clone()).collect(),
        ConstantSpec::Schematic(_) => BTreeSet::new(),
    };
    let evidence = match mode {
        EvidenceMode::Full => Evidence::Full,
        EvidenceMode::Closure => Evidence::Closure(
            closure_base
                .into_iter()
                .map(|(t, f, w)| (declare_constants(&t, &declared), declare_in_formula(&f, &declared), w))
                .collect(),
        ),
        EvidenceMode::Table => Evidence::Table(
            table
                .into_iter()
                .map(|(t, f, ws)| (declare_constants(&t, &declared), declare_in_formula(&f, &declared), ws))
                .collect(),
        ),
    };
    Ok(FittingModel {
        logic,
        worlds,
        rel,
        domain,
        interp,
        evidence,
        cs,
    })
}

/// Reads variables with declared names as constants.
pub fn declare_constants(t: &Term, declared: &BTreeSet<String>) -> Term {
    match t {
        Term::Var(n) if declared.contains(&**n) => Term::Const(n.clone()),
        Term::Var(_) | Term::Const(_) => t.clone(),
        Term::App(a, b) => Term::app(declare_constants(a, declared), declare_constants(b, declared)),
        Term::Sum(a, b) => Term::sum(declare_constants(a, declared), declare_constants(b, declared)),
        Term::Bang(a) => Term::bang(declare_constants(a, declared)),
        Term::Query(a) => Term::query(declare_constants(a, declared)),
        Term::Bar(a) => Term::bar(declare_constants(a, declared)),
        Term::Gen(x, a) => Term::gen(x.clone(), declare_constants(a, declared)),
    }
}

fn declare_in_formula(f: &Formula, declared: &BTreeSet<String>) -> Formula {
    if declared.is_empty() {
        return f.clone();
    }
    match f {
        Formula::Atom(..) | Formula::Bottom => f.clone(),
        Formula::Not(a) => Formula::not(declare_in_formula(a, declared)),
        Formula::And(a, b) => Formula::and(declare_in_formula(a, declared), declare_in_formula(b, declared)),
        Formula::Or(a, b) => Formula::or(declare_in_formula(a, declared), declare_in_formula(b, declared)),
        Formula::Implies(a, b) => Formula::implies(declare_in_formula(a, declared), declare_in_formula(b, declared)),
        Formula::Iff(a, b) => Formula::iff(declare_in_formula(a, declared), declare_in_formula(b, declared)),
        Formula::Forall(x, a) => Formula::forall(x.clone(), declare_in_formula(a, declared)),
        Formula::Exists(x, a) => Formula::exists(x.clone(), declare_in_formula(a, declared)),
        Formula::Just(t, xs, a) => Formula::just(declare_constants(t, declared), xs.clone(), declare_in_formula(a, declared)),
    }
}

pub fn print_model(m: &FittingModel) -> String {
    let mut out = String::new();
    out.push_str(&format!("LOGIC {}\n", m.logic));
    out.push_str("WORLDS\n");
    out.push_str(&m.worlds.join(" "));
    out.push('\n');
    out.push_str("REL\n");
    for (a, b) in &m.rel {
        out.push_str(&format!("{} {}\n", m.worlds[*a], m.worlds[*b]));
    }
    out.push_str("DOMAIN\n");
    let names: Vec<&str> = m.domain.iter().map(Var::name).collect();
    out.push_str(&names.join(" "));
    out.push('\n');
    out.push_str("INTERP\n");
    for ((p, w), tuples) in &m.interp {
        for tuple in tuples {
            let args: Vec<&str> = tuple.iter().map(Var::name).collect();
            out.push_str(&format!("{p} @ {} : ({})\n", m.worlds[*w], args.join(",")));
        }
    }
    match &m.evidence {
        Evidence::Full => out.push_str("EVIDENCE mode=full\n"),
        Evidence::Closure(base) => {
            out.push_str("EVIDENCE mode=closure\n");
            for (t, f, w) in base {
                out.push_str(&format!("{t} | {f} | {}\n", m.worlds[*w]));
            }
        }
        Evidence::Table(entries) => {
            out.push_str("EVIDENCE mode=table\n");
            for (t, f, ws) in entries {
                let names: Vec<&str> = ws.iter().map(|w| m.worlds[*w].as_str()).collect();
                out.push_str(&format!("{t} | {f} | {}\n", names.join(" ")));
            }
        }
    }
    if let ConstantSpec::Explicit(entries) = &m.cs {
        out.push_str("CS explicit\n");
        for (c, f) in entries {
            out.push_str(&format!("{c} : {f}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::varset;

    #[test]
    fn term_examples() {
        assert_eq!(parse_term("(p0 . c1)").unwrap(), Term::app(Term::var("p0"), Term::constant("c1")));
        let t = Term::sum(Term::app(Term::var("a"), Term::var("b")), Term::var("c"));
        assert_eq!(print_term(&t), "((a . b) + c)");
    }

    #[test]
    fn formula_examples() {
        let f = parse_formula("[gen[x](t)]{y} forall x. P(x,y)").unwrap();
        let expected = Formula::just(
            Term::gen(Var::basic("x"), Term::var("t")),
            varset(["y"]),
            Formula::forall(Var::basic("x"), Formula::atom("P", &["x", "y"])),
        );
        assert_eq!(f, expected);
        assert!(parse_formula("forall @a. P(@a)").is_err());
        assert_eq!(print_formula(&Formula::just(Term::var("t"), VarSet::new(), Formula::Bottom)), "[t]{} false");
        let f = Formula::just(Term::var("t"), varset(["y", "x"]), Formula::atom("P", &["x"]));
        assert_eq!(print_formula(&f), "[t]{x,y} P(x)");
    }

    #[test]
    fn precedence() {
        let f = parse_formula("A & B | C -> D -> E <-> F").unwrap();
        assert_eq!(print_formula(&f), "((((A & B) | C) -> (D -> E)) <-> F)");
        let g = parse_formula("forall x. P(x) -> Q").unwrap();
        assert_eq!(print_formula(&g), "(forall x. P(x) -> Q)");
        assert!(matches!(g, Formula::Implies(..)));
    }

    #[test]
    fn logic_restrictions() {
        assert!(parse_term_with("?t", &ParseOptions::for_logic(Logic::Folpb)).is_err());
        assert!(parse_term_with("b(t)", &ParseOptions::for_logic(Logic::Fojt45)).is_err());
        assert!(parse_term_with("b(t)", &ParseOptions::for_logic(Logic::Folpb)).is_ok());
    }

    #[test]
    fn error_spans_are_located() {
        let e = parse_formula("P(x) -> ").unwrap_err();
        assert_eq!(e.span.line, 1);
        assert_eq!(e.span.column, 9);
        let e = parse_formula("P(x) $ Q").unwrap_err();
        assert_eq!(e.span.column, 6);
    }

    #[test]
    fn derivation_minimal_and_duplicate() {
        let d = parse_derivation("logic FOLPb\ncs schematic\n1. (P -> (Q -> P)) ; AX A1.K\n").unwrap();
        assert_eq!(d.steps.len(), 1);
        let e = parse_derivation("logic FOLPb\n1. P ; HYP 1\n1. P ; HYP 1\n").unwrap_err();
        assert!(matches!(e, TextError::DuplicateIndex { index: 1, .. }));
    }

    #[test]
    fn derivation_round_trip() {
        let text = "logic FOJT45\ncs explicit\nentry c0 : (P(x) -> (Q(y) -> P(x)))\nhyp 1: [p1]{} P\n1. P ; HYP 1  # note here\n2. forall x. P ; GEN 1 x\n3. P ; TAUT 1,2\n";
        let d = parse_derivation(text).unwrap();
        assert_eq!(d.steps[0].note.as_deref(), Some("note here"));
        let again = parse_derivation(&print_derivation(&d)).unwrap();
        assert_eq!(again, d);
    }

    #[test]
    fn model_sections() {
        let text = "LOGIC FOLPb\nWORLDS\nw0 w1\nREL\nw0 w0\nw0 w1\nDOMAIN\n@a @b\nINTERP\nP @ w0 : (@a)\nEVIDENCE mode=table\nc0 | P(x) | w0 w1\nCS\nc0 : (P(x) -> (P(x) -> P(x)))\n";
        let m = parse_model(text).unwrap();
        assert_eq!(m.worlds.len(), 2);
        assert!(!m.rel.contains(&(1, 1)));
        match &m.evidence {
            Evidence::Table(entries) => assert_eq!(entries[0].0, Term::constant("c0")),
            _ => panic!("table expected"),
        }
        assert_eq!(parse_model(&print_model(&m)).unwrap(), m);
        let e = parse_model("LOGIC FOLPb\nFOO\n").unwrap_err();
        assert!(matches!(e, TextError::UnknownSection { .. }));
    }
}
