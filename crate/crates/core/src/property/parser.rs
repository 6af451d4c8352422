//! Recursive-descent parser for the `A[]` / `E<>` query fragment.
//!
//! Operator precedence, loosest first: `imply` (right-associative), `or`,
//! `and`, `not` and quantifiers, comparisons (non-chaining), `+`/`-`.
//! A quantifier body extends as far to the right as possible.

use std::fmt;

use thiserror::Error;

use crate::automata::{CmpOp, Ident};

use super::ast::{Access, PathQuantifier, Pred, ProcRef, PropertyAst, Quantifier, RangeSpec, Term};
use super::lexer::{lex, Pos, Tok};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
    /// Token descriptions acceptable at the error position; may be empty.
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

pub const KEYWORDS: [&str; 8] = ["and", "or", "not", "imply", "forall", "exists", "true", "false"];

/// Parse result before it is known whether a predicate or a term is wanted.
enum Ex {
    P(Pred),
    T(Term),
    /// `Proc.name` or `Proc(arg).name`: a location test or a variable.
    Path(ProcRef, Ident),
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

const ATOM_START: [&str; 8] =
    ["integer", "identifier", "`(`", "`-`", "`not`", "`forall`", "`exists`", "`true`/`false`"];

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error_at(&self, pos: Pos, message: String, expected: &[&str]) -> ParseError {
        ParseError { line: pos.line, col: pos.col, message, expected: expected.iter().map(|s| s.to_string()).collect() }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let tok = self.peek().clone();
        let message = match tok {
            Tok::Always | Tok::Eventually => "nested path quantifier".to_string(),
            Tok::Unsupported(q) => format!("unsupported path quantifier `{q}`"),
            other => format!("unexpected {other}"),
        };
        self.error_at(self.pos(), message, expected)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            let want = tok.to_string();
            Err(self.unexpected(&[want.as_str()]))
        }
    }

    fn ident(&mut self) -> Result<Ident, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(Ident::lit(&s))
            }
            Tok::Ident(s) => Err(self.error_at(self.pos(), format!("keyword `{s}` used as a name"), &["identifier"])),
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn to_pred(&self, ex: Ex, pos: Pos) -> Result<Pred, ParseError> {
        match ex {
            Ex::P(p) => Ok(p),
            Ex::Path(proc, loc) => Ok(Pred::At(proc, loc)),
            Ex::T(_) => Err(self.error_at(pos, "expected a predicate, found a term".into(), &[])),
        }
    }

    fn to_term(&self, ex: Ex, pos: Pos) -> Result<Term, ParseError> {
        match ex {
            Ex::T(t) => Ok(t),
            Ex::Path(proc, var) => Ok(Term::Access(Access { process: Some(proc), var, index: None, field: None })),
            Ex::P(_) => Err(self.error_at(pos, "expected a term, found a predicate".into(), &[])),
        }
    }

    fn imply(&mut self) -> Result<Ex, ParseError> {
        let pos = self.pos();
        let lhs = self.or()?;
        if self.is_kw("imply") {
            self.bump();
            let lhs = self.to_pred(lhs, pos)?;
            let rpos = self.pos();
            let rhs = self.imply()?;
            let rhs = self.to_pred(rhs, rpos)?;
            return Ok(Ex::P(lhs.imply(rhs)));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Ex, ParseError> {
        let pos = self.pos();
        let mut lhs = self.and()?;
        while self.is_kw("or") || *self.peek() == Tok::OrOr {
            self.bump();
            let l = self.to_pred(lhs, pos)?;
            let rpos = self.pos();
            let r = self.and()?;
            lhs = Ex::P(l.or(self.to_pred(r, rpos)?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Ex, ParseError> {
        let pos = self.pos();
        let mut lhs = self.unary()?;
        while self.is_kw("and") || *self.peek() == Tok::AndAnd {
            self.bump();
            let l = self.to_pred(lhs, pos)?;
            let rpos = self.pos();
            let r = self.unary()?;
            lhs = Ex::P(l.and(self.to_pred(r, rpos)?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ex, ParseError> {
        if self.is_kw("not") || *self.peek() == Tok::Bang {
            self.bump();
            let pos = self.pos();
            let inner = self.unary()?;
            return Ok(Ex::P(self.to_pred(inner, pos)?.not()));
        }
        let kind = if self.is_kw("forall") {
            Quantifier::Forall
        } else if self.is_kw("exists") {
            Quantifier::Exists
        } else {
            return self.comparison();
        };
        self.bump();
        self.expect(Tok::LParen)?;
        let var = self.ident()?;
        self.expect(Tok::Colon)?;
        let range = self.range()?;
        self.expect(Tok::RParen)?;
        let pos = self.pos();
        let body = self.imply()?;
        let body = self.to_pred(body, pos)?;
        Ok(Ex::P(Pred::Quant { kind, var, range, body: Box::new(body) }))
    }

    fn range(&mut self) -> Result<RangeSpec, ParseError> {
        if self.is_kw("int") && self.toks.get(self.at + 1).is_some_and(|t| t.0 == Tok::LBrack) {
            self.bump();
            self.bump();
            let lo = self.term()?;
            self.expect(Tok::Comma)?;
            let hi = self.term()?;
            self.expect(Tok::RBrack)?;
            return Ok(RangeSpec::Int(lo, hi));
        }
        match self.peek() {
            Tok::Ident(_) => Ok(RangeSpec::Named(self.ident()?)),
            _ => Err(self.unexpected(&["`int[`", "range name"])),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let pos = self.pos();
        let ex = self.additive()?;
        self.to_term(ex, pos)
    }

    fn cmp_op(&self) -> Option<CmpOp> {
        Some(match self.peek() {
            Tok::Eq => CmpOp::Eq,
            Tok::Ne => CmpOp::Ne,
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::Gt => CmpOp::Gt,
            Tok::Ge => CmpOp::Ge,
            _ => return None,
        })
    }

    fn comparison(&mut self) -> Result<Ex, ParseError> {
        let pos = self.pos();
        let lhs = self.additive()?;
        let Some(op) = self.cmp_op() else {
            return Ok(lhs);
        };
        self.bump();
        let lhs = self.to_term(lhs, pos)?;
        let rhs = self.term()?;
        if self.cmp_op().is_some() {
            return Err(self.error_at(self.pos(), "comparisons do not chain".into(), &[]));
        }
        Ok(Ex::P(Pred::Cmp(op, lhs, rhs)))
    }

    fn additive(&mut self) -> Result<Ex, ParseError> {
        let pos = self.pos();
        let mut lhs = self.atom()?;
        loop {
            let add = match self.peek() {
                Tok::Plus => true,
                Tok::Minus => false,
                _ => return Ok(lhs),
            };
            self.bump();
            let l = self.to_term(lhs, pos)?;
            let rpos = self.pos();
            let r = self.atom()?;
            let r = self.to_term(r, rpos)?;
            lhs = Ex::T(if add { l.plus(r) } else { l.minus(r) });
        }
    }

    fn atom(&mut self) -> Result<Ex, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                let v = i64::try_from(v)
                    .map_err(|_| self.error_at(pos, format!("integer literal `{v}` is too large"), &[]))?;
                Ok(Ex::T(Term::Int(v)))
            }
            Tok::Minus => {
                self.bump();
                match self.peek().clone() {
                    Tok::Int(v) => {
                        self.bump();
                        let v = 0i64
                            .checked_sub_unsigned(v)
                            .ok_or_else(|| self.error_at(pos, format!("integer literal `-{v}` is too small"), &[]))?;
                        Ok(Ex::T(Term::Int(v)))
                    }
                    _ => Err(self.unexpected(&["integer"])),
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.imply()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Ex::P(Pred::Bool(s == "true")))
            }
            Tok::Ident(s) if s == "not" || s == "forall" || s == "exists" => self.unary(),
            Tok::Ident(_) => self.path(),
            _ => Err(self.unexpected(&ATOM_START)),
        }
    }

    fn subscript_and_field(&mut self) -> Result<(Option<Box<Term>>, Option<Ident>), ParseError> {
        let mut index = None;
        if *self.peek() == Tok::LBrack {
            self.bump();
            index = Some(Box::new(self.term()?));
            self.expect(Tok::RBrack)?;
        }
        let mut field = None;
        if *self.peek() == Tok::Dot {
            self.bump();
            field = Some(self.ident()?);
        }
        Ok((index, field))
    }

    fn path(&mut self) -> Result<Ex, ParseError> {
        let head = self.ident()?;
        let process = match self.peek() {
            Tok::LParen => {
                self.bump();
                let arg = self.term()?;
                self.expect(Tok::RParen)?;
                if *self.peek() != Tok::Dot {
                    return Err(self.unexpected(&["`.`"]));
                }
                Some(ProcRef { template: head.clone(), arg: Some(Box::new(arg)) })
            }
            Tok::Dot => Some(ProcRef { template: head.clone(), arg: None }),
            _ => None,
        };
        match process {
            Some(proc) => {
                self.bump();
                let var = self.ident()?;
                let (index, field) = self.subscript_and_field()?;
                if index.is_none() && field.is_none() {
                    return Ok(Ex::Path(proc, var));
                }
                Ok(Ex::T(Term::Access(Access { process: Some(proc), var, index, field })))
            }
            None => {
                let (index, field) = self.subscript_and_field()?;
                if index.is_none() && field.is_none() {
                    return Ok(Ex::T(Term::Name(head)));
                }
                Ok(Ex::T(Term::Access(Access { process: None, var: head, index, field })))
            }
        }
    }
}

/// Parses one property. Never panics; malformed input yields a positioned
/// diagnostic.
pub fn parse_property(text: &str) -> Result<PropertyAst, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0 };
    let quantifier = match p.peek() {
        Tok::Always => PathQuantifier::Invariant,
        Tok::Eventually => PathQuantifier::Reach,
        Tok::Unsupported(q) => {
            let q = *q;
            return Err(p.error_at(p.pos(), format!("unsupported path quantifier `{q}`"), &["`A[]`", "`E<>`"]));
        }
        _ => return Err(p.unexpected(&["`A[]`", "`E<>`"])),
    };
    p.bump();
    let pos = p.pos();
    let ex = p.imply()?;
    let pred = p.to_pred(ex, pos)?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected(&["`and`", "`or`", "`imply`", "end of input"]));
    }
    Ok(PropertyAst { quantifier, pred })
}

/// Parses a standalone predicate (no path quantifier).
pub fn parse_predicate(text: &str) -> Result<Pred, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0 };
    let pos = p.pos();
    let ex = p.imply()?;
    let pred = p.to_pred(ex, pos)?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected(&["`and`", "`or`", "`imply`", "end of input"]));
    }
    Ok(pred)
}
