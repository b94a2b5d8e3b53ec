//! Parser for polynomial expressions.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr    := ['-'] term (('+' | '-') term)*
//! term    := factor ('*' factor)*
//! factor  := atom ['^' integer]
//! atom    := '(' expr ')' | identifier | literal
//! literal := integer ['/' integer]
//! ```
//!
//! Only `+ - * ^ /` and parentheses are supported; `/` is a rational
//! literal separator, not a division operator. Identifiers must name
//! variables of the supplied context; the reserved names y<digits>,
//! a<digits>, z, t never appear in user contexts and are rejected with a
//! dedicated message.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::context::{is_reserved, VarContext};
use crate::poly::{Monomial, Polynomial};
use crate::rational::{Int, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(Int),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

type Spanned = (Tok, usize, usize);

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, message: message.into() }
    }

    fn bump(&mut self) -> u8 {
        let c = self.src[self.pos];
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        c
    }

    fn tokens(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            if c.is_ascii_whitespace() {
                self.bump();
                continue;
            }
            let (line, col) = (self.line, self.col);
            let tok = match c {
                b'+' => {
                    self.bump();
                    Tok::Plus
                }
                b'-' => {
                    self.bump();
                    Tok::Minus
                }
                b'*' => {
                    self.bump();
                    Tok::Star
                }
                b'^' => {
                    self.bump();
                    Tok::Caret
                }
                b'/' => {
                    self.bump();
                    Tok::Slash
                }
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b'0'..=b'9' => {
                    let start = self.pos;
                    while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        self.bump();
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    Tok::Int(text.parse().unwrap())
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let start = self.pos;
                    while self.pos < self.src.len()
                        && (self.src[self.pos].is_ascii_alphanumeric()
                            || self.src[self.pos] == b'_')
                    {
                        self.bump();
                    }
                    let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                    Tok::Ident(text.to_string())
                }
                other => {
                    return Err(self.error(format!("unexpected character `{}`", other as char)))
                }
            };
            out.push((tok, line, col));
        }
        Ok(out)
    }
}

struct Parser<'c> {
    toks: Vec<Spanned>,
    pos: usize,
    ctx: &'c Arc<VarContext>,
    end: (usize, usize),
}

impl<'c> Parser<'c> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|&(_, l, c)| (l, c)).unwrap_or(self.end)
    }

    fn error_here(&self, message: impl Into<String>) -> ParseError {
        Self::error_at(self.here(), message)
    }

    fn error_at((line, col): (usize, usize), message: impl Into<String>) -> ParseError {
        ParseError { line, col, message: message.into() }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, want: &Tok) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error_here(format!("expected {want}, found {t}"))),
            None => Err(self.error_here(format!("expected {want}, found end of input"))),
        }
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut negate = false;
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.pos += 1;
            negate = true;
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some(Tok::Star)) {
            self.pos += 1;
            let f = self.factor()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.pos += 1;
            let at = self.here();
            match self.next() {
                Some(Tok::Int(n)) => {
                    let e: u32 =
                        n.try_into().map_err(|_| Self::error_at(at, "exponent too large"))?;
                    Ok(base.pow(e))
                }
                _ => Err(Self::error_at(at, "expected a nonnegative integer exponent after `^`")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let at = self.here();
        match self.next() {
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.eat(&Tok::RParen)?;
                Ok(inner)
            }
            Some(Tok::Int(n)) => {
                // optional "/d" rational literal
                if matches!(self.peek(), Some(Tok::Slash)) {
                    self.pos += 1;
                    let den_at = self.here();
                    match self.next() {
                        Some(Tok::Int(d)) => {
                            if d.is_zero() {
                                return Err(Self::error_at(den_at, "zero denominator in literal"));
                            }
                            Ok(Polynomial::constant(self.ctx, Rational::new(n, d)))
                        }
                        _ => Err(Self::error_at(
                            den_at,
                            "expected an integer denominator after `/`",
                        )),
                    }
                } else {
                    Ok(Polynomial::constant(self.ctx, Rational::from_integer(n)))
                }
            }
            Some(Tok::Ident(name)) => match self.ctx.index_of(&name) {
                Some(i) => Ok(Polynomial::var(self.ctx, i)),
                None if is_reserved(&name) => {
                    Err(Self::error_at(at, format!("`{name}` is a reserved variable name")))
                }
                None => Err(Self::error_at(at, format!("unknown variable `{name}`"))),
            },
            Some(t) => Err(Self::error_at(at, format!("unexpected {t}"))),
            None => Err(Self::error_at(at, "unexpected end of input")),
        }
    }
}

/// Parses an expression into a polynomial over the given context.
pub fn parse_poly(src: &str, ctx: &Arc<VarContext>) -> Result<Polynomial, ParseError> {
    let lines = src.lines().count().max(1);
    let last_len = src.lines().last().map(|l| l.len()).unwrap_or(0);
    let toks = Lexer::new(src).tokens()?;
    if toks.is_empty() {
        return Err(ParseError { line: 1, col: 1, message: "empty expression".into() });
    }
    let mut parser = Parser { toks, pos: 0, ctx, end: (lines, last_len + 1) };
    let p = parser.expr()?;
    if parser.pos < parser.toks.len() {
        let t = parser.peek().unwrap().clone();
        return Err(parser.error_here(format!("trailing {t} after expression")));
    }
    Ok(p)
}

/// Parses a single monomial spelled as an expression (used for generator
/// listings); the expression must have exactly one term with coefficient 1.
pub fn parse_monomial(src: &str, ctx: &Arc<VarContext>) -> Result<Monomial, ParseError> {
    let p = parse_poly(src, ctx)?;
    let mut terms = p.terms();
    match (terms.next(), terms.next()) {
        (Some((m, c)), None) if c == &Rational::from_integer(Int::from(1)) => Ok(m.clone()),
        _ => Err(ParseError {
            line: 1,
            col: 1,
            message: format!("`{src}` is not a monomial with coefficient 1"),
        }),
    }
}
