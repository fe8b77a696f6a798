//! Polynomial expressions: parsing, printing, evaluation to series.
//!
//! Grammar, loosest first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary ('*' unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := literal | identifier | '(' sum ')'
//! literal := digits ('/' digits)?
//! ```
//!
//! Exponents must evaluate to non-negative integer constants, so `x^2^3` is
//! `x^8`. There is no implicit multiplication: `2x` is rejected.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::error::Result;
use crate::rational::Rational;
use crate::series::{Series, MAX_VARS};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Var(usize),
    Num(Rational),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected {0}")]
    UnexpectedToken(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("malformed exponent: {0}")]
    MalformedExponent(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("invalid variable name {0:?}")]
    InvalidVariable(String),
    #[error("variable {0:?} declared twice")]
    DuplicateVariable(String),
    #[error("too many variables: {0} (at most {MAX_VARS})")]
    TooManyVariables(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at offset {offset}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// Byte offset into the input.
    pub offset: usize,
}

fn err<T>(kind: ParseErrorKind, offset: usize) -> Result<T, ParseError> {
    Err(ParseError { kind, offset })
}

/// Checks a variable declaration: valid identifiers, no repeats.
pub fn validate_vars(vars: &[String]) -> Result<(), ParseError> {
    if vars.len() > MAX_VARS {
        return err(ParseErrorKind::TooManyVariables(vars.len()), 0);
    }
    for (i, v) in vars.iter().enumerate() {
        let mut chars = v.chars();
        let ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return err(ParseErrorKind::InvalidVariable(v.clone()), 0);
        }
        if vars[..i].contains(v) {
            return err(ParseErrorKind::DuplicateVariable(v.clone()), 0);
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(r) => format!("number {r}"),
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let numer: num_bigint::BigInt = text[start..i].parse().unwrap();
                let mut value = Rational::from_integer(numer);
                if i < bytes.len() && bytes[i] == b'/' {
                    let dstart = i + 1;
                    let mut j = dstart;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j == dstart {
                        return err(ParseErrorKind::UnexpectedChar('/'), i);
                    }
                    let denom: num_bigint::BigInt = text[dstart..j].parse().unwrap();
                    if denom.is_zero() {
                        return err(ParseErrorKind::ZeroDenominator, dstart);
                    }
                    value /= Rational::from_integer(denom);
                    i = j;
                }
                out.push((Tok::Num(value), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap();
                return err(ParseErrorKind::UnexpectedChar(ch), start);
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    lhs = Expr::add(lhs, self.product()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    lhs = Expr::sub(lhs, self.product()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.offset();
        let exp = self.unary()?;
        let value = exp.constant_value().ok_or_else(|| ParseError {
            kind: ParseErrorKind::MalformedExponent("exponent must be a constant".into()),
            offset: at,
        })?;
        if !value.is_integer() || value.is_negative() {
            return err(
                ParseErrorKind::MalformedExponent(format!("{value} is not a non-negative integer")),
                at,
            );
        }
        let e = value.to_integer().to_u32().ok_or_else(|| ParseError {
            kind: ParseErrorKind::MalformedExponent(format!("{value} is too large")),
            offset: at,
        })?;
        Ok(Expr::Pow(Box::new(base), e))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        let Some(tok) = self.peek().cloned() else {
            return err(ParseErrorKind::UnexpectedEnd, at);
        };
        self.pos += 1;
        match tok {
            Tok::Num(r) => Ok(Expr::Num(r)),
            Tok::Ident(name) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => Ok(Expr::Var(i)),
                None => err(ParseErrorKind::UnknownVariable(name), at),
            },
            Tok::LParen => {
                let inner = self.sum()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    Some(t) => err(ParseErrorKind::UnexpectedToken(t.describe()), self.offset()),
                    None => err(ParseErrorKind::UnexpectedEnd, self.offset()),
                }
            }
            t => err(ParseErrorKind::UnexpectedToken(t.describe()), at),
        }
    }
}

/// Parses `text` over the declared variables.
pub fn parse_expr(text: &str, vars: &[String]) -> Result<Expr, ParseError> {
    validate_vars(vars)?;
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len(), vars };
    let e = p.sum()?;
    if let Some(t) = p.peek() {
        return err(ParseErrorKind::UnexpectedToken(t.describe()), p.offset());
    }
    Ok(e)
}

/// Parses and expands to a series truncated at `order`.
pub fn parse_series(text: &str, vars: &[String], order: u32) -> Result<Series> {
    let e = parse_expr(text, vars)?;
    e.to_series(vars.len(), order)
}

impl Expr {
    /// Unary minus with folding: `--a = a`, `-(c) = (−c)` for literals.
    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Neg(inner) => *inner,
            Expr::Num(c) => Expr::Num(-c),
            a => Expr::Neg(Box::new(a)),
        }
    }

    /// `a + (−b)` folds to `a − b`.
    pub fn add(a: Expr, b: Expr) -> Expr {
        match b {
            Expr::Neg(inner) => Expr::Sub(Box::new(a), inner),
            b => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    /// `a − (−b)` folds to `a + b`.
    pub fn sub(a: Expr, b: Expr) -> Expr {
        match b {
            Expr::Neg(inner) => Expr::Add(Box::new(a), inner),
            b => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    /// Applies the parser's folding rules bottom-up.
    pub fn normalize(self) -> Expr {
        match self {
            Expr::Neg(a) => Expr::neg(a.normalize()),
            Expr::Add(a, b) => Expr::add(a.normalize(), b.normalize()),
            Expr::Sub(a, b) => Expr::sub(a.normalize(), b.normalize()),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.normalize()), Box::new(b.normalize())),
            Expr::Pow(a, e) => Expr::Pow(Box::new(a.normalize()), e),
            e => e,
        }
    }

    /// Value when the expression has no variables.
    pub fn constant_value(&self) -> Option<Rational> {
        Some(match self {
            Expr::Var(_) => return None,
            Expr::Num(c) => c.clone(),
            Expr::Neg(a) => -a.constant_value()?,
            Expr::Add(a, b) => a.constant_value()? + b.constant_value()?,
            Expr::Sub(a, b) => a.constant_value()? - b.constant_value()?,
            Expr::Mul(a, b) => a.constant_value()? * b.constant_value()?,
            Expr::Pow(a, e) => {
                let base = a.constant_value()?;
                if *e > 4096 && !(base.is_zero() || base.abs().is_one()) {
                    return None;
                }
                num_traits::pow(base, *e as usize)
            }
        })
    }

    /// Expands into a truncated series in `nvars` variables.
    pub fn to_series(&self, nvars: usize, order: u32) -> Result<Series> {
        crate::series::check_shape(nvars, order)?;
        self.eval(nvars, order)
    }

    fn eval(&self, nvars: usize, order: u32) -> Result<Series> {
        Ok(match self {
            Expr::Var(i) => {
                if *i >= nvars {
                    return Err(crate::Error::BadIndex { index: *i, nvars });
                }
                Series::var(nvars, order, *i)
            }
            Expr::Num(c) => Series::constant(nvars, order, c.clone()),
            Expr::Neg(a) => -a.eval(nvars, order)?,
            Expr::Add(a, b) => a.eval(nvars, order)? + b.eval(nvars, order)?,
            Expr::Sub(a, b) => a.eval(nvars, order)? - b.eval(nvars, order)?,
            Expr::Mul(a, b) => a.eval(nvars, order)? * b.eval(nvars, order)?,
            Expr::Pow(a, e) => a.eval(nvars, order)?.pow(*e),
        })
    }

    /// Printer with minimal parentheses; reparses to the same tree.
    pub fn display<'a>(&'a self, vars: &'a [String]) -> impl fmt::Display + 'a {
        ExprDisplay { expr: self, vars }
    }

    fn level(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Num(c) if c.is_negative() => 3,
            Expr::Pow(..) => 4,
            Expr::Var(_) | Expr::Num(_) => 5,
        }
    }
}

struct ExprDisplay<'a> {
    expr: &'a Expr,
    vars: &'a [String],
}

impl ExprDisplay<'_> {
    fn child(&self, e: &Expr, min_level: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner = ExprDisplay { expr: e, vars: self.vars };
        if e.level() < min_level {
            write!(f, "({inner})")
        } else {
            write!(f, "{inner}")
        }
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expr {
            Expr::Var(i) => match self.vars.get(*i) {
                Some(name) => write!(f, "{name}"),
                None => write!(f, "?{i}"),
            },
            Expr::Num(c) => write!(f, "{c}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                self.child(a, 3, f)
            }
            Expr::Add(a, b) => {
                self.child(a, 1, f)?;
                write!(f, " + ")?;
                self.child(b, 2, f)
            }
            Expr::Sub(a, b) => {
                self.child(a, 1, f)?;
                write!(f, " - ")?;
                self.child(b, 2, f)
            }
            Expr::Mul(a, b) => {
                self.child(a, 2, f)?;
                write!(f, "*")?;
                self.child(b, 3, f)
            }
            Expr::Pow(a, e) => {
                self.child(a, 5, f)?;
                write!(f, "^{e}")
            }
        }
    }
}
