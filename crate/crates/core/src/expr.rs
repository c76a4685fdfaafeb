//! Right-hand-side expressions `f(x, y1, y2)`.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := atom ('^' exponent)?
//! exponent := integer ('^' exponent)?          (right-associative)
//!           | '(' integer ')' ('^' exponent)?
//! atom     := number | 'x' | 'y1' | 'y2' | parameter | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus, so `-y1^2` is `-(y1^2)`. Exponents
//! are non-negative integer literals. Named parameters are replaced by
//! their numeric value while parsing.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use core::fmt;

use crate::series::{SeriesError, TruncatedSeries};

#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Constant(f64),
    X,
    Y1,
    Y2,
    Add(Box<Expression>, Box<Expression>),
    Sub(Box<Expression>, Box<Expression>),
    Mul(Box<Expression>, Box<Expression>),
    Div(Box<Expression>, Box<Expression>),
    Neg(Box<Expression>),
    PowInt(Box<Expression>, u32),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    /// Byte offset into the source text.
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("unexpected character '{0}'")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown identifier '{0}'")]
    UnknownIdentifier(String),
    #[error("invalid number literal '{0}'")]
    InvalidNumber(String),
    #[error("exponent must be a non-negative integer literal")]
    InvalidExponent,
    #[error("exponent too large")]
    ExponentOverflow,
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero at x={x}, y1={y1}, y2={y2}")]
    DivisionByZero { x: f64, y1: f64, y2: f64 },
    #[error("non-finite value at x={x}, y1={y1}, y2={y2}")]
    NonFinite { x: f64, y1: f64, y2: f64 },
}

/// A value domain in which expressions can be evaluated.
pub trait Algebra {
    type Value;
    type Error;

    fn constant(&self, c: f64) -> Self::Value;
    fn x(&self) -> Self::Value;
    fn y1(&self) -> Self::Value;
    fn y2(&self) -> Self::Value;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, Self::Error>;
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, Self::Error>;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, Self::Error>;
    fn div(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value, Self::Error>;
    fn neg(&self, a: &Self::Value) -> Self::Value;
    fn pow(&self, a: &Self::Value, p: u32) -> Result<Self::Value, Self::Error>;
}

impl Expression {
    pub fn evaluate<A: Algebra>(&self, alg: &A) -> Result<A::Value, A::Error> {
        use Expression::*;
        Ok(match self {
            Constant(c) => alg.constant(*c),
            X => alg.x(),
            Y1 => alg.y1(),
            Y2 => alg.y2(),
            Add(a, b) => alg.add(&a.evaluate(alg)?, &b.evaluate(alg)?)?,
            Sub(a, b) => alg.sub(&a.evaluate(alg)?, &b.evaluate(alg)?)?,
            Mul(a, b) => alg.mul(&a.evaluate(alg)?, &b.evaluate(alg)?)?,
            Div(a, b) => alg.div(&a.evaluate(alg)?, &b.evaluate(alg)?)?,
            Neg(a) => alg.neg(&a.evaluate(alg)?),
            PowInt(a, p) => alg.pow(&a.evaluate(alg)?, *p)?,
        })
    }

    /// True when the tree has no division, i.e. it is a polynomial in
    /// `x`, `y1`, `y2`.
    pub fn is_polynomial(&self) -> bool {
        use Expression::*;
        match self {
            Constant(_) | X | Y1 | Y2 => true,
            Div(..) => false,
            Add(a, b) | Sub(a, b) | Mul(a, b) => a.is_polynomial() && b.is_polynomial(),
            Neg(a) | PowInt(a, _) => a.is_polynomial(),
        }
    }

    /// Does the expression mention `y1` / `y2` / `x`?
    pub fn mentions(&self, var: &Expression) -> bool {
        use Expression::*;
        match self {
            Constant(_) => false,
            X | Y1 | Y2 => self == var,
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.mentions(var) || b.mentions(var),
            Neg(a) | PowInt(a, _) => a.mentions(var),
        }
    }

    /// Upper bound on the total polynomial degree in `(x, y1, y2)`;
    /// `None` for non-polynomial trees.
    pub fn degree_bound(&self) -> Option<u32> {
        use Expression::*;
        match self {
            Constant(_) => Some(0),
            X | Y1 | Y2 => Some(1),
            Add(a, b) | Sub(a, b) => Some(a.degree_bound()?.max(b.degree_bound()?)),
            Mul(a, b) => Some(a.degree_bound()? + b.degree_bound()?),
            Div(..) => None,
            Neg(a) => a.degree_bound(),
            PowInt(a, p) => Some(a.degree_bound()?.saturating_mul(*p)),
        }
    }
}

/// Parses `text` with no named parameters.
pub fn parse_expression(text: &str) -> Result<Expression, ParseError> {
    parse_expression_with(text, &|_| None)
}

/// Parses `text`, resolving identifiers other than `x`, `y1`, `y2` through
/// `params`; resolved parameters become numeric constants.
pub fn parse_expression_with(text: &str, params: &dyn Fn(&str) -> Option<f64>) -> Result<Expression, ParseError> {
    let mut p = Parser { src: text, pos: 0, params };
    let e = p.expr()?;
    p.skip_ws();
    match p.peek() {
        None => Ok(e),
        Some(c) => Err(p.error(ParseErrorKind::UnexpectedChar(c))),
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    params: &'a dyn Fn(&str) -> Option<f64>,
}

impl Parser<'_> {
    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError { position: self.pos, kind }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            return Ok(());
        }
        Err(match self.peek() {
            Some(other) => self.error(ParseErrorKind::UnexpectedChar(other)),
            None => self.error(ParseErrorKind::UnexpectedEnd),
        })
    }

    fn expr(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expression::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expression::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expression::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expression::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expression, ParseError> {
        if self.eat('-') {
            return Ok(Expression::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expression, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            let p = self.exponent()?;
            return Ok(Expression::PowInt(Box::new(base), p));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let parenthesized = self.eat('(');
        self.skip_ws();
        let digits_start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start || matches!(self.peek(), Some('.' | 'e' | 'E')) {
            self.pos = start;
            return Err(self.error(ParseErrorKind::InvalidExponent));
        }
        let base: u32 = self.src[digits_start..self.pos]
            .parse()
            .map_err(|_| ParseError { position: digits_start, kind: ParseErrorKind::ExponentOverflow })?;
        if parenthesized {
            self.expect(')')?;
        }
        if self.eat('^') {
            let top = self.exponent()?;
            return base.checked_pow(top).ok_or(ParseError { position: start, kind: ParseErrorKind::ExponentOverflow });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expression, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error(ParseErrorKind::UnexpectedEnd)),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => {
                while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
                    self.pos += self.peek().map_or(0, char::len_utf8);
                }
                let name = &self.src[start..self.pos];
                match name {
                    "x" => Ok(Expression::X),
                    "y1" => Ok(Expression::Y1),
                    "y2" => Ok(Expression::Y2),
                    _ => match (self.params)(name) {
                        Some(v) => Ok(Expression::Constant(v)),
                        None => Err(ParseError { position: start, kind: ParseErrorKind::UnknownIdentifier(name.to_string()) }),
                    },
                }
            }
            Some(c) => Err(self.error(ParseErrorKind::UnexpectedChar(c))),
        }
    }

    fn number(&mut self) -> Result<Expression, ParseError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = &self.src[start..i];
        self.pos = i;
        text.parse::<f64>()
            .map(Expression::Constant)
            .map_err(|_| ParseError { position: start, kind: ParseErrorKind::InvalidNumber(text.to_string()) })
    }
}

impl fmt::Display for Expression {
    /// Fully parenthesised form that re-parses to an equivalent tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Expression::*;
        match self {
            Constant(c) if *c < 0.0 => write!(f, "(-{})", -c),
            Constant(c) => write!(f, "{c}"),
            X => f.write_str("x"),
            Y1 => f.write_str("y1"),
            Y2 => f.write_str("y2"),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            Div(a, b) => write!(f, "({a} / {b})"),
            Neg(a) => write!(f, "(-{a})"),
            PowInt(a, p) => write!(f, "({a}^{p})"),
        }
    }
}

/// Plain real evaluation at a point.
#[derive(Debug, Clone, Copy)]
pub struct ScalarAlgebra {
    pub x: f64,
    pub y1: f64,
    pub y2: f64,
}

impl ScalarAlgebra {
    fn check(&self, v: f64) -> Result<f64, EvalError> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite { x: self.x, y1: self.y1, y2: self.y2 })
        }
    }
}

impl Algebra for ScalarAlgebra {
    type Value = f64;
    type Error = EvalError;

    fn constant(&self, c: f64) -> f64 {
        c
    }
    fn x(&self) -> f64 {
        self.x
    }
    fn y1(&self) -> f64 {
        self.y1
    }
    fn y2(&self) -> f64 {
        self.y2
    }
    fn add(&self, a: &f64, b: &f64) -> Result<f64, EvalError> {
        self.check(a + b)
    }
    fn sub(&self, a: &f64, b: &f64) -> Result<f64, EvalError> {
        self.check(a - b)
    }
    fn mul(&self, a: &f64, b: &f64) -> Result<f64, EvalError> {
        self.check(a * b)
    }
    fn div(&self, a: &f64, b: &f64) -> Result<f64, EvalError> {
        if *b == 0.0 {
            return Err(EvalError::DivisionByZero { x: self.x, y1: self.y1, y2: self.y2 });
        }
        self.check(a / b)
    }
    fn neg(&self, a: &f64) -> f64 {
        -a
    }
    fn pow(&self, a: &f64, p: u32) -> Result<f64, EvalError> {
        self.check(libm::pow(*a, p as f64))
    }
}

/// Evaluation on λ-series arguments; `x` is the constant series `[x, 0, …]`.
#[derive(Debug, Clone, Copy)]
pub struct SeriesAlgebra<'a> {
    pub x: f64,
    pub y1: &'a TruncatedSeries,
    pub y2: &'a TruncatedSeries,
}

impl Algebra for SeriesAlgebra<'_> {
    type Value = TruncatedSeries;
    type Error = SeriesError;

    fn constant(&self, c: f64) -> TruncatedSeries {
        TruncatedSeries::constant(c, self.y1.order())
    }
    fn x(&self) -> TruncatedSeries {
        self.constant(self.x)
    }
    fn y1(&self) -> TruncatedSeries {
        self.y1.clone()
    }
    fn y2(&self) -> TruncatedSeries {
        self.y2.clone()
    }
    fn add(&self, a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        a.add(b)
    }
    fn sub(&self, a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        a.sub(b)
    }
    fn mul(&self, a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        a.mul(b)
    }
    fn div(&self, a: &TruncatedSeries, b: &TruncatedSeries) -> Result<TruncatedSeries, SeriesError> {
        a.div(b)
    }
    fn neg(&self, a: &TruncatedSeries) -> TruncatedSeries {
        a.neg()
    }
    fn pow(&self, a: &TruncatedSeries, p: u32) -> Result<TruncatedSeries, SeriesError> {
        a.pow_int(p)
    }
}

pub fn eval_scalar(e: &Expression, x: f64, y1: f64, y2: f64) -> Result<f64, EvalError> {
    e.evaluate(&ScalarAlgebra { x, y1, y2 })
}

/// The λ-Taylor expansion of `e(x, y1(λ), y2(λ))` truncated at the common
/// order of `y1` and `y2`.
pub fn eval_series(
    e: &Expression,
    x: f64,
    y1: &TruncatedSeries,
    y2: &TruncatedSeries,
) -> Result<TruncatedSeries, SeriesError> {
    if y1.order() != y2.order() {
        return Err(SeriesError::OrderMismatch { left: y1.order(), right: y2.order() });
    }
    e.evaluate(&SeriesAlgebra { x, y1, y2 })
}
