//! Expression syntax for ring elements.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '·' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' '-'? INT)?
//! atom   := INT | IDENT | '(' expr ')'
//! ```
//!
//! Identifiers are ring variables, `i` (ζ₄) or `zetaN` (ζ_N); ring variables
//! shadow the constants. Division and negative powers invert through the
//! geometric series, so the divisor needs a nonzero constant term.
//!
//! Variable declarations are comma separated `name:degree[:nilpotency]`.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::arith::{Cyclotomic, Rational};
use crate::error::{Error, Result};

use super::element::RingElement;
use super::ring::{is_identifier, GradedRing, GradedVariable};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    text: String,
    column: usize,
}

/// Where an expression sits in a larger document, for diagnostics.
#[derive(Clone, Copy, Debug, Default)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

fn tokenize(text: &str, at: Position) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = at.column + i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token { tok: Tok::Int(s.parse().unwrap()), text: s, column });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token { tok: Tok::Ident(s.clone()), text: s, column });
        } else if "+-*·/^()".contains(c) {
            let op = if c == '·' { '*' } else { c };
            out.push(Token { tok: Tok::Op(op), text: c.to_string(), column });
            i += 1;
        } else {
            return Err(Error::Parse {
                line: at.line,
                column,
                token: c.to_string(),
                message: "unexpected character".into(),
            });
        }
    }
    out.push(Token { tok: Tok::End, text: String::new(), column: at.column + chars.len() + 1 });
    Ok(out)
}

struct Parser<'a> {
    ring: &'a Arc<GradedRing>,
    toks: Vec<Token>,
    pos: usize,
    line: usize,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, t: &Token, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column: t.column,
            token: if t.tok == Tok::End { "<end>".into() } else { t.text.clone() },
            message: message.into(),
        }
    }

    /// Attaches the token position to an algebra error.
    fn located(&self, t: &Token, e: Error) -> Error {
        match e {
            Error::Parse { .. } => e,
            other => self.error(t, other.to_string()),
        }
    }

    fn expr(&mut self) -> Result<RingElement> {
        let mut acc = self.term()?;
        while let Tok::Op(op @ ('+' | '-')) = self.peek().tok {
            self.next();
            let rhs = self.term()?;
            acc = if op == '+' { acc.add(&rhs)? } else { acc.sub(&rhs)? };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RingElement> {
        let mut acc = self.unary()?;
        while let Tok::Op(op @ ('*' | '/')) = self.peek().tok {
            let t = self.next();
            let rhs = self.unary()?;
            acc = if op == '*' {
                acc.mul(&rhs)?
            } else {
                acc.mul(&rhs.inverse().map_err(|e| self.located(&t, e))?)?
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RingElement> {
        if self.peek().tok == Tok::Op('-') {
            self.next();
            return Ok(self.unary()?.neg());
        }
        if self.peek().tok == Tok::Op('+') {
            self.next();
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<RingElement> {
        let base = self.atom()?;
        if self.peek().tok != Tok::Op('^') {
            return Ok(base);
        }
        let caret = self.next();
        let negative = if self.peek().tok == Tok::Op('-') {
            self.next();
            true
        } else {
            false
        };
        let t = self.next();
        let Tok::Int(n) = &t.tok else {
            return Err(self.error(&t, "expected an integer exponent"));
        };
        let n: u32 = n.try_into().map_err(|_| self.error(&t, "exponent too large"))?;
        let e = if negative { -(n as i64) } else { n as i64 };
        base.powi(e).map_err(|err| self.located(&caret, err))
    }

    fn atom(&mut self) -> Result<RingElement> {
        let t = self.next();
        match &t.tok {
            Tok::Int(n) => Ok(RingElement::constant(self.ring, Rational::from_integer(n.clone()))),
            Tok::Ident(name) => {
                if let Ok(v) = RingElement::var(self.ring, name) {
                    return Ok(v);
                }
                if let Some(c) = named_constant(name) {
                    return Ok(RingElement::constant(self.ring, c));
                }
                Err(self.error(&t, format!("unknown variable `{name}`")))
            }
            Tok::Op('(') => {
                let e = self.expr()?;
                let close = self.next();
                if close.tok != Tok::Op(')') {
                    return Err(self.error(&close, "expected `)`"));
                }
                Ok(e)
            }
            Tok::End => Err(self.error(&t, "unexpected end of expression")),
            _ => Err(self.error(&t, "unexpected token")),
        }
    }
}

/// `i` and `zetaN`.
pub fn named_constant(name: &str) -> Option<Cyclotomic> {
    if name == "i" {
        return Some(Cyclotomic::i());
    }
    let m: usize = name.strip_prefix("zeta")?.parse().ok()?;
    (m >= 1).then(|| Cyclotomic::zeta(m))
}

pub fn parse_element(ring: &Arc<GradedRing>, text: &str) -> Result<RingElement> {
    parse_element_at(ring, text, Position { line: 1, column: 0 })
}

/// Parses with diagnostics offset to `at` (column of the character before
/// the expression).
pub fn parse_element_at(ring: &Arc<GradedRing>, text: &str, at: Position) -> Result<RingElement> {
    let toks = tokenize(text, at)?;
    let mut p = Parser { ring, toks, pos: 0, line: at.line };
    if p.peek().tok == Tok::End {
        let t = p.peek().clone();
        return Err(p.error(&t, "empty expression"));
    }
    let e = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::End {
        return Err(p.error(&t, "unexpected token"));
    }
    Ok(e)
}

/// Parses a scalar expression (no ring variables) into a cyclotomic.
pub fn parse_scalar(text: &str) -> Result<Cyclotomic> {
    let e = parse_element(&GradedRing::point(), text)?;
    Ok(e.constant_term())
}

/// `x:2:4, y:1` into variables.
pub fn parse_variables(text: &str) -> Result<Vec<GradedVariable>> {
    let bad = |item: &str, message: &str| Error::Parse {
        line: 1,
        column: text.find(item).map_or(0, |c| c + 1),
        token: item.to_string(),
        message: message.to_string(),
    };
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').map(str::trim).collect();
        if parts.len() < 2 || parts.len() > 3 || !is_identifier(parts[0]) {
            return Err(bad(item, "expected name:degree[:nilpotency]"));
        }
        let degree: u32 = parts[1].parse().map_err(|_| bad(item, "degree must be a positive integer"))?;
        let nil = match parts.get(2) {
            Some(n) => Some(n.parse::<u32>().map_err(|_| bad(item, "nilpotency must be a positive integer"))?),
            None => None,
        };
        out.push(GradedVariable::new(parts[0], degree, nil).map_err(|e| bad(item, &e.to_string()))?);
    }
    Ok(out)
}
