//! Recursive-descent parser for polynomial expressions.
//!
//! ```text
//! expr     := term (('+'|'-') term)* ;
//! term     := factor ('*' factor)* ;
//! factor   := '-' factor | base ('^' nat)? ;
//! base     := rational | ident | '(' expr ')' ;
//! rational := nat ('/' nat)? ;
//! ```
//!
//! There is no implicit multiplication, and `/` only appears inside rational
//! literals. Unary minus binds looser than `^`, so `-x^2` is `-(x^2)`.

use num_bigint::BigInt;

use super::{PolyError, PolyRing, Polynomial};
use crate::scalar::{Field, Rational};

const MAX_EXPONENT: u32 = 4096;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Nat(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    End,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, PolyError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '/' => Tok::Slash,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            d if d.is_ascii_digit() => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((start, Tok::Nat(text[start..i].to_string())));
                continue;
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
                continue;
            }
            other => {
                return Err(PolyError::Syntax { pos: start, msg: format!("unexpected character {other:?}") });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser<'a, F: Field> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    ring: &'a PolyRing<F>,
}

impl<F: Field> Parser<'_, F> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Polynomial<F>, PolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial<F>, PolyError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.factor()?;
                }
                Tok::Slash => {
                    let pos = self.pos();
                    self.bump();
                    let rhs = self.factor()?;
                    if rhs.is_constant() {
                        return Err(PolyError::Syntax {
                            pos,
                            msg: "'/' is only allowed inside a rational literal such as 3/2".into(),
                        });
                    }
                    return Err(PolyError::NonConstantDivision { pos });
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial<F>, PolyError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-&self.factor()?);
        }
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let pos = self.pos();
            let e = match self.bump() {
                Tok::Nat(digits) => digits
                    .parse::<u32>()
                    .ok()
                    .filter(|&e| e <= MAX_EXPONENT)
                    .ok_or_else(|| PolyError::Syntax { pos, msg: format!("exponent {digits} too large") })?,
                _ => return Err(PolyError::Syntax { pos, msg: "expected a natural-number exponent".into() }),
            };
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Polynomial<F>, PolyError> {
        match self.peek().clone() {
            Tok::Nat(n) => {
                self.bump();
                let numer: BigInt = n.parse().expect("digits");
                let mut value = Rational::from_integer(numer);
                if *self.peek() == Tok::Slash {
                    let pos = self.pos();
                    self.bump();
                    match self.peek().clone() {
                        Tok::Nat(d) => {
                            self.bump();
                            let denom: BigInt = d.parse().expect("digits");
                            value = Rational::new(value.numer().clone(), denom)
                                .map_err(|_| PolyError::Syntax { pos, msg: "zero denominator".into() })?;
                        }
                        _ => {
                            let rhs = self.base()?;
                            if rhs.is_constant() {
                                return Err(PolyError::Syntax {
                                    pos,
                                    msg: "'/' is only allowed inside a rational literal such as 3/2".into(),
                                });
                            }
                            return Err(PolyError::NonConstantDivision { pos });
                        }
                    }
                }
                Ok(self.ring.constant(self.ring.field().from_rational(&value)?))
            }
            Tok::Ident(name) => {
                let pos = self.pos();
                self.bump();
                self.ring.var_named(&name).map_err(|e| match e {
                    PolyError::UnknownVariable { name } => PolyError::UnknownVariable { name: format!("{name} (at byte {pos})") },
                    other => other,
                })
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return self.syntax("expected ')'");
                }
                self.bump();
                Ok(inner)
            }
            Tok::End => self.syntax("unexpected end of input"),
            other => self.syntax(format!("unexpected token {other:?}")),
        }
    }
}

/// Parses `text` into a polynomial over `ring`.
pub fn parse_poly<F: Field>(text: &str, ring: &PolyRing<F>) -> Result<Polynomial<F>, PolyError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, at: 0, ring };
    let out = p.expr()?;
    if *p.peek() != Tok::End {
        return p.syntax(format!("unexpected token {:?}", p.peek()));
    }
    Ok(out)
}
