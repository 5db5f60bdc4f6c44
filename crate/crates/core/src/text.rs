//! Text form of polynomials.
//!
//! ```text
//! polynomial := term (('+' | '-') term)*
//! term       := [sign] coeff ['*'] ['X' ['^' nat]]   (coeff optional before X)
//! coeff      := int | int '/' posint | '(' rational ('+'|'-') rational '*' 's' ')'
//! ```
//!
//! `s` stands for `√d` in quadratic fields. Prime-field coefficients are
//! written as plain residues. Printing then parsing is the identity.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::{parse_rational, Field, PrimeField, QuadElem, QuadraticField, Rational, RationalField};
use crate::poly::Polynomial;

pub fn format_polynomial<F: Field>(p: &Polynomial<F>) -> String {
    let f = p.field();
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, c) in p.coeffs().iter().enumerate().rev() {
        if f.is_zero(c) {
            continue;
        }
        let negative = f.is_signed_literal(c) == Some(true);
        let mag = if negative { f.neg(c) } else { c.clone() };
        let coeff = if i > 0 && mag == f.one() {
            String::new()
        } else {
            f.format(&mag)
        };
        let mono = match i {
            0 => String::new(),
            1 => "X".to_string(),
            _ => format!("X^{i}"),
        };
        let body = match (coeff.is_empty(), mono.is_empty()) {
            (false, false) => format!("{coeff}*{mono}"),
            (true, _) => mono,
            (_, true) => coeff,
        };
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    out
}

/// Fields whose coefficients can be read from text.
pub trait TextField: Field {
    /// Converts a parsed coefficient `u` (plus `v·s` when written in
    /// parenthesised form) into a field element.
    fn coeff_from_parts(&self, u: &Rational, surd: Option<&Rational>) -> Result<Self::Elem, String>;
}

impl TextField for RationalField {
    fn coeff_from_parts(&self, u: &Rational, surd: Option<&Rational>) -> Result<Rational, String> {
        match surd {
            Some(v) if !v.is_zero() => Err("surd coefficient in Q".into()),
            _ => Ok(u.clone()),
        }
    }
}

impl TextField for QuadraticField {
    fn coeff_from_parts(&self, u: &Rational, surd: Option<&Rational>) -> Result<QuadElem, String> {
        Ok(QuadElem::new(
            u.clone(),
            surd.cloned().unwrap_or_else(Rational::zero),
        ))
    }
}

impl TextField for PrimeField {
    fn coeff_from_parts(&self, u: &Rational, surd: Option<&Rational>) -> Result<u64, String> {
        if surd.is_some_and(|v| !v.is_zero()) {
            return Err(format!("surd coefficient in F_{}", self.modulus()));
        }
        self.from_rational(u).map_err(|e| e.to_string())
    }
}

pub fn parse_polynomial<F: TextField>(text: &str, field: &F) -> Result<Polynomial<F>> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut coeffs: Vec<F::Elem> = Vec::new();
    parser.skip_ws();
    if parser.peek().is_none() {
        return Err(parser.error("empty polynomial"));
    }
    let mut first = true;
    loop {
        parser.skip_ws();
        let mut negative = false;
        if !first {
            match parser.peek() {
                Some(b'+') => parser.pos += 1,
                Some(b'-') => {
                    parser.pos += 1;
                    negative = true;
                }
                None => break,
                Some(_) => return Err(parser.error("expected '+' or '-'")),
            }
        }
        first = false;
        let (coeff, power) = parser.term(field)?;
        let coeff = if negative { field.neg(&coeff) } else { coeff };
        if coeffs.len() <= power {
            coeffs.resize(power + 1, field.zero());
        }
        coeffs[power] = field.add(&coeffs[power], &coeff);
    }
    Ok(Polynomial::new(field.clone(), coeffs))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits")
    }

    /// `int ['/' posint]`, unsigned.
    fn unsigned_rational(&mut self) -> Result<Rational> {
        self.skip_ws();
        let start = self.pos;
        let num = self.digits().to_string();
        if num.is_empty() {
            return Err(self.error("expected a number"));
        }
        let mut text = num;
        if self.eat(b'/') {
            self.skip_ws();
            let den = self.digits();
            if den.is_empty() {
                return Err(self.error("expected a denominator"));
            }
            text = format!("{text}/{den}");
        }
        parse_rational(&text).ok_or(Error::Parse {
            offset: start,
            message: format!("invalid rational '{text}'"),
        })
    }

    fn signed_rational(&mut self) -> Result<Rational> {
        self.skip_ws();
        let negative = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let r = self.unsigned_rational()?;
        Ok(if negative { -r } else { r })
    }

    fn term<F: TextField>(&mut self, field: &F) -> Result<(F::Elem, usize)> {
        self.skip_ws();
        let mut negative = false;
        while let Some(b @ (b'+' | b'-')) = self.peek() {
            negative ^= b == b'-';
            self.pos += 1;
            self.skip_ws();
        }
        let coeff_start = self.pos;
        let coeff = match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let u = self.signed_rational()?;
                self.skip_ws();
                let surd = match self.peek() {
                    Some(b @ (b'+' | b'-')) => {
                        self.pos += 1;
                        let v = self.unsigned_rational()?;
                        self.eat(b'*');
                        if !self.eat(b's') {
                            return Err(self.error("expected 's'"));
                        }
                        Some(if b == b'-' { -v } else { v })
                    }
                    _ => None,
                };
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Some(field.coeff_from_parts(&u, surd.as_ref()).map_err(|m| {
                    Error::Parse {
                        offset: coeff_start,
                        message: format!("coefficient not in field: {m}"),
                    }
                })?)
            }
            Some(b) if b.is_ascii_digit() => {
                let u = self.unsigned_rational()?;
                Some(field.coeff_from_parts(&u, None).map_err(|m| Error::Parse {
                    offset: coeff_start,
                    message: format!("coefficient not in field: {m}"),
                })?)
            }
            _ => None,
        };
        let starred = coeff.is_some() && self.eat(b'*');
        self.skip_ws();
        let power = match self.peek() {
            Some(b'X' | b'x') => {
                self.pos += 1;
                if self.eat(b'^') {
                    self.skip_ws();
                    let start = self.pos;
                    let d = self.digits();
                    if d.is_empty() {
                        return Err(self.error("expected an exponent"));
                    }
                    d.parse::<usize>()
                        .ok()
                        .filter(|&n| n <= 100_000)
                        .ok_or(Error::Parse {
                            offset: start,
                            message: "exponent too large".into(),
                        })?
                } else {
                    1
                }
            }
            _ if coeff.is_none() => return Err(self.error("expected a coefficient or X")),
            _ if starred => return Err(self.error("expected X after '*'")),
            _ => 0,
        };
        let mut c = coeff.unwrap_or_else(|| field.one());
        if negative {
            c = field.neg(&c);
        }
        Ok((c, power))
    }
}
