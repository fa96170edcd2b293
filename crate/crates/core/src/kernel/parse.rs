//! Text grammar for polynomials.
//!
//! ```text
//! poly   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := int ['/' posint] | name ['^' posint]
//! ```
//!
//! A name is either a ring variable or the generator symbol of the coefficient
//! field. Whitespace is insignificant.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::monomial::Monomial;
use super::poly::{Polynomial, Vars};
use super::rational::Rational;
use super::scalar::{Field, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    Expected(&'static str),
    UnknownVariable(String),
    ZeroExponent,
    NegativeExponent,
    ZeroDenominator,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the input.
    pub pos: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{c}' at {}", self.pos),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input at {}", self.pos),
            ParseErrorKind::Expected(what) => write!(f, "expected {what} at {}", self.pos),
            ParseErrorKind::UnknownVariable(v) => write!(f, "unknown variable '{v}' at {}", self.pos),
            ParseErrorKind::ZeroExponent => write!(f, "zero exponent at {}", self.pos),
            ParseErrorKind::NegativeExponent => write!(f, "negative exponent at {}", self.pos),
            ParseErrorKind::ZeroDenominator => write!(f, "zero denominator at {}", self.pos),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let mut out = Vec::new();
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < bytes.len() {
        let (pos, c) = bytes[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '+' => {
                out.push((pos, Tok::Plus));
                i += 1
            }
            '-' => {
                out.push((pos, Tok::Minus));
                i += 1
            }
            '*' => {
                out.push((pos, Tok::Star));
                i += 1
            }
            '/' => {
                out.push((pos, Tok::Slash));
                i += 1
            }
            '^' => {
                out.push((pos, Tok::Caret));
                i += 1
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && bytes[i].1.is_ascii_digit() {
                    i += 1;
                }
                let s: String = bytes[start..i].iter().map(|(_, c)| c).collect();
                out.push((pos, Tok::Int(s.parse().unwrap())));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].1.is_alphanumeric() || bytes[i].1 == '_') {
                    i += 1;
                }
                out.push((pos, Tok::Name(bytes[start..i].iter().map(|(_, c)| c).collect())));
            }
            other => return Err(ParseError { pos, kind: ParseErrorKind::UnexpectedChar(other) }),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    fixed_vars: bool,
    vars: Vec<String>,
    symbol: Option<&'a str>,
    field: &'a Field,
}

/// Raw term: coefficient as a polynomial in the generator, exponents by variable name index.
struct RawTerm {
    coeff: Scalar,
    exps: Vec<u32>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos(), kind })
    }

    fn expect_int(&mut self, what: &'static str) -> Result<BigInt, ParseError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = n.clone();
                self.at += 1;
                Ok(n)
            }
            Some(Tok::Minus) if what == "exponent" => self.err(ParseErrorKind::NegativeExponent),
            None => self.err(ParseErrorKind::UnexpectedEnd),
            _ => self.err(ParseErrorKind::Expected(what)),
        }
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        if self.peek() != Some(&Tok::Caret) {
            return Ok(1);
        }
        self.at += 1;
        let pos = self.pos();
        let e = self.expect_int("exponent")?;
        if e.is_zero() {
            return Err(ParseError { pos, kind: ParseErrorKind::ZeroExponent });
        }
        u32::try_from(e).map_err(|_| ParseError { pos, kind: ParseErrorKind::Expected("small exponent") })
    }

    fn term(&mut self, sign: i64) -> Result<RawTerm, ParseError> {
        let mut coeff = Scalar::one_in(self.field).scale(&Rational::from_integer(sign.into()));
        let mut exps = vec![0u32; self.vars.len()];
        loop {
            match self.peek().cloned() {
                Some(Tok::Int(n)) => {
                    self.at += 1;
                    let mut q = Rational::from_integer(n);
                    if self.peek() == Some(&Tok::Slash) {
                        self.at += 1;
                        let pos = self.pos();
                        let d = self.expect_int("denominator")?;
                        if d.is_zero() {
                            return Err(ParseError { pos, kind: ParseErrorKind::ZeroDenominator });
                        }
                        q /= Rational::from_integer(d);
                    }
                    coeff = coeff.scale(&q);
                }
                Some(Tok::Name(name)) => {
                    let pos = self.pos();
                    self.at += 1;
                    let e = self.exponent()?;
                    if Some(name.as_str()) == self.symbol {
                        let g = Scalar::generator(self.field);
                        coeff = &coeff * &g.pow(e as i64).unwrap();
                    } else {
                        let idx = match self.vars.iter().position(|v| *v == name) {
                            Some(i) => i,
                            None if !self.fixed_vars => {
                                self.vars.push(name.clone());
                                exps.push(0);
                                self.vars.len() - 1
                            }
                            None => return Err(ParseError { pos, kind: ParseErrorKind::UnknownVariable(name) }),
                        };
                        exps[idx] += e;
                    }
                }
                None => return self.err(ParseErrorKind::UnexpectedEnd),
                Some(_) => return self.err(ParseErrorKind::Expected("coefficient or variable")),
            }
            if self.peek() == Some(&Tok::Star) {
                self.at += 1;
            } else {
                return Ok(RawTerm { coeff, exps });
            }
        }
    }

    fn poly(&mut self) -> Result<Vec<RawTerm>, ParseError> {
        let mut terms = Vec::new();
        let mut sign = 1;
        match self.peek() {
            Some(Tok::Minus) => {
                sign = -1;
                self.at += 1
            }
            Some(Tok::Plus) => self.at += 1,
            _ => {}
        }
        loop {
            terms.push(self.term(sign)?);
            match self.peek() {
                None => return Ok(terms),
                Some(Tok::Plus) => {
                    sign = 1;
                    self.at += 1
                }
                Some(Tok::Minus) => {
                    sign = -1;
                    self.at += 1
                }
                Some(Tok::Int(_)) | Some(Tok::Name(_)) => return self.err(ParseErrorKind::Expected("'*', '+' or '-'")),
                Some(Tok::Caret) | Some(Tok::Slash) | Some(Tok::Star) => {
                    let pos = self.pos();
                    let c = text_char(&self.toks[self.at].1);
                    return Err(ParseError { pos, kind: ParseErrorKind::UnexpectedChar(c) });
                }
            }
        }
    }
}

fn text_char(t: &Tok) -> char {
    match t {
        Tok::Plus => '+',
        Tok::Minus => '-',
        Tok::Star => '*',
        Tok::Slash => '/',
        Tok::Caret => '^',
        _ => '?',
    }
}

/// Parses a polynomial over Q. Variable order comes from `vars` when given,
/// otherwise from first appearance.
pub fn parse_polynomial(text: &str, vars: Option<&[&str]>) -> Result<Polynomial, ParseError> {
    let owned: Option<Vec<String>> = vars.map(|v| v.iter().map(|s| s.to_string()).collect());
    parse_polynomial_in(text, owned.as_deref(), &Field::rationals())
}

/// Parses over `field`; the field's generator symbol may appear in coefficients.
pub fn parse_polynomial_in(text: &str, vars: Option<&[String]>, field: &Field) -> Result<Polynomial, ParseError> {
    let toks = tokenize(text)?;
    let mut parser = Parser {
        toks,
        at: 0,
        end: text.len(),
        fixed_vars: vars.is_some(),
        vars: vars.map(|v| v.to_vec()).unwrap_or_default(),
        symbol: field.modulus().map(|m| m.symbol()),
        field,
    };
    if parser.toks.is_empty() {
        return parser.err(ParseErrorKind::UnexpectedEnd);
    }
    let raw = parser.poly()?;
    let names = Vars::new(parser.vars.clone());
    let n = names.len();
    let mut p = Polynomial::zero(&names, field);
    for t in raw {
        let mut exps = t.exps;
        exps.resize(n, 0);
        p.add_term(Monomial::new(exps), t.coeff);
    }
    Ok(p)
}

/// Parses a phase vector list `1/2,1/2;0,1/3`.
pub fn parse_phase_vectors(text: &str) -> Result<Vec<Vec<Rational>>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for chunk in text.split(';') {
        if chunk.trim().is_empty() {
            offset += chunk.len() + 1;
            continue;
        }
        let mut v = Vec::new();
        let mut inner = offset;
        for part in chunk.split(',') {
            match super::rational::parse_rat(part) {
                Some(q) => v.push(q),
                None => return Err(ParseError { pos: inner, kind: ParseErrorKind::Expected("rational phase") }),
            }
            inner += part.len() + 1;
        }
        out.push(v);
        offset += chunk.len() + 1;
    }
    Ok(out)
}
