//! The partial-fraction expression language.
//!
//! ```text
//! map    := term (("+" | "-") term)*
//! term   := cnum "/" "(" "z" (("-" | "+") cnum)? ")"
//! cnum   := number | "(" ["-"] number ("+" | "-") number "i" ")"
//! ```
//!
//! A leading `-` negates the first residue. Whitespace is ignored.

use capax_core::format::sig;
use capax_core::{Complex, RationalMapPF, Term};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("parse error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("invalid map at term {term}: {source}")]
    InvalidMap {
        term: usize,
        #[source]
        source: capax_core::Error,
    },
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            position: self.pos,
            message: message.into(),
        })
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => self.fail(format!("expected '{}', found '{}'", c as char, x as char)),
            None => self.fail(format!("expected '{}', found end of input", c as char)),
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// Unsigned decimal literal with optional exponent.
    fn number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.text.len() && p.text[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut count = digits(self);
        if self.pos < self.text.len() && self.text[self.pos] == b'.' {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            self.pos = start;
            return self.fail("expected a number");
        }
        if self.pos < self.text.len() && matches!(self.text[self.pos], b'e' | b'E') {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.text.len() && matches!(self.text[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = mark;
                return self.fail("malformed exponent");
            }
        }
        let literal = std::str::from_utf8(&self.text[start..self.pos]).expect("ascii");
        match literal.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(x),
            _ => {
                self.pos = start;
                self.fail(format!("number '{literal}' out of range"))
            }
        }
    }

    /// `["-"] number ("+"|"-") number "i" ")"`, after the opening paren.
    fn complex_body(&mut self) -> Result<Complex, ParseError> {
        let negative = self.eat(b'-');
        let re = self.number()?;
        let re = if negative { -re } else { re };
        let sign = match self.peek() {
            Some(b'+') => 1.0,
            Some(b'-') => -1.0,
            _ => return self.fail("expected '+' or '-' before the imaginary part"),
        };
        self.pos += 1;
        let im = self.number()?;
        self.expect(b'i')?;
        self.expect(b')')?;
        Ok(Complex::new(re, sign * im))
    }

    fn cnum(&mut self) -> Result<Complex, ParseError> {
        if self.eat(b'(') {
            self.complex_body()
        } else {
            Ok(Complex::new(self.number()?, 0.0))
        }
    }

    fn term(&mut self, sign: f64) -> Result<Term, ParseError> {
        let residue = self.cnum()? * sign;
        self.expect(b'/')?;
        self.expect(b'(')?;
        self.expect(b'z')?;
        let pole = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.cnum()?
            }
            Some(b'+') => {
                self.pos += 1;
                -self.cnum()?
            }
            _ => Complex::new(0.0, 0.0),
        };
        self.expect(b')')?;
        Ok(Term::new(residue, pole))
    }
}

pub fn parse_map(text: &str) -> Result<RationalMapPF, ParseError> {
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
    };
    let mut terms = Vec::new();
    let mut sign = if p.eat(b'-') { -1.0 } else { 1.0 };
    loop {
        terms.push(p.term(sign)?);
        match p.peek() {
            None => break,
            Some(b'+') => sign = 1.0,
            Some(b'-') => sign = -1.0,
            Some(c) => return p.fail(format!("unexpected '{}'", c as char)),
        }
        p.pos += 1;
    }
    RationalMapPF::new(terms).map_err(|source| {
        let term = match source {
            capax_core::Error::DuplicatePole { second, .. } => second,
            capax_core::Error::ZeroResidue { index } => index,
            _ => 0,
        };
        ParseError::InvalidMap { term, source }
    })
}

const DIGITS: usize = 17;

fn complex_literal(z: Complex) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("({}{sign}{}i)", sig(z.re, DIGITS), sig(z.im.abs(), DIGITS))
}

/// Writes `map` in the expression language with 17 significant digits, so
/// that [`parse_map`] recovers it exactly.
pub fn format_map(map: &RationalMapPF) -> String {
    let mut out = String::new();
    for (i, t) in map.terms().iter().enumerate() {
        let a = t.residue;
        let coeff = if a.im == 0.0 {
            let sign = if a.re.is_sign_negative() {
                "-"
            } else if i > 0 {
                "+"
            } else {
                ""
            };
            format!("{sign}{}", sig(a.re.abs(), DIGITS))
        } else {
            let sep = if i > 0 { "+" } else { "" };
            format!("{sep}{}", complex_literal(a))
        };
        let p = t.pole;
        let pole = if p == Complex::new(0.0, 0.0) {
            String::new()
        } else if p.im == 0.0 {
            let sign = if p.re.is_sign_negative() { '+' } else { '-' };
            format!("{sign}{}", sig(p.re.abs(), DIGITS))
        } else {
            format!("-{}", complex_literal(p))
        };
        out.push_str(&format!("{coeff}/(z{pole})"));
    }
    out
}
