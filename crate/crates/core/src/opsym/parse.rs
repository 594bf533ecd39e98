//! Recursive-descent parser for operator strings.
//!
//! Grammar (whitespace is insignificant, `*` may be omitted between factors):
//!
//! ```text
//! expr   := ['+' | '-'] term (('+' | '-') term)*
//! term   := power (['*'] power)*
//! power  := atom ['^' integer]
//! atom   := number | 'i' | 'u' | 'D1' | 'D2' | '(' expr ')'
//! ```
//!
//! `u` is the identity operator, `i` the imaginary unit.

use num_complex::Complex64;

use super::poly::ComplexBivarPoly;
use super::OpError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, OpError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let b = bytes[pos];
        let start = pos;
        match b {
            b' ' | b'\t' | b'\n' | b'\r' => {
                pos += 1;
                continue;
            }
            b'+' => out.push((start, Tok::Plus)),
            b'-' => out.push((start, Tok::Minus)),
            b'*' => out.push((start, Tok::Star)),
            b'^' => out.push((start, Tok::Caret)),
            b'(' => out.push((start, Tok::LParen)),
            b')' => out.push((start, Tok::RParen)),
            b'0'..=b'9' | b'.' => {
                while pos < bytes.len() && (bytes[pos].is_ascii_digit() || bytes[pos] == b'.') {
                    pos += 1;
                }
                if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
                    let mut look = pos + 1;
                    if look < bytes.len() && (bytes[look] == b'+' || bytes[look] == b'-') {
                        look += 1;
                    }
                    if look < bytes.len() && bytes[look].is_ascii_digit() {
                        pos = look;
                        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                            pos += 1;
                        }
                    }
                }
                let text = &src[start..pos];
                let v: f64 = text.parse().map_err(|_| OpError::Syntax {
                    position: start,
                    message: format!("malformed number '{text}'"),
                })?;
                out.push((start, Tok::Num(v)));
                continue;
            }
            b if b.is_ascii_alphabetic() => {
                while pos < bytes.len() && bytes[pos].is_ascii_alphanumeric() {
                    pos += 1;
                }
                out.push((start, Tok::Ident(src[start..pos].to_string())));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(OpError::Syntax {
                    position: start,
                    message: format!("unexpected character '{ch}'"),
                });
            }
        }
        pos += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, OpError> {
        Err(OpError::Syntax {
            position: self.pos(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<ComplexBivarPoly, OpError> {
        let mut negate = false;
        match self.peek() {
            Some(Tok::Plus) => self.idx += 1,
            Some(Tok::Minus) => {
                negate = true;
                self.idx += 1;
            }
            _ => {}
        }
        let first = self.term()?;
        let mut acc = if negate { -first } else { first };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.idx += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.idx += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ComplexBivarPoly, OpError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.idx += 1;
                    acc = &acc * &self.power()?;
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<ComplexBivarPoly, OpError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.idx += 1;
        match self.peek() {
            Some(Tok::Num(v)) if v.fract() == 0.0 && *v >= 0.0 && *v <= 64.0 => {
                let n = *v as u32;
                self.idx += 1;
                Ok(base.pow(n))
            }
            _ => self.err("expected a non-negative integer exponent (at most 64)"),
        }
    }

    fn atom(&mut self) -> Result<ComplexBivarPoly, OpError> {
        let position = self.pos();
        let Some(tok) = self.peek().cloned() else {
            return self.err("unexpected end of input");
        };
        self.idx += 1;
        match tok {
            Tok::Num(v) => Ok(ComplexBivarPoly::constant(Complex64::new(v, 0.0))),
            Tok::Ident(name) => match name.as_str() {
                "i" => Ok(ComplexBivarPoly::constant(Complex64::new(0.0, 1.0))),
                "u" => Ok(ComplexBivarPoly::one()),
                "D1" => Ok(ComplexBivarPoly::d1()),
                "D2" => Ok(ComplexBivarPoly::d2()),
                _ => Err(OpError::UnsupportedVariable { name, position }),
            },
            Tok::LParen => {
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.err("expected ')'");
                }
                self.idx += 1;
                Ok(inner)
            }
            _ => {
                self.idx -= 1;
                self.err("expected a number, 'i', 'u', 'D1', 'D2' or '('")
            }
        }
    }
}

/// Parses an operator string such as `"(D1^2 + D2^2)^2"` or `"D1 - i*D2"`.
pub fn parse_operator(src: &str) -> Result<ComplexBivarPoly, OpError> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(OpError::Syntax {
            position: 0,
            message: "empty operator".into(),
        });
    }
    let mut p = Parser {
        toks,
        idx: 0,
        end: src.len(),
    };
    let out = p.expr()?;
    if p.idx != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    if !out.is_finite() {
        return Err(OpError::NonFinite);
    }
    Ok(out)
}
