//! Two-photon ket expressions such as `isqrt2*|HV> - (0,0.5)*|VH>`.
//!
//! ```text
//! expr  := [sign] term (sign term)*
//! term  := [coeff '*'] '|' pol pol '>'
//! coeff := decimal | '(' [sign] decimal (',' [sign] | sign) decimal ['i'] ')' | 'isqrt2'
//! ```
//!
//! Components come back in HH, HV, VH, VV order, duplicates summed, without
//! normalization.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt::Write as _;

use thiserror::Error;
use twophoton_core::Amplitude;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("byte {offset}: {kind}")]
pub struct KetError {
    pub offset: usize,
    pub kind: KetErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KetErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("unknown polarization {0:?}, expected H or V")]
    UnknownPolarization(char),
    #[error("expected {expected}, found {found}")]
    Syntax {
        expected: &'static str,
        found: String,
    },
    #[error("malformed number {0:?}")]
    Number(String),
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(ch) = self.peek() {
            if !ch.is_whitespace() {
                break;
            }
            self.pos += ch.len_utf8();
        }
    }

    fn error(&self, kind: KetErrorKind) -> KetError {
        KetError {
            offset: self.pos,
            kind,
        }
    }

    fn unexpected(&self, expected: &'static str) -> KetError {
        let found = match self.peek() {
            Some(ch) => format!("{ch:?}"),
            None => "end of input".to_string(),
        };
        self.error(KetErrorKind::Syntax { expected, found })
    }

    fn expect(&mut self, ch: char, expected: &'static str) -> Result<(), KetError> {
        self.skip_ws();
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn eat(&mut self, ch: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sign(&mut self) -> Option<f64> {
        if self.eat('+') {
            Some(1.0)
        } else if self.eat('-') {
            Some(-1.0)
        } else {
            None
        }
    }

    fn decimal(&mut self) -> Result<f64, KetError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        let digits = |mut i: usize| {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            i
        };
        end = digits(end);
        if end < bytes.len() && bytes[end] == b'.' {
            end = digits(end + 1);
        }
        if end == start || &self.src[start..end] == "." {
            return Err(self.unexpected("a number"));
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            let after = digits(k);
            if after > k {
                end = after;
            }
        }
        let text = &self.src[start..end];
        let value = text
            .parse::<f64>()
            .map_err(|_| self.error(KetErrorKind::Number(text.to_string())))?;
        self.pos = end;
        Ok(value)
    }

    fn coefficient(&mut self) -> Result<Option<Amplitude>, KetError> {
        self.skip_ws();
        match self.peek() {
            Some('|') => Ok(None),
            Some('(') => {
                self.pos += 1;
                let re = self.sign().unwrap_or(1.0) * self.decimal()?;
                let im_sign = if self.eat(',') {
                    self.sign().unwrap_or(1.0)
                } else {
                    self.sign()
                        .ok_or_else(|| self.unexpected("',', '+' or '-'"))?
                };
                let im = im_sign * self.decimal()?;
                self.eat('i');
                self.expect(')', "')'")?;
                Ok(Some(Amplitude::new(re, im)))
            }
            Some(_) if self.src[self.pos..].starts_with("isqrt2") => {
                self.pos += "isqrt2".len();
                Ok(Some(Amplitude::new(FRAC_1_SQRT_2, 0.0)))
            }
            Some(ch) if ch.is_ascii_digit() || ch == '.' => {
                Ok(Some(Amplitude::new(self.decimal()?, 0.0)))
            }
            _ => Err(self.unexpected("a coefficient or '|'")),
        }
    }

    fn polarization(&mut self) -> Result<usize, KetError> {
        match self.peek() {
            Some('H') => {
                self.pos += 1;
                Ok(0)
            }
            Some('V') => {
                self.pos += 1;
                Ok(1)
            }
            Some(ch) if ch.is_alphabetic() => {
                Err(self.error(KetErrorKind::UnknownPolarization(ch)))
            }
            _ => Err(self.unexpected("H or V")),
        }
    }

    fn term(&mut self) -> Result<(Amplitude, usize), KetError> {
        let coeff = match self.coefficient()? {
            Some(c) => {
                self.expect('*', "'*'")?;
                c
            }
            None => Amplitude::new(1.0, 0.0),
        };
        self.expect('|', "'|'")?;
        let first = self.polarization()?;
        let second = self.polarization()?;
        self.expect('>', "'>'")?;
        Ok((coeff, (first << 1) | second))
    }
}

pub fn parse_ket(text: &str) -> Result<[Amplitude; 4], KetError> {
    let mut p = Parser { src: text, pos: 0 };
    p.skip_ws();
    if p.peek().is_none() {
        return Err(p.error(KetErrorKind::Empty));
    }
    let mut comps = [Amplitude::new(0.0, 0.0); 4];
    let mut sign = p.sign().unwrap_or(1.0);
    loop {
        let (coeff, index) = p.term()?;
        comps[index] += coeff * sign;
        p.skip_ws();
        if p.peek().is_none() {
            return Ok(comps);
        }
        sign = p
            .sign()
            .ok_or_else(|| p.unexpected("'+', '-' or end of input"))?;
    }
}

/// Writes components in a form `parse_ket` reads back exactly.
pub fn format_ket(comps: &[Amplitude; 4]) -> String {
    const LABELS: [&str; 4] = ["HH", "HV", "VH", "VV"];
    let mut out = String::new();
    for (label, a) in LABELS.iter().zip(comps) {
        if *a == Amplitude::new(0.0, 0.0) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(" + ");
        }
        // Debug prints the shortest string that round-trips
        let _ = write!(out, "({:?},{:?})*|{label}>", a.re, a.im);
    }
    if out.is_empty() {
        out.push_str("0*|HH>");
    }
    out
}
