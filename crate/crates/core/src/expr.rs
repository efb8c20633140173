//! Parser for polynomial expressions such as `y^2`, `z(z-1)^2` or
//! `2.5*z^3 - i*z`. Either `y` or `z` names the variable; `i` is the
//! imaginary unit. Juxtaposition multiplies.

use num_complex::Complex64;

use crate::error::{Error, Result};

type Poly = Vec<Complex64>;

/// Coefficients (lowest order first) of the polynomial written in `text`.
pub fn parse_polynomial(text: &str) -> Result<Vec<Complex64>> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(trim(poly))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().is_some_and(|c| c.norm() == 0.0) {
        p.pop();
    }
    p
}

fn add(a: &Poly, b: &Poly, sign: f64) -> Poly {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or_default();
            let y = b.get(i).copied().unwrap_or_default();
            x + y * sign
        })
        .collect()
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            column: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = add(&acc, &rhs, if op == b'+' { 1.0 } else { -1.0 });
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = mul(&acc, &self.unary()?);
                }
                Some(c) if c == b'(' || c.is_ascii_alphanumeric() || c == b'.' => {
                    acc = mul(&acc, &self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.into_iter().map(|c| -c).collect())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let exp: u32 = std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("expected a nonnegative integer exponent"))?;
        let mut out = vec![Complex64::new(1.0, 0.0)];
        for _ in 0..exp {
            out = mul(&out, &base);
        }
        Ok(out)
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'y' | b'z') => {
                self.pos += 1;
                Ok(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(vec![Complex64::new(0.0, 1.0)])
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Poly> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            let digits = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == digits {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        let value: f64 = text.parse().map_err(|_| Error::Parse {
            column: start + 1,
            message: format!("bad number {text:?}"),
        })?;
        Ok(vec![Complex64::new(value, 0.0)])
    }
}
