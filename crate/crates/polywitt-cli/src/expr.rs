//! Scalar expressions for `polywitt classical`.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary ('*' unary)*
//! unary := '-' unary | atom
//! atom  := INT | NAME '(' expr ')' | '(' expr ')'
//! ```
//! `F`, `V`, `R` act on Witt vectors; `T(c)` takes a field element index.
//! Binary operations on different lengths restrict the longer operand.

use anyhow::{anyhow, bail};
use polywitt::{Error, FieldSpec, WittScalar};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: FieldSpec,
    n: u32,
}

fn input_error(msg: String) -> anyhow::Error {
    anyhow!(Error::Input(msg))
}

pub fn evaluate(field: FieldSpec, n: u32, text: &str) -> anyhow::Result<WittScalar> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, field, n };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        bail!(input_error(format!("unexpected {:?} at offset {}", &text[p.pos..], p.pos)));
    }
    Ok(v)
}

fn align(a: WittScalar, b: WittScalar) -> anyhow::Result<(WittScalar, WittScalar)> {
    let l = a.len().min(b.len());
    Ok((a.truncate(l)?, b.truncate(l)?))
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> anyhow::Result<()> {
        if self.peek() != Some(c) {
            bail!(input_error(format!("expected {:?} at offset {}", c as char, self.pos)));
        }
        self.pos += 1;
        Ok(())
    }

    fn expr(&mut self) -> anyhow::Result<WittScalar> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let (a, b) = align(acc, self.term()?)?;
            acc = if op == b'+' { a.add(&b)? } else { a.sub(&b)? };
        }
        Ok(acc)
    }

    fn term(&mut self) -> anyhow::Result<WittScalar> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let (a, b) = align(acc, self.unary()?)?;
            acc = a.mul(&b)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> anyhow::Result<WittScalar> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        self.atom()
    }

    fn number(&mut self) -> anyhow::Result<i64> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        s.parse().map_err(|_| input_error(format!("bad integer {s:?}")))
    }

    fn atom(&mut self) -> anyhow::Result<WittScalar> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => Ok(WittScalar::from_int(self.field, self.n, self.number()?)?),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii").to_string();
                self.expect(b'(')?;
                let v = match name.as_str() {
                    "T" | "teich" => {
                        self.skip_ws();
                        let c = self.number()?;
                        let e = self.field.element(u32::try_from(c).map_err(|_| input_error(format!("bad element {c}")))?)?;
                        WittScalar::teichmuller(e, self.n)?
                    }
                    "F" => self.expr()?.frobenius(),
                    "V" => self.expr()?.verschiebung()?,
                    "R" => self.expr()?.restrict()?,
                    _ => bail!(input_error(format!("unknown function {name:?}"))),
                };
                self.expect(b')')?;
                Ok(v)
            }
            other => bail!(input_error(format!("unexpected {:?} at offset {}", other.map(|c| c as char), self.pos))),
        }
    }
}
