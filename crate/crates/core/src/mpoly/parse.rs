//! Polynomial text grammar:
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { "*" unary } ;
//! unary    = ("+" | "-") unary | power ;
//! power    = atom [ "^" integer ] ;
//! atom     = integer | variable | "t" | "(" expr ")" ;
//! variable = "x" integer ;            (* x1 .. xn *)
//! ```
//!
//! `t` denotes the class of the modulus variable and is only accepted when a
//! generator is supplied.

use super::MultiPoly;
use crate::error::{Error, Result};
use crate::ff::Field;

pub fn parse<F: Field>(text: &str, n: usize, field: &F) -> Result<MultiPoly<F>> {
    Parser { src: text.as_bytes(), pos: 0, n, field, generator: None }.run()
}

pub fn parse_with_generator<F: Field>(text: &str, n: usize, field: &F, generator: F::Elem) -> Result<MultiPoly<F>> {
    Parser { src: text.as_bytes(), pos: 0, n, field, generator: Some(generator) }.run()
}

struct Parser<'a, F: Field> {
    src: &'a [u8],
    pos: usize,
    n: usize,
    field: &'a F,
    generator: Option<F::Elem>,
}

impl<F: Field> Parser<'_, F> {
    fn run(mut self) -> Result<MultiPoly<F>> {
        let p = self.expr()?;
        self.skip_ws();
        if self.pos < self.src.len() {
            return Err(self.error(format!("unexpected character '{}'", self.src[self.pos] as char)));
        }
        Ok(p)
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
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

    fn expr(&mut self) -> Result<MultiPoly<F>> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { acc.add(&t) } else { acc.sub(&t) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly<F>> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.unary()?;
            acc = acc.checked_mul(&f)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly<F>> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly<F>> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.error("expected exponent"));
            }
            let e: u16 = digits.parse().map_err(|_| Error::Parse { pos: start, msg: "exponent too large".into() })?;
            return base.pow(e as u32);
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<MultiPoly<F>> {
        let f = self.field;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let ten = f.from_int(10);
                let value = self
                    .digits()
                    .bytes()
                    .fold(f.zero(), |acc, d| f.add(&f.mul(&acc, &ten), &f.from_int((d - b'0') as i64)));
                Ok(MultiPoly::constant(f, self.n, value))
            }
            Some(b'x') => {
                let at = self.pos;
                self.pos += 1;
                let digits = self.digits();
                let index: usize = digits.parse().map_err(|_| Error::Parse { pos: at, msg: "expected variable index after 'x'".into() })?;
                if index == 0 || index > self.n {
                    return Err(Error::VariableOutOfRange { index, n: self.n });
                }
                Ok(MultiPoly::var(f, self.n, index - 1))
            }
            Some(b't') => match &self.generator {
                Some(g) => {
                    self.pos += 1;
                    Ok(MultiPoly::constant(f, self.n, g.clone()))
                }
                None => Err(self.error("'t' is only available over extension fields")),
            },
            Some(c) => Err(self.error(format!("unexpected character '{}'", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{build_field, Field, Rationals};

    #[test]
    fn examples() {
        let k = build_field(7, 1).unwrap();
        let g = parse("x1^3 + x2^3 + x1*x2", 2, &k).unwrap();
        assert_eq!(g.num_terms(), 3);
        assert_eq!(g.degree(), Some(3));
        assert!(parse("0", 3, &k).unwrap().is_zero());
        let k5 = build_field(5, 1).unwrap();
        let h = parse("x1^2*x2 + x2^2", 2, &k5).unwrap();
        assert_eq!(h.num_terms(), 2);
        assert_eq!(parse("6*x1", 1, &k5).unwrap(), parse("x1", 1, &k5).unwrap());
    }

    #[test]
    fn parentheses_and_signs() {
        let q = Rationals;
        let a = parse("(x1 + x2)^2 - -x1*3", 2, &q).unwrap();
        let b = parse("x1^2 + 2*x1*x2 + x2^2 + 3*x1", 2, &q).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors() {
        let k = build_field(5, 1).unwrap();
        assert!(matches!(parse("x1 +", 2, &k), Err(Error::Parse { pos: 4, .. })));
        assert!(matches!(parse("x1 $ x2", 2, &k), Err(Error::Parse { pos: 3, .. })));
        assert_eq!(parse("x3", 2, &k).unwrap_err(), Error::VariableOutOfRange { index: 3, n: 2 });
        assert!(matches!(parse("(x1", 2, &k), Err(Error::Parse { .. })));
        assert!(matches!(parse("x1^70000", 1, &k), Err(Error::Parse { .. })));
        assert!(matches!(parse("t*x1", 1, &k), Err(Error::Parse { .. })));
    }

    #[test]
    fn round_trip_through_display() {
        let k = build_field(11, 1).unwrap();
        for text in ["x1^3 + 4*x1*x2 + 10", "3*x1^2*x3 + x2^5 + 7*x3", "0", "x1"] {
            let g = parse(text, 3, &k).unwrap();
            assert_eq!(parse(&g.to_string(), 3, &k).unwrap(), g);
        }
    }

    #[test]
    fn generator_symbol() {
        let k = build_field(2, 2).unwrap();
        let g = parse_with_generator("t*x1 + x2", 2, &k, k.generator()).unwrap();
        assert_eq!(g.to_string(), "t*x1 + x2");
        let back = parse_with_generator(&g.to_string(), 2, &k, k.generator()).unwrap();
        assert_eq!(back, g);
        assert_eq!(k.render(&k.add(&k.generator(), &k.one())), "(t+1)");
    }
}
