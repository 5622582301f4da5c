//! Polynomial string grammar.
//!
//! ```text
//! expr   := sign? term (sign term)*
//! term   := factor ('*' factor)*
//! factor := integer ('/' integer)? | ident ('^' integer)? | '(' expr ')' ('^' integer)?
//! ```
//! Whitespace is ignored everywhere.

use std::sync::Arc;

use num_bigint::BigInt;

use super::{Monomial, PolyRing, Polynomial, RingError};

pub(super) fn parse_polynomial(ring: &Arc<PolyRing>, s: &str) -> Result<Polynomial, RingError> {
    let mut p = Parser {
        ring,
        src: s.as_bytes(),
        pos: 0,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    ring: &'a Arc<PolyRing>,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> RingError {
        RingError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
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

    fn expr(&mut self) -> Result<Polynomial, RingError> {
        let mut acc = Polynomial::zero(self.ring);
        let mut first = true;
        loop {
            let neg = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                _ if first => false,
                _ => break,
            };
            first = false;
            let t = self.term()?;
            acc = if neg { &acc - &t } else { &acc + &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial, RingError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial, RingError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.integer()?;
                let den = if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.integer()?
                } else {
                    BigInt::from(1)
                };
                let c = self
                    .ring
                    .field()
                    .from_ratio(&num, &den)
                    .ok_or_else(|| self.err("zero denominator"))?;
                Ok(Polynomial::constant(self.ring, c))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let idx = self.ring.var_index(name).ok_or_else(|| RingError::Parse {
                    pos: start,
                    msg: format!("unknown variable {name}"),
                })?;
                let e = self.exponent()?;
                let mut m = Monomial::one(self.ring.nvars());
                if e > 0 {
                    m = Monomial::var(self.ring.nvars(), idx);
                    let exps: Vec<u32> = m.exponents().iter().map(|&x| x * e).collect();
                    m = Monomial::new(exps);
                }
                Ok(Polynomial::monomial(self.ring, self.ring.field().one(), m))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                let e = self.exponent()?;
                Ok(inner.pow(e))
            }
            _ => Err(self.err("expected a number, variable or '('")),
        }
    }

    fn exponent(&mut self) -> Result<u32, RingError> {
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.integer()?;
            u32::try_from(e).map_err(|_| self.err("exponent out of range"))
        } else {
            Ok(1)
        }
    }

    fn integer(&mut self) -> Result<BigInt, RingError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(digits.parse().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grammar_examples() {
        let r = PolyRing::standard(3, 0);
        let p = r.parse("3*x1^2*x2 - x3").unwrap();
        assert_eq!(p.to_string(), "3*x1^2*x2 - x3");
        assert_eq!(r.parse(" 3 * x1 ^ 2 * x2-x3 ").unwrap(), p);
        assert_eq!(r.parse("-1/2*x1 + 1/2*x1").unwrap(), r.zero());
        assert_eq!(
            r.parse("(x1 + x2)^2").unwrap(),
            r.parse("x1^2 + 2*x1*x2 + x2^2").unwrap()
        );
        assert_eq!(r.parse("0").unwrap(), r.zero());
    }

    #[test]
    fn reports_errors() {
        let r = PolyRing::standard(2, 0);
        assert!(matches!(r.parse("x9"), Err(RingError::Parse { .. })));
        assert!(matches!(r.parse("x1 +"), Err(RingError::Parse { .. })));
        assert!(matches!(r.parse("1/0"), Err(RingError::Parse { .. })));
        assert!(matches!(r.parse("x1 x2"), Err(RingError::Parse { .. })));
    }

    #[test]
    fn modular_printing_roundtrips() {
        let r = PolyRing::standard(2, 7);
        let p = r.parse("6*x1 + 1/2*x2").unwrap();
        assert_eq!(p.to_string(), "-x1 - 3*x2");
        assert_eq!(r.parse(&p.to_string()).unwrap(), p);
    }
}
