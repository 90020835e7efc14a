//! Expression syntax for elements: `+ - * / ^`, parentheses, integers, `x`,
//! `y` (hyperelliptic models) and `z` (generator of `F_{p^m}` over `F_p`).
//! Juxtaposition multiplies, so `3x^2y` is `3*x^2*y`.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::model::{CurveModel, FFElem};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Var(char),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = vec![];
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let j = cs[i..].iter().position(|c| !c.is_ascii_digit()).map_or(cs.len(), |p| i + p);
            let lit: String = cs[i..j].iter().collect();
            out.push(Tok::Num(lit.parse().unwrap()));
            i = j;
        } else if matches!(c, 'x' | 'y' | 'z') {
            out.push(Tok::Var(c));
            i += 1;
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    m: &'a CurveModel,
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<FFElem> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = self.m.add(&acc, &self.term()?);
            } else if self.eat('-') {
                acc = self.m.sub(&acc, &self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_) | Tok::Var(_) | Tok::Op('(')))
    }

    fn term(&mut self) -> Result<FFElem> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = self.m.mul(&acc, &self.unary()?);
            } else if self.eat('/') {
                acc = self.m.div(&acc, &self.unary()?)?;
            } else if self.starts_atom() {
                acc = self.m.mul(&acc, &self.power()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<FFElem> {
        if self.eat('-') {
            Ok(self.m.neg(&self.unary()?))
        } else {
            self.power()
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        let paren = self.eat('(');
        let neg = self.eat('-');
        let e = match self.toks.get(self.pos) {
            Some(Tok::Num(n)) => i64::try_from(n.clone()).map_err(|_| Error::Parse("exponent too large".into()))?,
            _ => return Err(Error::Parse("expected an integer exponent".into())),
        };
        self.pos += 1;
        if paren && !self.eat(')') {
            return Err(Error::Parse("unbalanced parentheses in exponent".into()));
        }
        Ok(if neg { -e } else { e })
    }

    fn power(&mut self) -> Result<FFElem> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.exponent()?;
            return self.m.pow(&base, e);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<FFElem> {
        let m = self.m;
        let k = m.field();
        let tok = self.peek().cloned().ok_or_else(|| Error::Parse("unexpected end of expression".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(n) => {
                let s = k.from_ratio(&n, &BigInt::from(1)).unwrap();
                Ok(m.constant(s))
            }
            Tok::Var('x') => Ok(m.x()),
            Tok::Var('y') => m.y().map_err(|_| Error::Parse("y is only defined on hyperelliptic models".into())),
            Tok::Var(_) => {
                if !k.is_finite() || k.ext_degree() < 2 {
                    return Err(Error::Parse(format!("z names the generator of F_p^m; the field is {k}")));
                }
                Ok(m.constant(k.from_coefficients(&[0, 1])?))
            }
            Tok::Op('(') => {
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                Ok(e)
            }
            Tok::Op(c) => Err(Error::Parse(format!("unexpected {c:?}"))),
        }
    }
}

/// Parse an element of the model's function field.
pub fn parse_elem(m: &CurveModel, s: &str) -> Result<FFElem> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty expression".into()));
    }
    let mut p = Parser { m, toks, pos: 0 };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input in {s:?}")));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::BaseField;
    use crate::poly::Poly;

    #[test]
    fn round_trips_display() {
        let k = BaseField::prime(101).unwrap();
        let h = CurveModel::hyperelliptic(k, Poly::from_i64s(k, &[1, 1, 0, 1])).unwrap();
        for s in ["1", "x", "y", "x^2 + 3*y", "(x - 1)/(x + 2)*y + x", "2x^2y - 5", "x^-2"] {
            let u = parse_elem(&h, s).unwrap();
            assert_eq!(parse_elem(&h, &h.display(&u)).unwrap(), u, "{s}");
        }
        assert_eq!(parse_elem(&h, "y^2").unwrap(), parse_elem(&h, "x^3 + x + 1").unwrap());
        assert!(parse_elem(&h, "x +").is_err());
        assert!(parse_elem(&h, "1/0").is_err());
        assert!(parse_elem(&CurveModel::rational(k), "y").is_err());
    }

    #[test]
    fn extension_generator() {
        let k = BaseField::finite(3, 2).unwrap();
        let m = CurveModel::rational(k);
        let u = parse_elem(&m, "(1+2*z)*x").unwrap();
        assert_eq!(parse_elem(&m, &m.display(&u)).unwrap(), u);
        let q = CurveModel::rational(BaseField::rationals());
        let u = parse_elem(&q, "1/2*x - 3/4").unwrap();
        assert_eq!(parse_elem(&q, &q.display(&u)).unwrap(), u);
    }
}
