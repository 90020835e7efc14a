//! Rational functions `num/den` over a base field, kept in lowest terms with a
//! monic denominator.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{BaseField, Scalar};
use crate::poly::Poly;

#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_in("x"))
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_in("x"))
    }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        let k = p.field();
        RatFunc { num: p, den: Poly::one(k) }
    }
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        let k = num.field();
        if num.is_zero() {
            return RatFunc { num, den: Poly::one(k) };
        }
        if den.is_constant() {
            let inv = k.inv(&den.coeff(0)).unwrap();
            return RatFunc { num: num.scale(&inv), den: Poly::one(k) };
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        let inv = k.inv(den.lc().unwrap()).unwrap();
        RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn zero(k: BaseField) -> Self {
        Poly::zero(k).into()
    }

    pub fn one(k: BaseField) -> Self {
        Poly::one(k).into()
    }

    pub fn constant(k: BaseField, s: Scalar) -> Self {
        Poly::constant(k, s).into()
    }

    pub fn x(k: BaseField) -> Self {
        Poly::x(k).into()
    }

    pub fn field(&self) -> BaseField {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.den.is_one() && self.num.is_constant()
    }

    /// The constant value, if this is a constant.
    pub fn as_constant(&self) -> Option<Scalar> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    pub fn scale(&self, s: &Scalar) -> RatFunc {
        RatFunc::reduce(self.num.scale(s), self.den.clone())
    }

    pub fn inv(&self) -> Result<RatFunc> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &RatFunc) -> Result<RatFunc> {
        Ok(self * &o.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<RatFunc> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let e = e.unsigned_abs();
        Ok(RatFunc { num: base.num.pow(e), den: base.den.pow(e) })
    }

    /// Degree of the pole at infinity: `deg num - deg den` (`None` for zero).
    pub fn degree(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.num.deg() - self.den.deg())
    }

    /// Order of vanishing at `x = a`.
    pub fn ord_at(&self, a: &Scalar) -> Result<i64> {
        if self.is_zero() {
            return Err(Error::ZeroValuation);
        }
        Ok(self.num.multiplicity(a)? as i64 - self.den.multiplicity(a)? as i64)
    }

    /// Order of vanishing at infinity.
    pub fn ord_inf(&self) -> Result<i64> {
        self.degree().map(|d| -d).ok_or(Error::ZeroValuation)
    }

    pub fn is_regular_at(&self, a: &Scalar) -> bool {
        !self.field().is_zero(&self.den.eval(a))
    }

    pub fn eval(&self, a: &Scalar) -> Result<Scalar> {
        let k = self.field();
        let d = self.den.eval(a);
        if k.is_zero(&d) {
            return Err(Error::Pole(format!("x = {}", k.display(a))));
        }
        Ok(k.div(&self.num.eval(a), &d).unwrap())
    }

    /// Value at infinity of a function regular there.
    pub fn eval_inf(&self) -> Result<Scalar> {
        let k = self.field();
        match self.degree() {
            None => Ok(k.zero()),
            Some(d) if d < 0 => Ok(k.zero()),
            Some(0) => Ok(k.div(self.num.lc().unwrap(), self.den.lc().unwrap()).unwrap()),
            Some(_) => Err(Error::Pole("infinity".into())),
        }
    }

    /// `self(g)` for a rational function `g`.
    pub fn compose(&self, g: &RatFunc) -> Result<RatFunc> {
        let k = self.field();
        let n = self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0));
        // Homogenize: p(g) = sum a_i P^i Q^(n-i) / Q^n.
        let hom = |p: &Poly| -> Poly {
            let mut acc = Poly::zero(k);
            let mut ppow = Poly::one(k);
            let qpows: Vec<Poly> = {
                let mut v = vec![Poly::one(k)];
                for _ in 0..n {
                    let next = v.last().unwrap() * &g.den;
                    v.push(next);
                }
                v
            };
            for i in 0..=n {
                let a = p.coeff(i);
                if !k.is_zero(&a) {
                    acc = &acc + &(&ppow * &qpows[n - i]).scale(&a);
                }
                ppow = &ppow * &g.num;
            }
            acc
        };
        RatFunc::new(hom(&self.num), hom(&self.den))
    }

    pub fn display_in(&self, var: &str) -> String {
        if self.den.is_one() {
            return self.num.display_in(var);
        }
        let wrap = |p: &Poly| {
            let s = p.display_in(var);
            if p.coeffs().iter().filter(|c| !p.field().is_zero(c)).count() > 1 {
                format!("({s})")
            } else {
                s
            }
        };
        format!("{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatFunc::reduce(&self.num + &o.num, self.den.clone());
        }
        let g = Poly::gcd(&self.den, &o.den);
        let a = self.den.div_exact(&g).unwrap();
        let b = o.den.div_exact(&g).unwrap();
        RatFunc::reduce(&(&self.num * &b) + &(&o.num * &a), &self.den * &b)
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero(self.field());
        }
        if self.den.is_one() && o.den.is_one() {
            return (&self.num * &o.num).into();
        }
        // Cross-cancel before multiplying to keep degrees small.
        let g1 = Poly::gcd(&self.num, &o.den);
        let g2 = Poly::gcd(&o.num, &self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = o.den.div_exact(&g1).unwrap();
        let n2 = o.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        let num = &n1 * &n2;
        let den = &d1 * &d2;
        let k = num.field();
        let inv = k.inv(den.lc().unwrap()).unwrap();
        RatFunc { num: num.scale(&inv), den: den.scale(&inv) }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatFunc {
            type Output = RatFunc;
            fn $m(self, o: RatFunc) -> RatFunc {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
