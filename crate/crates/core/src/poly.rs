//! Dense univariate polynomials over a [`BaseField`].
//!
//! Coefficients are stored low-to-high with no trailing zeros; the zero
//! polynomial is the empty list.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::field::{BaseField, Scalar};

/// Fields with at most this many elements are root-searched exhaustively.
const EXHAUSTIVE_ROOT_SEARCH: u128 = 4096;

#[derive(Clone, PartialEq, Eq)]
pub struct Poly {
    k: BaseField,
    c: Vec<Scalar>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_in("x"))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_in("x"))
    }
}

impl Poly {
    pub fn new(k: BaseField, mut c: Vec<Scalar>) -> Self {
        while c.last().is_some_and(|s| k.is_zero(s)) {
            c.pop();
        }
        Poly { k, c }
    }

    pub fn from_i64s(k: BaseField, c: &[i64]) -> Self {
        Self::new(k, c.iter().map(|&v| k.from_i64(v)).collect())
    }

    pub fn zero(k: BaseField) -> Self {
        Poly { k, c: vec![] }
    }

    pub fn one(k: BaseField) -> Self {
        Self::constant(k, k.one())
    }

    pub fn constant(k: BaseField, s: Scalar) -> Self {
        Self::new(k, vec![s])
    }

    /// The indeterminate `x`.
    pub fn x(k: BaseField) -> Self {
        Self::monomial(k, k.one(), 1)
    }

    pub fn monomial(k: BaseField, s: Scalar, deg: usize) -> Self {
        let mut c = vec![k.zero(); deg + 1];
        c[deg] = s;
        Self::new(k, c)
    }

    /// `x - a`.
    pub fn linear_root(k: BaseField, a: &Scalar) -> Self {
        Self::new(k, vec![k.neg(a), k.one()])
    }

    pub fn field(&self) -> BaseField {
        self.k
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.c.get(i).cloned().unwrap_or_else(|| self.k.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.k.is_one(&self.c[0])
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with `deg 0 = -1`, convenient for valuation arithmetic.
    pub fn deg(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn lc(&self) -> Option<&Scalar> {
        self.c.last()
    }

    pub fn is_monic(&self) -> bool {
        self.lc().is_some_and(|c| self.k.is_one(c))
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        if self.k.is_zero(s) {
            return Poly::zero(self.k);
        }
        Poly::new(self.k, self.c.iter().map(|a| self.k.mul(a, s)).collect())
    }

    pub fn monic(&self) -> Poly {
        match self.lc() {
            None => self.clone(),
            Some(lc) => self.scale(&self.k.inv(lc).expect("nonzero leading coefficient")),
        }
    }

    pub fn shift_up(&self, n: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![self.k.zero(); n];
        c.extend(self.c.iter().cloned());
        Poly { k: self.k, c }
    }

    pub fn divrem(&self, b: &Poly) -> Result<(Poly, Poly)> {
        let db = b.degree().ok_or(Error::DivisionByZero)?;
        let k = self.k;
        if self.c.len() <= db {
            return Ok((Poly::zero(k), self.clone()));
        }
        let inv = k.inv(b.lc().unwrap()).unwrap();
        let mut r = self.c.clone();
        let mut q = vec![k.zero(); r.len() - db];
        for d in (db..r.len()).rev() {
            if k.is_zero(&r[d]) {
                continue;
            }
            let coef = k.mul(&r[d], &inv);
            for (i, bc) in b.c.iter().enumerate() {
                let t = k.mul(&coef, bc);
                r[d - db + i] = k.sub(&r[d - db + i], &t);
            }
            q[d - db] = coef;
        }
        r.truncate(db);
        Ok((Poly::new(k, q), Poly::new(k, r)))
    }

    pub fn rem(&self, b: &Poly) -> Result<Poly> {
        Ok(self.divrem(b)?.1)
    }

    /// Exact division; errors when `b` does not divide `self`.
    pub fn div_exact(&self, b: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(b)?;
        if !r.is_zero() {
            return Err(Error::Precondition(format!("{b} does not divide {self}")));
        }
        Ok(q)
    }

    pub fn divides(&self, other: &Poly) -> bool {
        other.divrem(self).map(|(_, r)| r.is_zero()).unwrap_or(other.is_zero())
    }

    /// Over `Q`: rescale to an integer polynomial with coprime coefficients and
    /// positive leading coefficient. Other fields: unchanged.
    pub fn primitive(&self) -> Poly {
        if !matches!(self.k, BaseField::Rationals) || self.is_zero() {
            return self.clone();
        }
        let rats: Vec<&BigRational> = self.c.iter().map(|s| s.as_rational().unwrap()).collect();
        let den_lcm = rats.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let ints: Vec<BigInt> = rats.iter().map(|q| q.numer() * (&den_lcm / q.denom())).collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        if ints.last().unwrap().is_negative() {
            g = -g;
        }
        Poly::new(
            self.k,
            ints.into_iter()
                .map(|v| Scalar::Q(BigRational::from_integer(v / &g)))
                .collect(),
        )
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.primitive(), b.primitive());
        while !y.is_zero() {
            let r = x.rem(&y).unwrap().primitive();
            x = std::mem::replace(&mut y, r);
        }
        x.monic()
    }

    pub fn lcm(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero(a.k);
        }
        let g = Poly::gcd(a, b);
        (&a.div_exact(&g).unwrap() * b).monic()
    }

    pub fn derivative(&self) -> Poly {
        let k = self.k;
        Poly::new(
            k,
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| k.mul(a, &k.from_i64(i as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, s: &Scalar) -> Scalar {
        let k = self.k;
        self.c.iter().rev().fold(k.zero(), |acc, a| k.add(&k.mul(&acc, s), a))
    }

    /// `self(g(x))`.
    pub fn compose(&self, g: &Poly) -> Poly {
        self.c
            .iter()
            .rev()
            .fold(Poly::zero(self.k), |acc, a| &(&acc * g) + &Poly::constant(self.k, a.clone()))
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.k);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn powmod(&self, mut e: u128, m: &Poly) -> Result<Poly> {
        let mut base = self.rem(m)?;
        let mut acc = Poly::one(self.k).rem(m)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = (&acc * &base).rem(m)?;
            }
            base = (&base * &base).rem(m)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// True iff `f` has no repeated factor. When `f' = 0` (possible in
    /// characteristic `p`) the answer is `false` for nonconstant `f`.
    pub fn is_squarefree(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial("squarefreeness"));
        }
        if self.is_constant() {
            return Ok(true);
        }
        let d = self.derivative();
        if d.is_zero() {
            return Ok(false);
        }
        Ok(Poly::gcd(self, &d).degree() == Some(0))
    }

    /// Order of vanishing at `a`.
    pub fn multiplicity(&self, a: &Scalar) -> Result<usize> {
        if self.is_zero() {
            return Err(Error::ZeroValuation);
        }
        let lin = Poly::linear_root(self.k, a);
        let mut cur = self.clone();
        let mut m = 0;
        loop {
            let (q, r) = cur.divrem(&lin)?;
            if !r.is_zero() {
                return Ok(m);
            }
            cur = q;
            m += 1;
        }
    }

    /// Distinct roots in the base field, sorted in canonical scalar order.
    pub fn roots(&self) -> Result<Vec<Scalar>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial("roots"));
        }
        let k = self.k;
        let mut out = match k {
            BaseField::Finite(_) => {
                let q = k.order().unwrap();
                if q <= EXHAUSTIVE_ROOT_SEARCH {
                    (0..q)
                        .map(|i| k.element(i))
                        .filter(|a| k.is_zero(&self.eval(a)))
                        .collect()
                } else {
                    let f = self.monic();
                    let x = Poly::x(k);
                    let xq = x.powmod(q, &f)?;
                    let g = Poly::gcd(&f, &(&xq - &x));
                    let mut acc = vec![];
                    split_linear(&g, &mut acc)?;
                    acc
                }
            }
            BaseField::Rationals => rational_roots(self)?,
        };
        out.sort_by(|a, b| k.cmp(a, b));
        out.dedup();
        Ok(out)
    }

    /// Roots with multiplicities, when `self` splits into linear factors
    /// over the base field; `None` otherwise.
    pub fn split_roots(&self) -> Result<Option<Vec<(Scalar, usize)>>> {
        let roots = self.roots()?;
        let mut total = 0;
        let mut out = vec![];
        for r in roots {
            let m = self.multiplicity(&r)?;
            total += m;
            out.push((r, m));
        }
        Ok((Some(total) == self.degree()).then_some(out))
    }

    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let k = self.k;
        let mut terms = vec![];
        for (i, a) in self.c.iter().enumerate().rev() {
            if k.is_zero(a) {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let coef = k.display(a);
            terms.push(if i == 0 {
                coef
            } else if k.is_one(a) {
                mono
            } else if coef == "-1" {
                format!("-{mono}")
            } else {
                format!("{coef}*{mono}")
            });
        }
        let mut s = terms[0].clone();
        for t in &terms[1..] {
            if let Some(rest) = t.strip_prefix('-') {
                s.push_str(" - ");
                s.push_str(rest);
            } else {
                s.push_str(" + ");
                s.push_str(t);
            }
        }
        s
    }
}

/// Split a squarefree product of distinct linear factors over a finite field.
fn split_linear(g: &Poly, out: &mut Vec<Scalar>) -> Result<()> {
    let k = g.field();
    match g.degree() {
        None | Some(0) => return Ok(()),
        Some(1) => {
            let g = g.monic();
            out.push(k.neg(&g.coeff(0)));
            return Ok(());
        }
        _ => {}
    }
    let q = k.order().unwrap();
    let p = k.characteristic();
    for i in 1..q {
        let delta = k.element(i);
        let lin = Poly::new(k, vec![delta.clone(), k.one()]);
        let h = if p == 2 {
            // Trace of delta*x: sum of its 2^j powers.
            let e = q.trailing_zeros();
            let base = Poly::new(k, vec![k.zero(), delta]).rem(g)?;
            let mut acc = Poly::zero(k);
            let mut cur = base;
            for _ in 0..e {
                acc = &acc + &cur;
                cur = (&cur * &cur).rem(g)?;
            }
            acc
        } else {
            &lin.powmod((q - 1) / 2, g)? - &Poly::one(k)
        };
        let d = Poly::gcd(g, &h);
        let dd = d.degree().unwrap_or(0);
        if dd > 0 && Some(dd) < g.degree() {
            split_linear(&d, out)?;
            split_linear(&g.div_exact(&d)?, out)?;
            return Ok(());
        }
    }
    Err(Error::Unsupported("root splitting failed".into()))
}

fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let n = n.abs();
    if n > BigInt::from(1_000_000_000_000i64) {
        return Err(Error::Unsupported(format!("rational root search for coefficient {n}")));
    }
    let mut small = vec![];
    let mut large = vec![];
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            small.push(d.clone());
            let other = &n / &d;
            if other != d {
                large.push(other);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Ok(small)
}

fn rational_roots(f: &Poly) -> Result<Vec<Scalar>> {
    let k = f.field();
    let mut f = f.primitive();
    let mut out = vec![];
    if k.is_zero(&f.coeff(0)) {
        out.push(k.zero());
        while k.is_zero(&f.coeff(0)) {
            f = Poly::new(k, f.c[1..].to_vec());
        }
    }
    if f.is_constant() {
        return Ok(out);
    }
    let a0 = f.coeff(0).as_rational().unwrap().numer().clone();
    let an = f.lc().unwrap().as_rational().unwrap().numer().clone();
    for u in divisors(&a0)? {
        for v in divisors(&an)? {
            if !u.gcd(&v).is_one() {
                continue;
            }
            for sign in [1, -1] {
                let r = Scalar::Q(BigRational::new(&u * sign, v.clone()));
                if k.is_zero(&f.eval(&r)) {
                    out.push(r);
                }
            }
        }
    }
    Ok(out)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let k = self.k;
        let n = self.c.len().max(o.c.len());
        let c = (0..n)
            .map(|i| match (self.c.get(i), o.c.get(i)) {
                (Some(a), Some(b)) => k.add(a, b),
                (Some(a), None) | (None, Some(a)) => a.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Poly::new(k, c)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { k: self.k, c: self.c.iter().map(|a| self.k.neg(a)).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let k = self.k;
        if self.is_zero() || o.is_zero() {
            return Poly::zero(k);
        }
        let mut c = vec![k.zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if k.is_zero(a) {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                let t = k.mul(a, b);
                c[i + j] = k.add(&c[i + j], &t);
            }
        }
        Poly::new(k, c)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, o: Poly) -> Poly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
