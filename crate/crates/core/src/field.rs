//! Base fields `Q` and `F_{p^m}` and their elements.
//!
//! `F_{p^m}` is represented as `F_p[t]/(modulus)` where the modulus is the
//! least monic irreducible polynomial of degree `m`, ordering monic
//! polynomials by the integer `c_0 + c_1 p + ... + c_{m-1} p^{m-1}` of their
//! non-leading coefficients. Contexts are interned, so [`BaseField`] is `Copy`
//! and cheap to embed in every polynomial.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::limits;

pub const MAX_EXT: usize = limits::MAX_EXTENSION_DEGREE;

/// Interned context of a finite field `F_{p^m}`.
#[derive(Debug)]
pub struct GfCtx {
    p: u32,
    m: usize,
    /// Monic modulus, low-to-high, `modulus[m] == 1`.
    modulus: [u32; MAX_EXT + 1],
    order: u128,
}

impl GfCtx {
    pub fn modulus(&self) -> &[u32] {
        &self.modulus[..=self.m]
    }
}

/// Element of `F_{p^m}`: residues of the `m` coefficients in `F_p[t]/(modulus)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Fq(pub [u16; MAX_EXT]);

/// An exact scalar. Rationals are always in lowest terms with positive
/// denominator (maintained by `BigRational`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(BigRational),
    F(Fq),
}

#[derive(Clone, Copy)]
pub enum BaseField {
    Rationals,
    Finite(&'static GfCtx),
}

impl PartialEq for BaseField {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (BaseField::Rationals, BaseField::Rationals) => true,
            (BaseField::Finite(a), BaseField::Finite(b)) => a.p == b.p && a.m == b.m,
            _ => false,
        }
    }
}
impl Eq for BaseField {}

impl fmt::Debug for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseField::Rationals => write!(f, "Q"),
            BaseField::Finite(c) if c.m == 1 => write!(f, "F_{}", c.p),
            BaseField::Finite(c) => write!(f, "F_{}^{}", c.p, c.m),
        }
    }
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn registry() -> &'static Mutex<HashMap<(u32, usize), &'static GfCtx>> {
    static REG: OnceLock<Mutex<HashMap<(u32, usize), &'static GfCtx>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

impl BaseField {
    pub fn rationals() -> Self {
        BaseField::Rationals
    }

    pub fn prime(p: u32) -> Result<Self> {
        Self::finite(p, 1)
    }

    /// `F_{p^m}` with the deterministic modulus described in the module docs.
    pub fn finite(p: u32, m: usize) -> Result<Self> {
        if p >= limits::MAX_CHARACTERISTIC {
            return Err(Error::Limit(format!("characteristic {p} exceeds 2^16")));
        }
        if !is_prime(p) {
            return Err(Error::Config(format!("{p} is not prime")));
        }
        if m == 0 || m > MAX_EXT {
            return Err(Error::Limit(format!("extension degree {m} outside 1..={MAX_EXT}")));
        }
        let mut reg = registry().lock().expect("field registry poisoned");
        if let Some(ctx) = reg.get(&(p, m)) {
            return Ok(BaseField::Finite(ctx));
        }
        let modulus = least_irreducible(p, m);
        let mut arr = [0u32; MAX_EXT + 1];
        arr[..=m].copy_from_slice(&modulus);
        let ctx: &'static GfCtx = Box::leak(Box::new(GfCtx {
            p,
            m,
            modulus: arr,
            order: (p as u128).pow(m as u32),
        }));
        reg.insert((p, m), ctx);
        Ok(BaseField::Finite(ctx))
    }

    pub fn characteristic(&self) -> u32 {
        match self {
            BaseField::Rationals => 0,
            BaseField::Finite(c) => c.p,
        }
    }

    pub fn ext_degree(&self) -> usize {
        match self {
            BaseField::Rationals => 1,
            BaseField::Finite(c) => c.m,
        }
    }

    /// Number of elements, `None` for `Q`.
    pub fn order(&self) -> Option<u128> {
        match self {
            BaseField::Rationals => None,
            BaseField::Finite(c) => Some(c.order),
        }
    }

    pub fn modulus(&self) -> Option<&'static [u32]> {
        match self {
            BaseField::Rationals => None,
            BaseField::Finite(c) if c.m == 1 => None,
            BaseField::Finite(c) => Some(c.modulus()),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, BaseField::Finite(_))
    }

    pub fn zero(&self) -> Scalar {
        match self {
            BaseField::Rationals => Scalar::Q(BigRational::zero()),
            BaseField::Finite(_) => Scalar::F(Fq::default()),
        }
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            BaseField::Rationals => Scalar::Q(BigRational::from_integer(BigInt::from(v))),
            BaseField::Finite(c) => {
                let mut e = Fq::default();
                e.0[0] = v.rem_euclid(c.p as i64) as u16;
                Scalar::F(e)
            }
        }
    }

    /// `n / d`, `None` when `d` vanishes in the field.
    pub fn from_ratio(&self, n: &BigInt, d: &BigInt) -> Option<Scalar> {
        match self {
            BaseField::Rationals => {
                if d.is_zero() {
                    None
                } else {
                    Some(Scalar::Q(BigRational::new(n.clone(), d.clone())))
                }
            }
            BaseField::Finite(c) => {
                let p = BigInt::from(c.p);
                let nn = ((n % &p) + &p) % &p;
                let dd = ((d % &p) + &p) % &p;
                let num = self.from_i64(nn.to_i64().unwrap());
                let den = self.from_i64(dd.to_i64().unwrap());
                self.div(&num, &den)
            }
        }
    }

    /// Element with canonical index `idx` (finite fields only).
    /// Index `c_0 + c_1 p + ...` enumerates `F_{p^m}` in canonical order.
    pub fn element(&self, idx: u128) -> Scalar {
        match self {
            BaseField::Rationals => panic!("Q has no element enumeration"),
            BaseField::Finite(c) => {
                let mut e = Fq::default();
                let mut rest = idx % c.order;
                for slot in e.0.iter_mut().take(c.m) {
                    *slot = (rest % c.p as u128) as u16;
                    rest /= c.p as u128;
                }
                Scalar::F(e)
            }
        }
    }

    pub fn index_of(&self, a: &Scalar) -> u128 {
        match (self, a) {
            (BaseField::Finite(c), Scalar::F(e)) => {
                let mut idx = 0u128;
                for i in (0..c.m).rev() {
                    idx = idx * c.p as u128 + e.0[i] as u128;
                }
                idx
            }
            _ => panic!("index_of on non-finite field"),
        }
    }

    /// Deterministic scan `0, 1, 2, ...` (finite) or `0, 1, -1, 2, -2, ...` (Q).
    pub fn scan(&self, i: u128) -> Option<Scalar> {
        match self {
            BaseField::Finite(c) => (i < c.order).then(|| self.element(i)),
            BaseField::Rationals => {
                let mag = i.div_ceil(2) as i64;
                Some(self.from_i64(if i % 2 == 1 { mag } else { -mag }))
            }
        }
    }

    pub fn is_zero(&self, a: &Scalar) -> bool {
        match a {
            Scalar::Q(q) => q.is_zero(),
            Scalar::F(e) => e.0.iter().all(|&c| c == 0),
        }
    }

    pub fn is_one(&self, a: &Scalar) -> bool {
        *a == self.one()
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (_, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x + y),
            (BaseField::Finite(c), Scalar::F(x), Scalar::F(y)) => {
                let p = c.p;
                let mut r = Fq::default();
                for i in 0..c.m {
                    let s = x.0[i] as u32 + y.0[i] as u32;
                    r.0[i] = if s >= p { s - p } else { s } as u16;
                }
                Scalar::F(r)
            }
            _ => panic!("mixed-field scalar arithmetic"),
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match (self, a) {
            (_, Scalar::Q(x)) => Scalar::Q(-x),
            (BaseField::Finite(c), Scalar::F(x)) => {
                let mut r = Fq::default();
                for i in 0..c.m {
                    r.0[i] = if x.0[i] == 0 { 0 } else { (c.p - x.0[i] as u32) as u16 };
                }
                Scalar::F(r)
            }
            _ => panic!("mixed-field scalar arithmetic"),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match (self, a, b) {
            (_, Scalar::Q(x), Scalar::Q(y)) => Scalar::Q(x * y),
            (BaseField::Finite(c), Scalar::F(x), Scalar::F(y)) => Scalar::F(gf_mul(c, x, y)),
            _ => panic!("mixed-field scalar arithmetic"),
        }
    }

    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if self.is_zero(a) {
            return None;
        }
        match (self, a) {
            (_, Scalar::Q(x)) => Some(Scalar::Q(x.recip())),
            (BaseField::Finite(c), Scalar::F(x)) => Some(Scalar::F(gf_inv(c, x))),
            _ => panic!("mixed-field scalar arithmetic"),
        }
    }

    pub fn div(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    pub fn pow(&self, a: &Scalar, mut e: u128) -> Scalar {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Canonical total order on scalars: index order for finite fields,
    /// `(numerator, denominator)` lexicographic for `Q`.
    pub fn cmp(&self, a: &Scalar, b: &Scalar) -> Ordering {
        match (a, b) {
            (Scalar::Q(x), Scalar::Q(y)) => (x.numer(), x.denom()).cmp(&(y.numer(), y.denom())),
            (Scalar::F(_), Scalar::F(_)) => self.index_of(a).cmp(&self.index_of(b)),
            _ => panic!("mixed-field comparison"),
        }
    }

    pub fn is_square(&self, a: &Scalar) -> bool {
        self.sqrt(a).is_some()
    }

    /// A square root of `a` if one exists in the field.
    pub fn sqrt(&self, a: &Scalar) -> Option<Scalar> {
        if self.is_zero(a) {
            return Some(a.clone());
        }
        match (self, a) {
            (_, Scalar::Q(x)) => {
                if x.is_negative() {
                    return None;
                }
                let n = x.numer().sqrt();
                let d = x.denom().sqrt();
                (&n * &n == *x.numer() && &d * &d == *x.denom())
                    .then(|| Scalar::Q(BigRational::new(n, d)))
            }
            (BaseField::Finite(c), _) => {
                let q = c.order;
                if c.p == 2 {
                    return Some(self.pow(a, q / 2));
                }
                if !self.is_one(&self.pow(a, (q - 1) / 2)) {
                    return None;
                }
                Some(self.tonelli_shanks(a, q))
            }
            _ => panic!("mixed-field scalar arithmetic"),
        }
    }

    fn tonelli_shanks(&self, a: &Scalar, q: u128) -> Scalar {
        let mut s = 0u32;
        let mut odd = q - 1;
        while odd.is_multiple_of(2) {
            odd /= 2;
            s += 1;
        }
        let minus_one = self.neg(&self.one());
        let mut z = self.one();
        for i in 2..q {
            let cand = self.element(i);
            if self.pow(&cand, (q - 1) / 2) == minus_one {
                z = cand;
                break;
            }
        }
        let mut m = s;
        let mut c = self.pow(&z, odd);
        let mut t = self.pow(a, odd);
        let mut r = self.pow(a, odd.div_ceil(2));
        while !self.is_one(&t) {
            let mut i = 0u32;
            let mut t2 = t.clone();
            while !self.is_one(&t2) {
                t2 = self.mul(&t2, &t2);
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = self.mul(&b, &b);
            }
            m = i;
            c = self.mul(&b, &b);
            t = self.mul(&t, &c);
            r = self.mul(&r, &b);
        }
        r
    }

    pub fn display(&self, a: &Scalar) -> String {
        match (self, a) {
            (_, Scalar::Q(x)) => {
                if x.is_integer() {
                    x.numer().to_string()
                } else {
                    format!("{}/{}", x.numer(), x.denom())
                }
            }
            (BaseField::Finite(c), Scalar::F(e)) if c.m == 1 => e.0[0].to_string(),
            (BaseField::Finite(c), Scalar::F(e)) => {
                let mut terms: Vec<String> = (0..c.m)
                    .filter(|&i| e.0[i] != 0)
                    .map(|i| match i {
                        0 => e.0[0].to_string(),
                        _ => {
                            let z = if i == 1 { "z".to_string() } else { format!("z^{i}") };
                            if e.0[i] == 1 {
                                z
                            } else {
                                format!("{}*{z}", e.0[i])
                            }
                        }
                    })
                    .collect();
                match terms.len() {
                    0 => "0".into(),
                    1 => terms.pop().unwrap(),
                    _ => format!("({})", terms.join("+")),
                }
            }
            _ => panic!("mixed-field display"),
        }
    }

    /// Coefficient list of a finite-field element, length `m`.
    pub fn coefficients(&self, a: &Scalar) -> Vec<u32> {
        match (self, a) {
            (BaseField::Finite(c), Scalar::F(e)) => e.0[..c.m].iter().map(|&x| x as u32).collect(),
            _ => panic!("coefficients of a non-finite-field scalar"),
        }
    }

    pub fn from_coefficients(&self, coeffs: &[u32]) -> Result<Scalar> {
        match self {
            BaseField::Finite(c) => {
                if coeffs.len() > c.m {
                    return Err(Error::Parse(format!(
                        "element has {} coefficients, field degree is {}",
                        coeffs.len(),
                        c.m
                    )));
                }
                let mut e = Fq::default();
                for (i, &v) in coeffs.iter().enumerate() {
                    if v >= c.p {
                        return Err(Error::Parse(format!("coefficient {v} not in [0, {})", c.p)));
                    }
                    e.0[i] = v as u16;
                }
                Ok(Scalar::F(e))
            }
            BaseField::Rationals => Err(Error::Parse("coefficient list given for Q".into())),
        }
    }
}

fn gf_mul(c: &GfCtx, x: &Fq, y: &Fq) -> Fq {
    let p = c.p as u64;
    if c.m == 1 {
        let mut r = Fq::default();
        r.0[0] = ((x.0[0] as u64 * y.0[0] as u64) % p) as u16;
        return r;
    }
    let m = c.m;
    let mut prod = [0u64; 2 * MAX_EXT];
    for i in 0..m {
        if x.0[i] == 0 {
            continue;
        }
        for j in 0..m {
            prod[i + j] += x.0[i] as u64 * y.0[j] as u64;
        }
    }
    for v in prod.iter_mut() {
        *v %= p;
    }
    for d in (m..2 * m - 1).rev() {
        let lead = prod[d];
        if lead == 0 {
            continue;
        }
        prod[d] = 0;
        for i in 0..m {
            let sub = lead * c.modulus[i] as u64 % p;
            prod[d - m + i] = (prod[d - m + i] + p - sub) % p;
        }
    }
    let mut r = Fq::default();
    for (ri, &pi) in r.0.iter_mut().zip(&prod[..m]) {
        *ri = pi as u16;
    }
    r
}

fn gf_inv(c: &GfCtx, x: &Fq) -> Fq {
    let p = c.p as u64;
    if c.m == 1 {
        let mut r = Fq::default();
        r.0[0] = modpow(x.0[0] as u64, p - 2, p) as u16;
        return r;
    }
    // Extended Euclid in F_p[t] against the modulus.
    let a: Vec<u64> = x.0[..c.m].iter().map(|&v| v as u64).collect();
    let m: Vec<u64> = c.modulus().iter().map(|&v| v as u64).collect();
    let (g, s) = fp_ext_gcd(&a, &m, p);
    debug_assert_eq!(g.len(), 1);
    let ginv = modpow(g[0], p - 2, p);
    let mut r = Fq::default();
    for (i, v) in s.iter().enumerate() {
        r.0[i] = (v * ginv % p) as u16;
    }
    r
}

pub(crate) fn modpow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

// Small dense polynomials over F_p, used only for field construction.

fn fp_trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn fp_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = fp_trim(a.to_vec());
    let b = fp_trim(b.to_vec());
    let db = b.len() - 1;
    let inv = modpow(b[db], p - 2, p);
    let mut q = vec![0u64; r.len().saturating_sub(db).max(1)];
    while r.len() > db {
        let dr = r.len() - 1;
        let coef = r[dr] * inv % p;
        q[dr - db] = coef;
        for i in 0..=db {
            let sub = coef * b[i] % p;
            r[dr - db + i] = (r[dr - db + i] + p - sub) % p;
        }
        r = fp_trim(r);
    }
    (fp_trim(q), r)
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + x * y) % p;
        }
    }
    fp_trim(r)
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut r = vec![0u64; n];
    for (i, slot) in r.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *slot = (x + p - y) % p;
    }
    fp_trim(r)
}

/// Returns `(g, s)` with `s*a ≡ g (mod m)`.
fn fp_ext_gcd(a: &[u64], m: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let (mut r0, mut r1) = (fp_trim(m.to_vec()), fp_trim(a.to_vec()));
    let (mut s0, mut s1) = (vec![], vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        let s = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    (r0, s0)
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut x, mut y) = (fp_trim(a.to_vec()), fp_trim(b.to_vec()));
    while !y.is_empty() {
        let (_, r) = fp_divrem(&x, &y, p);
        x = std::mem::replace(&mut y, r);
    }
    x
}

fn fp_mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
    fp_divrem(&fp_mul(a, b, p), f, p).1
}

/// `X^(p^k) mod f`.
fn fp_frobenius_power(f: &[u64], k: usize, p: u64) -> Vec<u64> {
    let mut cur = fp_divrem(&[0, 1], f, p).1;
    for _ in 0..k {
        let mut acc = vec![1u64];
        let mut base = cur.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = fp_mulmod(&acc, &base, f, p);
            }
            base = fp_mulmod(&base, &base, f, p);
            e >>= 1;
        }
        cur = acc;
    }
    cur
}

/// Rabin's irreducibility test over `F_p` for a monic `f` of degree `m`.
pub(crate) fn fp_is_irreducible(f: &[u64], p: u64) -> bool {
    let m = f.len() - 1;
    if m == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    let full = fp_frobenius_power(f, m, p);
    if fp_sub(&full, &x, p) != Vec::<u64>::new() {
        return false;
    }
    let mut r = 2;
    let mut rest = m;
    while rest > 1 {
        if rest.is_multiple_of(r) {
            let h = fp_frobenius_power(f, m / r, p);
            let g = fp_gcd(&fp_sub(&h, &x, p), f, p);
            if g.len() != 1 {
                return false;
            }
            while rest.is_multiple_of(r) {
                rest /= r;
            }
        }
        r += 1;
    }
    true
}

fn least_irreducible(p: u32, m: usize) -> Vec<u32> {
    if m == 1 {
        return vec![0, 1];
    }
    let p64 = p as u64;
    let mut idx: u128 = 0;
    loop {
        let mut f = vec![0u64; m + 1];
        let mut rest = idx;
        for slot in f.iter_mut().take(m) {
            *slot = (rest % p as u128) as u64;
            rest /= p as u128;
        }
        f[m] = 1;
        if f[0] != 0 && fp_is_irreducible(&f, p64) {
            return f.into_iter().map(|v| v as u32).collect();
        }
        idx += 1;
    }
}

impl Scalar {
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Q(q) => Some(q),
            _ => None,
        }
    }
}

/// Parse a rational literal `"n"` or `"n/d"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let d: BigInt = d.parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

pub fn rational_to_string(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}
