//! Curve models `F/K(x)` and element arithmetic.
//!
//! A [`CurveModel`] is either the rational function field `K(x)` or an
//! odd-degree hyperelliptic field `K(x, y)` with `y^2 = f(x)`. Elements are
//! [`FFElem`]s: coordinates over `K(x)` in the power basis `1, y`.
//!
//! A [`Frame`] presents `F` as `K(t)[X]/(m(X))` for some `t` in `F`. The model
//! frame uses `t = x`; pivot frames use `t = w` for a pivot function `w`, with
//! generator `X = x`. All `K(t)`-linear algebra happens in frame coordinates.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{BaseField, Scalar};
use crate::limits;
use crate::linalg::{self, KxSolution};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Rational,
    Hyperelliptic { f: Poly },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveModel {
    k: BaseField,
    kind: ModelKind,
}

/// Element of a function field: `sum coords[j] * y^j`.
#[derive(Clone, PartialEq, Eq)]
pub struct FFElem {
    coords: Vec<RatFunc>,
}

impl fmt::Debug for FFElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", display_coords(&self.coords))
    }
}

impl FFElem {
    pub fn coords(&self) -> &[RatFunc] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(RatFunc::is_zero)
    }

    /// True when every coordinate is a polynomial in `x`.
    pub fn is_poly(&self) -> bool {
        self.coords.iter().all(RatFunc::is_poly)
    }

    pub fn is_constant(&self) -> bool {
        self.coords[0].is_constant() && self.coords[1..].iter().all(RatFunc::is_zero)
    }

    pub fn as_constant(&self) -> Option<Scalar> {
        if self.coords[1..].iter().all(RatFunc::is_zero) {
            self.coords[0].as_constant()
        } else {
            None
        }
    }
}

fn display_coords(c: &[RatFunc]) -> String {
    let mut parts = vec![];
    for (j, r) in c.iter().enumerate() {
        if r.is_zero() {
            continue;
        }
        let s = r.display_in("x");
        parts.push(match j {
            0 => s,
            _ if r.is_one() => "y".into(),
            _ if r.is_poly() && r.num().coeffs().iter().filter(|a| !r.field().is_zero(a)).count() == 1 => {
                format!("{s}*y")
            }
            _ => format!("({s})*y"),
        });
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        match p.strip_prefix('-') {
            Some(rest) => {
                out.push_str(" - ");
                out.push_str(rest);
            }
            None => {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
    }
    out
}

impl CurveModel {
    pub fn rational(k: BaseField) -> Self {
        CurveModel { k, kind: ModelKind::Rational }
    }

    /// `y^2 = f(x)` with `f` squarefree of odd degree at least 3, in odd
    /// characteristic.
    pub fn hyperelliptic(k: BaseField, f: Poly) -> Result<Self> {
        if k.characteristic() == 2 {
            return Err(Error::Config("hyperelliptic models need characteristic other than 2".into()));
        }
        if f.field() != k {
            return Err(Error::Config("curve polynomial over a different field".into()));
        }
        let d = f.degree().unwrap_or(0);
        if d < 3 || d.is_multiple_of(2) {
            return Err(Error::Config(format!("deg f = {d} must be odd and at least 3")));
        }
        limits::check_degree(d, "f")?;
        if !f.is_squarefree()? {
            return Err(Error::Config(format!("f = {f} is not squarefree")));
        }
        Ok(CurveModel { k, kind: ModelKind::Hyperelliptic { f } })
    }

    pub fn field(&self) -> BaseField {
        self.k
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.kind, ModelKind::Rational)
    }

    pub fn f(&self) -> Option<&Poly> {
        match &self.kind {
            ModelKind::Rational => None,
            ModelKind::Hyperelliptic { f } => Some(f),
        }
    }

    pub fn genus(&self) -> usize {
        self.f().map_or(0, |f| (f.degree().unwrap() - 1) / 2)
    }

    /// `[F : K(x)]`.
    pub fn n(&self) -> usize {
        if self.is_rational() {
            1
        } else {
            2
        }
    }

    pub fn elem(&self, coords: Vec<RatFunc>) -> Result<FFElem> {
        if coords.len() != self.n() {
            return Err(Error::Parse(format!("expected {} coordinates, got {}", self.n(), coords.len())));
        }
        if coords.iter().any(|c| c.field() != self.k) {
            return Err(Error::Parse("coordinate over a different field".into()));
        }
        Ok(FFElem { coords })
    }

    pub fn from_ratfunc(&self, r: RatFunc) -> FFElem {
        let mut coords = vec![RatFunc::zero(self.k); self.n()];
        coords[0] = r;
        FFElem { coords }
    }

    pub fn from_poly(&self, p: Poly) -> FFElem {
        self.from_ratfunc(p.into())
    }

    pub fn zero(&self) -> FFElem {
        self.from_ratfunc(RatFunc::zero(self.k))
    }

    pub fn one(&self) -> FFElem {
        self.from_ratfunc(RatFunc::one(self.k))
    }

    pub fn constant(&self, s: Scalar) -> FFElem {
        self.from_ratfunc(RatFunc::constant(self.k, s))
    }

    pub fn x(&self) -> FFElem {
        self.from_ratfunc(RatFunc::x(self.k))
    }

    pub fn x_pow(&self, e: usize) -> FFElem {
        self.from_poly(Poly::monomial(self.k, self.k.one(), e))
    }

    pub fn y(&self) -> Result<FFElem> {
        if self.is_rational() {
            return Err(Error::Unsupported("the rational model has no y".into()));
        }
        Ok(FFElem { coords: vec![RatFunc::zero(self.k), RatFunc::one(self.k)] })
    }

    /// `x^i y^j` for `j` in `{0, 1}`.
    pub fn monomial(&self, i: usize, j: usize) -> Result<FFElem> {
        let xi = self.x_pow(i);
        if j == 0 {
            Ok(xi)
        } else {
            Ok(self.mul(&xi, &self.y()?))
        }
    }

    pub fn add(&self, u: &FFElem, v: &FFElem) -> FFElem {
        FFElem { coords: u.coords.iter().zip(&v.coords).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, u: &FFElem, v: &FFElem) -> FFElem {
        FFElem { coords: u.coords.iter().zip(&v.coords).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self, u: &FFElem) -> FFElem {
        FFElem { coords: u.coords.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, u: &FFElem, s: &Scalar) -> FFElem {
        FFElem { coords: u.coords.iter().map(|a| a.scale(s)).collect() }
    }

    pub fn scale_ratfunc(&self, u: &FFElem, r: &RatFunc) -> FFElem {
        FFElem { coords: u.coords.iter().map(|a| a * r).collect() }
    }

    pub fn mul(&self, u: &FFElem, v: &FFElem) -> FFElem {
        match &self.kind {
            ModelKind::Rational => FFElem { coords: vec![&u.coords[0] * &v.coords[0]] },
            ModelKind::Hyperelliptic { f } => {
                let (a0, a1) = (&u.coords[0], &u.coords[1]);
                let (b0, b1) = (&v.coords[0], &v.coords[1]);
                let ff: RatFunc = f.clone().into();
                let c0 = &(a0 * b0) + &(&(a1 * b1) * &ff);
                let c1 = &(a0 * b1) + &(a1 * b0);
                FFElem { coords: vec![c0, c1] }
            }
        }
    }

    pub fn inv(&self, u: &FFElem) -> Result<FFElem> {
        match &self.kind {
            ModelKind::Rational => Ok(FFElem { coords: vec![u.coords[0].inv()?] }),
            ModelKind::Hyperelliptic { f } => {
                let (a0, a1) = (&u.coords[0], &u.coords[1]);
                let ff: RatFunc = f.clone().into();
                let norm = &(a0 * a0) - &(&(a1 * a1) * &ff);
                let ninv = norm.inv()?;
                Ok(FFElem { coords: vec![a0 * &ninv, &(-a1) * &ninv] })
            }
        }
    }

    pub fn div(&self, u: &FFElem, v: &FFElem) -> Result<FFElem> {
        Ok(self.mul(u, &self.inv(v)?))
    }

    pub fn pow(&self, u: &FFElem, e: i64) -> Result<FFElem> {
        let base = if e < 0 { self.inv(u)? } else { u.clone() };
        let mut e = e.unsigned_abs();
        let mut b = base;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        Ok(acc)
    }

    /// `r(u)` for a rational function `r` and an element `u`.
    pub fn eval_ratfunc(&self, r: &RatFunc, u: &FFElem) -> Result<FFElem> {
        let horner = |p: &Poly| {
            p.coeffs()
                .iter()
                .rev()
                .fold(self.zero(), |acc, a| self.add(&self.mul(&acc, u), &self.constant(a.clone())))
        };
        let num = horner(r.num());
        if r.den().is_one() {
            return Ok(num);
        }
        self.div(&num, &horner(r.den()))
    }

    /// Norm `N_{F/K(x)}(u)`.
    pub fn norm(&self, u: &FFElem) -> RatFunc {
        match &self.kind {
            ModelKind::Rational => u.coords[0].clone(),
            ModelKind::Hyperelliptic { f } => {
                let ff: RatFunc = f.clone().into();
                &(&u.coords[0] * &u.coords[0]) - &(&(&u.coords[1] * &u.coords[1]) * &ff)
            }
        }
    }

    pub fn display(&self, u: &FFElem) -> String {
        display_coords(&u.coords)
    }

    pub fn model_frame(&self) -> Frame {
        let k = self.k;
        let minpoly = match &self.kind {
            ModelKind::Rational => vec![RatFunc::zero(k), RatFunc::one(k)],
            ModelKind::Hyperelliptic { f } => vec![-&RatFunc::from(f.clone()), RatFunc::zero(k), RatFunc::one(k)],
        };
        Frame { model: self.clone(), kind: FrameKind::Model, n: self.n(), minpoly, y_image: None }
    }

    /// Frame over `K(w)` with generator `x`.
    pub fn pivot_frame(&self, w: &FFElem) -> Result<Frame> {
        let k = self.k;
        match &self.kind {
            ModelKind::Rational => {
                let r = &w.coords[0];
                if r.is_constant() {
                    return Err(Error::Precondition("pivot must be nonconstant".into()));
                }
                let n = r.num().degree().unwrap_or(0).max(r.den().degree().unwrap_or(0));
                limits::check_degree(n, "pivot")?;
                let t = RatFunc::x(k);
                // P(X) - t Q(X)
                let raw: Vec<RatFunc> = (0..=n)
                    .map(|i| {
                        let p = RatFunc::constant(k, r.num().coeff(i));
                        let q = RatFunc::constant(k, r.den().coeff(i));
                        &p - &(&t * &q)
                    })
                    .collect();
                let lc = raw[n].inv()?;
                let minpoly = raw.iter().map(|c| c * &lc).collect();
                Ok(Frame {
                    model: self.clone(),
                    kind: FrameKind::RationalPivot { w: r.clone() },
                    n,
                    minpoly,
                    y_image: None,
                })
            }
            ModelKind::Hyperelliptic { f } => {
                if !w.is_poly() {
                    return Err(Error::Unsupported(
                        "hyperelliptic pivots must have polynomial coordinates".into(),
                    ));
                }
                let a = w.coords[0].num().clone();
                let b = w.coords[1].num().clone();
                if b.is_zero() {
                    return Err(Error::Unsupported(format!(
                        "pivot {} lies in K(x); K(w)-coordinates need a nonzero y-part",
                        self.display(w)
                    )));
                }
                let t = RatFunc::x(k);
                // (t - a(X))^2 - b(X)^2 f(X)
                let tma: Vec<RatFunc> = (0..=a.degree().unwrap_or(0))
                    .map(|i| {
                        let ai = RatFunc::constant(k, a.coeff(i));
                        if i == 0 {
                            &t - &ai
                        } else {
                            -&ai
                        }
                    })
                    .collect();
                let sq = vpoly_mul(k, &tma, &tma);
                let b2f = &(&b * &b) * f;
                let n = (sq.len() - 1).max(b2f.degree().unwrap());
                limits::check_degree(n, "pivot")?;
                let raw: Vec<RatFunc> = (0..=n)
                    .map(|i| {
                        let s = sq.get(i).cloned().unwrap_or_else(|| RatFunc::zero(k));
                        &s - &RatFunc::constant(k, b2f.coeff(i))
                    })
                    .collect();
                let lc = raw[n].inv()?;
                let minpoly: Vec<RatFunc> = raw.iter().map(|c| c * &lc).collect();
                let mut frame = Frame {
                    model: self.clone(),
                    kind: FrameKind::HyperPivot { a: a.clone(), b: b.clone() },
                    n,
                    minpoly,
                    y_image: None,
                };
                // y = (t - a(X)) / b(X)
                let mut num = frame.from_x_poly(&(-&a));
                num[0] = &num[0] + &t;
                let den = frame.from_x_poly(&b);
                let y = frame.mul(&num, &frame.inv(&den)?);
                frame.y_image = Some(y);
                Ok(frame)
            }
        }
    }

    /// The same curve over `k2`, an extension of the prime base field.
    pub fn base_change(&self, k2: BaseField) -> Result<CurveModel> {
        let kind = match &self.kind {
            ModelKind::Rational => ModelKind::Rational,
            ModelKind::Hyperelliptic { f } => ModelKind::Hyperelliptic { f: lift_poly(f, k2)? },
        };
        lift_scalar(self.k, &self.k.zero(), k2)?;
        Ok(CurveModel { k: k2, kind })
    }

    /// Image of `u` in the base-changed model `target`.
    pub fn lift_elem(&self, u: &FFElem, target: &CurveModel) -> Result<FFElem> {
        let coords = u
            .coords
            .iter()
            .map(|c| RatFunc::new(lift_poly(c.num(), target.k)?, lift_poly(c.den(), target.k)?))
            .collect::<Result<Vec<_>>>()?;
        target.elem(coords)
    }
}

fn vpoly_mul(k: BaseField, a: &[RatFunc], b: &[RatFunc]) -> Vec<RatFunc> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![RatFunc::zero(k); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = &out[i + j] + &(x * y);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameKind {
    /// `t = x`, generator `y` (or no generator on the rational model).
    Model,
    /// Rational model, `t = w(x)`, generator `x`.
    RationalPivot { w: RatFunc },
    /// Hyperelliptic model, `t = a(x) + b(x) y`, generator `x`.
    HyperPivot { a: Poly, b: Poly },
}

/// `F` presented as `K(t)[X]/(m(X))`.
#[derive(Clone, Debug)]
pub struct Frame {
    model: CurveModel,
    kind: FrameKind,
    n: usize,
    /// Monic minimal polynomial of the generator, low-to-high, length `n + 1`.
    minpoly: Vec<RatFunc>,
    /// Image of the model's `y` (hyperelliptic pivot frames).
    y_image: Option<Vec<RatFunc>>,
}

impl PartialEq for Frame {
    fn eq(&self, o: &Self) -> bool {
        self.model == o.model && self.kind == o.kind
    }
}

impl Eq for Frame {}

impl Frame {
    pub fn field(&self) -> BaseField {
        self.model.field()
    }

    pub fn model(&self) -> &CurveModel {
        &self.model
    }

    pub fn kind(&self) -> &FrameKind {
        &self.kind
    }

    /// `[F : K(t)]`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn minpoly(&self) -> &[RatFunc] {
        &self.minpoly
    }

    /// The coordinate `t` as an element of `F`.
    pub fn t_elem(&self) -> FFElem {
        match &self.kind {
            FrameKind::Model => self.model.x(),
            FrameKind::RationalPivot { w } => self.model.from_ratfunc(w.clone()),
            FrameKind::HyperPivot { a, b } => FFElem { coords: vec![a.clone().into(), b.clone().into()] },
        }
    }

    pub fn zero(&self) -> Vec<RatFunc> {
        vec![RatFunc::zero(self.field()); self.n]
    }

    pub fn one(&self) -> Vec<RatFunc> {
        let mut v = self.zero();
        v[0] = RatFunc::one(self.field());
        v
    }

    pub fn from_scalar(&self, r: RatFunc) -> Vec<RatFunc> {
        let mut v = self.zero();
        v[0] = r;
        v
    }

    /// Reduce a coordinate vector of any length modulo the minimal polynomial.
    pub fn reduce(&self, mut v: Vec<RatFunc>) -> Vec<RatFunc> {
        let k = self.field();
        let n = self.n;
        while v.len() > n {
            let top = v.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = v.len() - n;
            for i in 0..n {
                if !self.minpoly[i].is_zero() {
                    v[shift + i] = &v[shift + i] - &(&top * &self.minpoly[i]);
                }
            }
        }
        v.resize(n, RatFunc::zero(k));
        v
    }

    pub fn add(&self, u: &[RatFunc], v: &[RatFunc]) -> Vec<RatFunc> {
        u.iter().zip(v).map(|(a, b)| a + b).collect()
    }

    pub fn mul(&self, u: &[RatFunc], v: &[RatFunc]) -> Vec<RatFunc> {
        self.reduce(vpoly_mul(self.field(), u, v))
    }

    /// Matrix of multiplication by `u`: column `j` holds `u X^j`.
    pub fn mul_matrix(&self, u: &[RatFunc]) -> Vec<Vec<RatFunc>> {
        let mut cols = vec![u.to_vec()];
        for _ in 1..self.n {
            let mut shifted = vec![RatFunc::zero(self.field())];
            shifted.extend(cols.last().unwrap().iter().cloned());
            cols.push(self.reduce(shifted));
        }
        (0..self.n).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
    }

    pub fn inv(&self, u: &[RatFunc]) -> Result<Vec<RatFunc>> {
        if u.iter().all(RatFunc::is_zero) {
            return Err(Error::DivisionByZero);
        }
        if self.n == 1 {
            return Ok(vec![u[0].inv()?]);
        }
        match linalg::solve_kx(self.field(), &self.mul_matrix(u), &self.one()) {
            KxSolution::Unique(z) => Ok(z),
            _ => Err(Error::Assertion("frame element without inverse".into())),
        }
    }

    /// A polynomial in the generator with constant coefficients.
    pub fn from_x_poly(&self, p: &Poly) -> Vec<RatFunc> {
        let k = self.field();
        self.reduce(p.coeffs().iter().map(|c| RatFunc::constant(k, c.clone())).collect())
    }

    fn coords_of_x_ratfunc(&self, r: &RatFunc) -> Result<Vec<RatFunc>> {
        let num = self.from_x_poly(r.num());
        if r.den().is_one() {
            return Ok(num);
        }
        Ok(self.mul(&num, &self.inv(&self.from_x_poly(r.den()))?))
    }

    pub fn from_parent(&self, u: &FFElem) -> Result<Vec<RatFunc>> {
        match &self.kind {
            FrameKind::Model => Ok(u.coords.clone()),
            FrameKind::RationalPivot { .. } => self.coords_of_x_ratfunc(&u.coords[0]),
            FrameKind::HyperPivot { .. } => {
                let c0 = self.coords_of_x_ratfunc(&u.coords[0])?;
                if u.coords[1].is_zero() {
                    return Ok(c0);
                }
                let c1 = self.coords_of_x_ratfunc(&u.coords[1])?;
                let y = self.y_image.as_ref().unwrap();
                Ok(self.add(&c0, &self.mul(&c1, y)))
            }
        }
    }

    pub fn to_parent(&self, v: &[RatFunc]) -> Result<FFElem> {
        let m = &self.model;
        match &self.kind {
            FrameKind::Model => m.elem(v.to_vec()),
            FrameKind::RationalPivot { w } => {
                let mut acc = RatFunc::zero(self.field());
                let mut xp = RatFunc::one(self.field());
                for c in v {
                    if !c.is_zero() {
                        acc = &acc + &(&c.compose(w)? * &xp);
                    }
                    xp = &xp * &RatFunc::x(self.field());
                }
                Ok(m.from_ratfunc(acc))
            }
            FrameKind::HyperPivot { .. } => {
                let t = self.t_elem();
                let mut acc = m.zero();
                let mut xp = m.one();
                for c in v {
                    if !c.is_zero() {
                        acc = m.add(&acc, &m.mul(&m.eval_ratfunc(c, &t)?, &xp));
                    }
                    xp = m.mul(&xp, &m.x());
                }
                Ok(acc)
            }
        }
    }

    /// `m(a, X)` as a polynomial over `K`, when the coefficients are regular at `t = a`.
    pub fn fibre_poly(&self, a: &Scalar) -> Result<Poly> {
        let coeffs = self.minpoly.iter().map(|c| c.eval(a)).collect::<Result<Vec<_>>>()?;
        Ok(Poly::new(self.field(), coeffs))
    }

    /// Value of a frame element at the point `(t, X) = (a, r)`.
    pub fn eval_at(&self, v: &[RatFunc], a: &Scalar, r: &Scalar) -> Result<Scalar> {
        let k = self.field();
        let mut acc = k.zero();
        let mut rp = k.one();
        for c in v {
            if !c.is_zero() {
                acc = k.add(&acc, &k.mul(&c.eval(a)?, &rp));
            }
            rp = k.mul(&rp, r);
        }
        Ok(acc)
    }

    /// Human-readable name of the coordinate.
    pub fn describe(&self) -> String {
        match &self.kind {
            FrameKind::Model => "x".into(),
            _ => self.model.display(&self.t_elem()),
        }
    }
}


/// Embed a prime-field scalar into an extension of the same characteristic.
pub fn lift_scalar(k: BaseField, a: &Scalar, k2: BaseField) -> Result<Scalar> {
    if !k.is_finite() || k.ext_degree() != 1 || k2.characteristic() != k.characteristic() {
        return Err(Error::Unsupported(format!("base change from {k} to {k2}")));
    }
    Ok(k2.from_i64(k.index_of(a) as i64))
}

fn lift_poly(p: &Poly, k2: BaseField) -> Result<Poly> {
    let k = p.field();
    Ok(Poly::new(k2, p.coeffs().iter().map(|c| lift_scalar(k, c, k2)).collect::<Result<Vec<_>>>()?))
}
