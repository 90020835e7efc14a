//! Degree-one places of the supported models: valuations, local leading
//! coefficients, evaluation and split fibres.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::field::{BaseField, Scalar};
use crate::model::{CurveModel, FFElem, ModelKind};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;

/// Points of the rational model below this many scan steps are tried when
/// searching over `Q`.
const RATIONAL_SCAN_LIMIT: u128 = 4000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlaceId {
    /// The unique place above infinity of an odd-degree hyperelliptic model.
    InfinityHyp,
    /// Zero of `x - a` on the rational model.
    Finite0(Scalar),
    /// Infinity on the rational model.
    Infinity0,
    /// Unramified point `(a, b)` with `b^2 = f(a) != 0` on a hyperelliptic model.
    Point(Scalar, Scalar),
}

impl PlaceId {
    /// Canonical order: finite places by coordinates, infinite places last.
    pub fn cmp_in(&self, k: BaseField, o: &PlaceId) -> Ordering {
        use PlaceId::*;
        let rank = |p: &PlaceId| match p {
            Finite0(_) | Point(..) => 0,
            Infinity0 | InfinityHyp => 1,
        };
        match (self, o) {
            (Finite0(a), Finite0(b)) => k.cmp(a, b),
            (Point(a, b), Point(c, d)) => k.cmp(a, c).then_with(|| k.cmp(b, d)),
            _ => rank(self).cmp(&rank(o)),
        }
    }

    pub fn display(&self, k: BaseField) -> String {
        match self {
            PlaceId::InfinityHyp => "P_inf".into(),
            PlaceId::Infinity0 => "inf".into(),
            PlaceId::Finite0(a) => format!("(x - {})", k.display(a)),
            PlaceId::Point(a, b) => format!("({}, {})", k.display(a), k.display(b)),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PlaceId::InfinityHyp | PlaceId::Infinity0)
    }
}

/// The canonical place at infinity of a model.
pub fn infinity(model: &CurveModel) -> PlaceId {
    if model.is_rational() {
        PlaceId::Infinity0
    } else {
        PlaceId::InfinityHyp
    }
}

fn unsupported(model: &CurveModel, p: &PlaceId) -> Error {
    Error::Unsupported(format!(
        "place {} on a {} model",
        p.display(model.field()),
        if model.is_rational() { "rational" } else { "hyperelliptic" }
    ))
}

pub fn check_place(model: &CurveModel, p: &PlaceId) -> Result<()> {
    let k = model.field();
    match (model.kind(), p) {
        (ModelKind::Rational, PlaceId::Finite0(_) | PlaceId::Infinity0) => Ok(()),
        (ModelKind::Hyperelliptic { .. }, PlaceId::InfinityHyp) => Ok(()),
        (ModelKind::Hyperelliptic { f }, PlaceId::Point(a, b)) => {
            let fa = f.eval(a);
            if k.is_zero(&fa) {
                return Err(Error::Unsupported(format!("ramified point ({}, 0)", k.display(a))));
            }
            if k.mul(b, b) != fa {
                return Err(Error::Parse(format!("({}, {}) is not on the curve", k.display(a), k.display(b))));
            }
            Ok(())
        }
        _ => Err(unsupported(model, p)),
    }
}

/// Local expansion data at an unramified point `(a, b)`: `y` as a power series
/// in `s = x - a`.
fn y_series(f: &Poly, a: &Scalar, b: &Scalar, prec: usize) -> Vec<Scalar> {
    let k = f.field();
    let shifted = f.compose(&Poly::new(k, vec![a.clone(), k.one()]));
    let two_b_inv = k.inv(&k.add(b, b)).unwrap();
    let mut c = vec![b.clone()];
    for i in 1..prec {
        let mut acc = shifted.coeff(i);
        for j in 1..i {
            acc = k.sub(&acc, &k.mul(&c[j], &c[i - j]));
        }
        c.push(k.mul(&acc, &two_b_inv));
    }
    c
}

fn series_mul(k: BaseField, a: &[Scalar], b: &[Scalar], prec: usize) -> Vec<Scalar> {
    let mut out = vec![k.zero(); prec];
    for (i, x) in a.iter().enumerate().take(prec) {
        if k.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(prec - i) {
            out[i + j] = k.add(&out[i + j], &k.mul(x, y));
        }
    }
    out
}

fn taylor(p: &Poly, a: &Scalar) -> Vec<Scalar> {
    let k = p.field();
    p.compose(&Poly::new(k, vec![a.clone(), k.one()])).coeffs().to_vec()
}

/// `(order, leading coefficient)` of `A + B y` at an unramified point.
fn point_leading(model: &CurveModel, a_poly: &Poly, b_poly: &Poly, a: &Scalar, b: &Scalar) -> Result<(i64, Scalar)> {
    let k = model.field();
    let f = model.f().unwrap();
    let norm = &(a_poly * a_poly) - &(&(b_poly * b_poly) * f);
    if norm.is_zero() {
        return Err(Error::ZeroValuation);
    }
    let bound = norm.multiplicity(a)?;
    let prec = bound + 1;
    let ys = y_series(f, a, b, prec);
    let mut s = taylor(a_poly, a);
    s.resize(prec.max(s.len()), k.zero());
    let by = series_mul(k, &taylor(b_poly, a), &ys, prec);
    for (i, c) in by.into_iter().enumerate() {
        s[i] = k.add(&s[i], &c);
    }
    let i = s.iter().take(prec).position(|c| !k.is_zero(c)).ok_or_else(|| {
        Error::Assertion("local expansion vanished below the norm bound".into())
    })?;
    Ok((i as i64, s[i].clone()))
}

/// Leading coefficient of a polynomial's expansion at `a`: `(order, coeff)`.
fn poly_leading_at(p: &Poly, a: &Scalar) -> (i64, Scalar) {
    let t = taylor(p, a);
    let i = t.iter().position(|c| !p.field().is_zero(c)).unwrap();
    (i as i64, t[i].clone())
}

/// `(v_P(u), lc_P(u))`. The leading coefficient is taken relative to a fixed
/// local monomial of each valuation (`(x-a)^e` at finite places, `x^e` or
/// `x^e y` at infinity), so equal-valuation elements can be cancelled.
pub fn leading(model: &CurveModel, u: &FFElem, p: &PlaceId) -> Result<(i64, Scalar)> {
    if u.is_zero() {
        return Err(Error::ZeroValuation);
    }
    check_place(model, p)?;
    let k = model.field();
    let c = u.coords();
    match p {
        PlaceId::Infinity0 => {
            let r = &c[0];
            Ok((r.ord_inf()?, k.div(r.num().lc().unwrap(), r.den().lc().unwrap()).unwrap()))
        }
        PlaceId::Finite0(a) => {
            let r = &c[0];
            let (vn, ln) = poly_leading_at(r.num(), a);
            let (vd, ld) = poly_leading_at(r.den(), a);
            Ok((vn - vd, k.div(&ln, &ld).unwrap()))
        }
        PlaceId::InfinityHyp => {
            let g = model.genus() as i64;
            let term = |r: &RatFunc, shift: i64| -> Option<(i64, Scalar)> {
                (!r.is_zero()).then(|| {
                    (2 * r.ord_inf().unwrap() - shift, k.div(r.num().lc().unwrap(), r.den().lc().unwrap()).unwrap())
                })
            };
            let t0 = term(&c[0], 0);
            let t1 = term(&c[1], 2 * g + 1);
            Ok(match (t0, t1) {
                (Some(x), Some(y)) => {
                    if x.0 < y.0 {
                        x
                    } else {
                        y
                    }
                }
                (Some(x), None) | (None, Some(x)) => x,
                (None, None) => unreachable!(),
            })
        }
        PlaceId::Point(a, b) => {
            let d = Poly::lcm(c[0].den(), c[1].den());
            let a_poly = c[0].num() * &d.div_exact(c[0].den())?;
            let b_poly = c[1].num() * &d.div_exact(c[1].den())?;
            let (vn, ln) = point_leading(model, &a_poly, &b_poly, a, b)?;
            let (vd, ld) = poly_leading_at(&d, a);
            Ok((vn - vd, k.div(&ln, &ld).unwrap()))
        }
    }
}

pub fn valuation(model: &CurveModel, u: &FFElem, p: &PlaceId) -> Result<i64> {
    if u.is_zero() {
        return Err(Error::ZeroValuation);
    }
    check_place(model, p)?;
    match p {
        PlaceId::Infinity0 => u.coords()[0].ord_inf(),
        PlaceId::Finite0(a) => u.coords()[0].ord_at(a),
        _ => Ok(leading(model, u, p)?.0),
    }
}

pub fn evaluate(model: &CurveModel, u: &FFElem, p: &PlaceId) -> Result<Scalar> {
    check_place(model, p)?;
    let k = model.field();
    let c = u.coords();
    match p {
        PlaceId::Finite0(a) if c[0].is_regular_at(a) => return c[0].eval(a),
        PlaceId::Point(a, b) if c.iter().all(|r| r.is_regular_at(a)) => {
            return Ok(k.add(&c[0].eval(a)?, &k.mul(&c[1].eval(a)?, b)));
        }
        _ => {}
    }
    if u.is_zero() {
        return Ok(k.zero());
    }
    let (v, lc) = leading(model, u, p)?;
    match v.cmp(&0) {
        Ordering::Greater => Ok(k.zero()),
        Ordering::Equal => Ok(lc),
        Ordering::Less => Err(Error::Pole(p.display(k))),
    }
}

/// The fibre of `x` over `a` on a hyperelliptic model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fibre {
    pub a: Scalar,
    /// Points in canonical order; ramified fibres carry the single point `(a, 0)`.
    pub points: Vec<(Scalar, Scalar)>,
    pub ramified: bool,
}

pub fn split_points(model: &CurveModel, a: &Scalar) -> Result<Fibre> {
    let f = model
        .f()
        .ok_or_else(|| Error::Unsupported("split_points needs a hyperelliptic model".into()))?;
    let k = model.field();
    let fa = f.eval(a);
    if k.is_zero(&fa) {
        return Ok(Fibre { a: a.clone(), points: vec![(a.clone(), k.zero())], ramified: true });
    }
    let points = match k.sqrt(&fa) {
        None => vec![],
        Some(b) => {
            let mut bs = [b.clone(), k.neg(&b)];
            bs.sort_by(|x, y| k.cmp(x, y));
            bs.into_iter().map(|b| (a.clone(), b)).collect()
        }
    };
    Ok(Fibre { a: a.clone(), points, ramified: false })
}

/// Deterministic scan of candidate fibre coordinates: all of `K` for finite
/// fields, `0, 1, -1, 2, ...` up to a fixed bound over `Q`.
pub fn scan_scalars(k: BaseField) -> impl Iterator<Item = Scalar> {
    let limit = k.order().unwrap_or(RATIONAL_SCAN_LIMIT);
    (0..limit).map_while(move |i| k.scan(i))
}

/// First `a` in scan order, outside `avoid`, whose fibre is unramified and
/// fully split.
pub fn find_split_locus(model: &CurveModel, avoid: &[Scalar]) -> Result<Scalar> {
    let k = model.field();
    for a in scan_scalars(k) {
        if avoid.contains(&a) {
            continue;
        }
        let ok = match model.f() {
            None => true,
            Some(f) => {
                let fa = f.eval(&a);
                !k.is_zero(&fa) && k.is_square(&fa)
            }
        };
        if ok {
            return Ok(a);
        }
    }
    Err(Error::Exhausted(format!("no split unramified fibre over {k}")))
}

/// The places over `x = a` as [`PlaceId`]s (rational: the single place).
pub fn places_over(model: &CurveModel, a: &Scalar) -> Result<Vec<PlaceId>> {
    if model.is_rational() {
        return Ok(vec![PlaceId::Finite0(a.clone())]);
    }
    let fib = split_points(model, a)?;
    if fib.ramified {
        return Err(Error::Unsupported("ramified fibre".into()));
    }
    Ok(fib.points.into_iter().map(|(a, b)| PlaceId::Point(a, b)).collect())
}
