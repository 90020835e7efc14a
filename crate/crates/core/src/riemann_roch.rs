//! Divisors and explicit Riemann-Roch spaces on the supported models.

use crate::error::{Error, Result};
use crate::field::BaseField;
use crate::model::{CurveModel, FFElem};
use crate::places::{self, PlaceId};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::subspace::KSubspace;

/// Finite formal sum of degree-one places, sorted canonically, without zero
/// multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divisor {
    entries: Vec<(PlaceId, i64)>,
}

impl Divisor {
    pub fn zero() -> Self {
        Divisor { entries: vec![] }
    }

    pub fn new(k: BaseField, entries: impl IntoIterator<Item = (PlaceId, i64)>) -> Self {
        let mut out: Vec<(PlaceId, i64)> = vec![];
        for (p, m) in entries {
            match out.iter_mut().find(|(q, _)| *q == p) {
                Some(e) => e.1 += m,
                None => out.push((p, m)),
            }
        }
        out.retain(|(_, m)| *m != 0);
        out.sort_by(|a, b| a.0.cmp_in(k, &b.0));
        Divisor { entries: out }
    }

    pub fn single(p: PlaceId, m: i64) -> Self {
        Divisor { entries: if m == 0 { vec![] } else { vec![(p, m)] } }
    }

    pub fn entries(&self) -> &[(PlaceId, i64)] {
        &self.entries
    }

    pub fn degree(&self) -> i64 {
        self.entries.iter().map(|(_, m)| m).sum()
    }

    pub fn mult(&self, p: &PlaceId) -> i64 {
        self.entries.iter().find(|(q, _)| q == p).map_or(0, |e| e.1)
    }

    pub fn is_effective(&self) -> bool {
        self.entries.iter().all(|(_, m)| *m > 0)
    }

    /// Places with positive multiplicity.
    pub fn poles(&self) -> impl Iterator<Item = &(PlaceId, i64)> {
        self.entries.iter().filter(|(_, m)| *m > 0)
    }

    pub fn display(&self, k: BaseField) -> String {
        if self.entries.is_empty() {
            return "0".into();
        }
        self.entries
            .iter()
            .map(|(p, m)| format!("{m}*{}", p.display(k)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// True iff `(u) + D >= 0` at every place in the support of `D` and at
    /// the model's infinity.
    pub fn admits(&self, model: &CurveModel, u: &FFElem) -> Result<bool> {
        if u.is_zero() {
            return Ok(true);
        }
        let inf = places::infinity(model);
        let mut checked = self.entries.iter().map(|(p, m)| (p.clone(), *m)).collect::<Vec<_>>();
        if !checked.iter().any(|(p, _)| *p == inf) {
            checked.push((inf, 0));
        }
        for (p, m) in checked {
            if places::valuation(model, u, &p)? + m < 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug)]
pub struct RRBasis {
    pub divisor: Divisor,
    pub basis: Vec<FFElem>,
    pub dim: usize,
    pub genus_used: usize,
}

impl RRBasis {
    pub fn space(&self, model: &CurveModel) -> KSubspace {
        KSubspace::span(model, &self.basis)
    }
}

/// Explicit basis of `L(D)`.
///
/// Rational model: any divisor on degree-one places (partial fractions when
/// `D >= 0`). Hyperelliptic model: `D = n P_inf` only.
pub fn rr_basis(model: &CurveModel, d: &Divisor) -> Result<RRBasis> {
    let k = model.field();
    for (p, _) in d.entries() {
        places::check_place(model, p)?;
    }
    let basis = if model.is_rational() {
        rational_basis(model, d)?
    } else {
        if d.entries().iter().any(|(p, _)| *p != PlaceId::InfinityHyp) {
            return Err(Error::Unsupported(
                "hyperelliptic Riemann-Roch spaces are limited to multiples of P_inf".into(),
            ));
        }
        let n = d.mult(&PlaceId::InfinityHyp);
        let g = model.genus() as i64;
        let mut b = vec![];
        for i in 0..=n.max(-1) / 2 {
            if 2 * i <= n {
                b.push(model.x_pow(i as usize));
            }
        }
        for i in 0.. {
            if 2 * i + 2 * g + 1 > n {
                break;
            }
            b.push(model.monomial(i as usize, 1)?);
        }
        b
    };
    let _ = k;
    Ok(RRBasis { divisor: d.clone(), dim: basis.len(), basis, genus_used: model.genus() })
}

fn rational_basis(model: &CurveModel, d: &Divisor) -> Result<Vec<FFElem>> {
    let k = model.field();
    let deg = d.degree();
    if deg < 0 {
        return Ok(vec![]);
    }
    let m_inf = d.mult(&PlaceId::Infinity0);
    let finite: Vec<(crate::field::Scalar, i64)> = d
        .entries()
        .iter()
        .filter_map(|(p, m)| match p {
            PlaceId::Finite0(a) => Some((a.clone(), *m)),
            _ => None,
        })
        .collect();
    if d.entries().iter().all(|(_, m)| *m >= 0) {
        let mut b: Vec<FFElem> = (0..=m_inf).map(|e| model.x_pow(e as usize)).collect();
        for (a, m) in &finite {
            let lin: RatFunc = Poly::linear_root(k, a).into();
            for j in 1..=*m {
                b.push(model.from_ratfunc(lin.pow(-j)?));
            }
        }
        return Ok(b);
    }
    // Z x^e / E with E the pole part and Z the forced zeros.
    let mut e_poly = Poly::one(k);
    let mut z_poly = Poly::one(k);
    for (a, m) in &finite {
        let lin = Poly::linear_root(k, a);
        if *m > 0 {
            e_poly = &e_poly * &lin.pow(*m as u64);
        } else {
            z_poly = &z_poly * &lin.pow((-*m) as u64);
        }
    }
    (0..=deg)
        .map(|e| {
            let num = &z_poly * &Poly::monomial(k, k.one(), e as usize);
            Ok(model.from_ratfunc(RatFunc::new(num, e_poly.clone())?))
        })
        .collect()
}

/// The least divisor `D` with `S ⊆ L(D)`.
pub fn minimal_divisor(s: &KSubspace) -> Result<Divisor> {
    let model = s.model();
    let k = model.field();
    if s.is_zero() {
        return Err(Error::Precondition("minimal divisor of the zero subspace".into()));
    }
    let inf = places::infinity(model);
    let max_pole = |p: &PlaceId| -> Result<i64> {
        let mut best = i64::MIN;
        for u in s.basis() {
            best = best.max(-places::valuation(model, u, p)?);
        }
        Ok(best)
    };
    let mut entries = vec![(inf.clone(), max_pole(&inf)?)];
    if model.is_rational() {
        let den = s.common_den();
        let num_gcd = s.basis().iter().fold(Poly::zero(k), |acc, u| {
            let r = &u.coords()[0];
            Poly::gcd(&acc, &(r.num() * &den.div_exact(r.den()).unwrap()))
        });
        let mut cands = vec![];
        for (what, p) in [("pole", den), ("common zero", &num_gcd)] {
            match p.split_roots()? {
                Some(roots) => cands.extend(roots.into_iter().map(|(a, _)| a)),
                None => {
                    return Err(Error::Pole(format!(
                        "{what} locus {p} has places of degree > 1 over {k}"
                    )))
                }
            }
        }
        for a in cands {
            let p = PlaceId::Finite0(a);
            let m = max_pole(&p)?;
            entries.push((p, m));
        }
    } else {
        if let Some(u) = s.basis().iter().find(|u| !u.is_poly()) {
            return Err(Error::Pole(format!(
                "{} has poles away from P_inf (hyperelliptic minimal divisors need polynomial coordinates)",
                model.display(u)
            )));
        }
        let norm_gcd = s.basis().iter().fold(Poly::zero(k), |acc, u| Poly::gcd(&acc, model.norm(u).num()));
        if !norm_gcd.is_constant() {
            return Err(Error::Unsupported("subspace with common finite zeros on a hyperelliptic model".into()));
        }
    }
    Ok(Divisor::new(k, entries))
}

/// One row of the dimension table for `L(n P_inf)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RRRow {
    pub n: i64,
    pub dim: usize,
    /// `"riemann-roch"` (`n >= 2g-1`, equality) or `"clifford"` (bound).
    pub rule: &'static str,
    pub expected: i64,
    pub ok: bool,
}

pub fn rr_dim_identities(model: &CurveModel, ns: impl IntoIterator<Item = i64>) -> Result<Vec<RRRow>> {
    let g = model.genus() as i64;
    let inf = places::infinity(model);
    ns.into_iter()
        .map(|n| {
            let dim = rr_basis(model, &Divisor::single(inf.clone(), n))?.dim;
            Ok(if n >= 2 * g - 1 {
                let expected = (n + 1 - g).max(0);
                RRRow { n, dim, rule: "riemann-roch", expected, ok: dim as i64 == expected }
            } else {
                let bound = 1 + n.div_euclid(2);
                RRRow { n, dim, rule: "clifford", expected: bound, ok: (dim as i64) <= bound }
            })
        })
        .collect()
}
