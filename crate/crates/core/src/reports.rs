//! Report documents shared by the command line and the browser demo.

use serde_json::{json, Value};

use crate::additive::{kneser_mod, monomial_bridge, IntSet};
use crate::error::{Error, Result};
use crate::field::BaseField;
use crate::json::model_to_json;
use crate::model::CurveModel;
use crate::parse::parse_elem;
use crate::places::infinity;
use crate::riemann_roch::{rr_basis, rr_dim_identities, Divisor};

/// `Q` for characteristic 0, otherwise the prime field.
pub fn base_field(p: u32) -> Result<BaseField> {
    if p == 0 {
        Ok(BaseField::rationals())
    } else {
        BaseField::prime(p)
    }
}

/// Bridge report for a comma-separated integer set; the input normalization is echoed.
pub fn bridge_report(set: &str, p: u32) -> Result<Value> {
    let (a, norm) = IntSet::parse(set)?;
    let r = monomial_bridge(&a, base_field(p)?, true)?;
    let mut body = r.to_json();
    body["input"] = json!(set);
    body["normalization"] = json!({ "shift": norm.shift, "scale": norm.scale });
    Ok(body)
}

/// `y^2 = x^(2g+1) + x + 1`, or the first nonsingular variant of the linear tail.
pub fn default_curve(k: BaseField, g: usize) -> Result<CurveModel> {
    if g == 0 {
        return Ok(CurveModel::rational(k));
    }
    let rat = CurveModel::rational(k);
    for tail in ["x + 1", "x + 2", "2*x + 1", "x + 3"] {
        let f = parse_elem(&rat, &format!("x^{} + {tail}", 2 * g + 1))?.coords()[0].num().clone();
        if let Ok(m) = CurveModel::hyperelliptic(k, f) {
            return Ok(m);
        }
    }
    Err(Error::Config(format!("no default genus-{g} curve over {k}; give the curve explicitly")))
}

/// The model for `rr`: an explicit `f` wins; otherwise the default curve of genus `g <= 2`.
pub fn rr_model(genus: usize, p: u32, curve: Option<&str>) -> Result<CurveModel> {
    let k = base_field(p)?;
    match curve.map(str::trim).filter(|c| !c.is_empty()) {
        Some(c) => {
            let f = parse_elem(&CurveModel::rational(k), c)?;
            if !f.is_poly() {
                return Err(Error::Parse(format!("curve {c:?} is not a polynomial")));
            }
            let m = CurveModel::hyperelliptic(k, f.coords()[0].num().clone())?;
            if genus != 0 && m.genus() != genus {
                return Err(Error::Config(format!("curve has genus {}, requested genus {genus}", m.genus())));
            }
            Ok(m)
        }
        None if genus <= 2 => default_curve(k, genus),
        None => Err(Error::Config(format!("genus {genus} needs an explicit curve"))),
    }
}

/// Basis of `L(n P_inf)` and the dimension table for `0..=n`.
pub fn rr_report(m: &CurveModel, n: i64) -> Result<Value> {
    let l = rr_basis(m, &Divisor::single(infinity(m), n))?;
    let table = rr_dim_identities(m, 0..=n.max(0))?;
    Ok(json!({
        "model": model_to_json(m),
        "genus": m.genus(),
        "n": n,
        "basis": l.basis.iter().map(|u| m.display(u)).collect::<Vec<_>>(),
        "dim": l.dim,
        "table": table.iter().map(|r| json!({
            "n": r.n, "dim": r.dim, "rule": r.rule, "expected": r.expected, "ok": r.ok,
        })).collect::<Vec<_>>(),
    }))
}

/// Kneser report for a comma-separated set of integers, reduced mod `n`.
pub fn kneser_mod_report(set: &str, n: u64) -> Result<Value> {
    if n == 0 {
        return Err(Error::Parse("modulus must be positive".into()));
    }
    let elems = set
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| Error::Parse(format!("set element {t:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    let n_signed = i64::try_from(n).map_err(|_| Error::Limit(format!("modulus {n}")))?;
    let a = IntSet::new(elems.iter().map(|x| x.rem_euclid(n_signed) as u64));
    Ok(kneser_mod(&a, n)?.to_json())
}
