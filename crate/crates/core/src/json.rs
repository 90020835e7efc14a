//! JSON encodings of fields, scalars, polynomials, elements, subspaces,
//! divisors and instance files.
//!
//! Decoding is strict about structure but accepts a string expression (see
//! [`crate::parse`]) wherever a polynomial, rational function or element is
//! expected.

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::field::{parse_rational, BaseField, Scalar};
use crate::model::{CurveModel, FFElem, ModelKind};
use crate::parse::parse_elem;
use crate::places::PlaceId;
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::riemann_roch::Divisor;
use crate::subspace::KSubspace;

pub const REPORT_VERSION: u32 = 1;

fn bad(what: &str, v: &Value) -> Error {
    Error::Parse(format!("expected {what}, found {v}"))
}

pub fn field_to_json(k: BaseField) -> Value {
    match k.modulus() {
        _ if !k.is_finite() => json!({ "char": 0 }),
        Some(md) if k.ext_degree() > 1 => json!({ "char": k.characteristic(), "ext": k.ext_degree(), "modulus": md }),
        _ => json!({ "char": k.characteristic(), "ext": 1 }),
    }
}

pub fn field_from_json(v: &Value) -> Result<BaseField> {
    let o = v.as_object().ok_or_else(|| bad("field object", v))?;
    let p = o.get("char").and_then(Value::as_u64).ok_or_else(|| bad("\"char\"", v))?;
    let m = match o.get("ext") {
        None => 1,
        Some(e) => e.as_u64().ok_or_else(|| bad("integer \"ext\"", e))? as usize,
    };
    if p == 0 {
        if m != 1 {
            return Err(Error::Config("Q has no extensions here".into()));
        }
        return Ok(BaseField::rationals());
    }
    let p = u32::try_from(p).map_err(|_| Error::Limit(format!("characteristic {p}")))?;
    let k = BaseField::finite(p, m)?;
    if let Some(md) = o.get("modulus") {
        if *md != json!(k.modulus().unwrap_or(&[])) {
            return Err(Error::Config(format!("modulus {md} differs from the canonical one for {k}")));
        }
    }
    Ok(k)
}

pub fn scalar_to_json(k: BaseField, s: &Scalar) -> Value {
    if k.is_finite() {
        json!(k.coefficients(s))
    } else {
        json!(k.display(s))
    }
}

pub fn scalar_from_json(k: BaseField, v: &Value) -> Result<Scalar> {
    match v {
        Value::Number(n) => {
            let i = n.as_i64().ok_or_else(|| bad("integer scalar", v))?;
            Ok(k.from_i64(i))
        }
        Value::String(s) if !k.is_finite() => {
            let q = parse_rational(s)?;
            Ok(k.from_ratio(q.numer(), q.denom()).unwrap())
        }
        Value::String(s) => {
            let n: BigInt = s.trim().parse().map_err(|_| bad("integer string", v))?;
            Ok(k.from_ratio(&n, &BigInt::from(1)).unwrap())
        }
        Value::Array(cs) if k.is_finite() => {
            let cs = cs
                .iter()
                .map(|c| c.as_u64().and_then(|c| u32::try_from(c).ok()).ok_or_else(|| bad("coefficient", c)))
                .collect::<Result<Vec<_>>>()?;
            k.from_coefficients(&cs)
        }
        _ => Err(bad("scalar", v)),
    }
}

pub fn poly_to_json(p: &Poly) -> Value {
    Value::Array(p.coeffs().iter().map(|c| scalar_to_json(p.field(), c)).collect())
}

pub fn poly_from_json(k: BaseField, v: &Value) -> Result<Poly> {
    match v {
        Value::Array(cs) => Ok(Poly::new(k, cs.iter().map(|c| scalar_from_json(k, c)).collect::<Result<_>>()?)),
        Value::String(s) => {
            let r = ratfunc_from_expr(k, s)?;
            if !r.is_poly() {
                return Err(Error::Parse(format!("{s:?} is not a polynomial")));
            }
            Ok(r.num().clone())
        }
        _ => Err(bad("polynomial", v)),
    }
}

fn ratfunc_from_expr(k: BaseField, s: &str) -> Result<RatFunc> {
    Ok(parse_elem(&CurveModel::rational(k), s)?.coords()[0].clone())
}

pub fn ratfunc_to_json(r: &RatFunc) -> Value {
    json!({ "num": poly_to_json(r.num()), "den": poly_to_json(r.den()) })
}

pub fn ratfunc_from_json(k: BaseField, v: &Value) -> Result<RatFunc> {
    match v {
        Value::Object(o) => {
            let num = poly_from_json(k, o.get("num").ok_or_else(|| bad("\"num\"", v))?)?;
            let den = match o.get("den") {
                Some(d) => poly_from_json(k, d)?,
                None => Poly::one(k),
            };
            RatFunc::new(num, den)
        }
        Value::String(s) => ratfunc_from_expr(k, s),
        _ => Err(bad("rational function", v)),
    }
}

pub fn model_to_json(m: &CurveModel) -> Value {
    match m.kind() {
        ModelKind::Rational => json!({ "kind": "rational", "field": field_to_json(m.field()) }),
        ModelKind::Hyperelliptic { f } => {
            json!({ "kind": "hyperelliptic", "field": field_to_json(m.field()), "f": poly_to_json(f) })
        }
    }
}

pub fn model_from_json(v: &Value) -> Result<CurveModel> {
    let o = v.as_object().ok_or_else(|| bad("model object", v))?;
    let k = field_from_json(o.get("field").ok_or_else(|| bad("\"field\"", v))?)?;
    match o.get("kind").and_then(Value::as_str) {
        Some("rational") => Ok(CurveModel::rational(k)),
        Some("hyperelliptic") => {
            let f = poly_from_json(k, o.get("f").ok_or_else(|| bad("\"f\"", v))?)?;
            CurveModel::hyperelliptic(k, f)
        }
        _ => Err(bad("\"kind\": \"rational\" | \"hyperelliptic\"", v)),
    }
}

pub fn elem_to_json(u: &FFElem) -> Value {
    Value::Array(u.coords().iter().map(ratfunc_to_json).collect())
}

pub fn elem_from_json(m: &CurveModel, v: &Value) -> Result<FFElem> {
    match v {
        Value::Array(cs) => {
            if cs.len() != m.n() {
                return Err(Error::Parse(format!("element has {} coordinates, model needs {}", cs.len(), m.n())));
            }
            m.elem(cs.iter().map(|c| ratfunc_from_json(m.field(), c)).collect::<Result<_>>()?)
        }
        Value::String(s) => parse_elem(m, s),
        _ => Err(bad("element", v)),
    }
}

pub fn subspace_to_json(s: &KSubspace) -> Value {
    json!({
        "model": model_to_json(s.model()),
        "basis": s.basis().iter().map(elem_to_json).collect::<Vec<_>>(),
    })
}

pub fn subspace_from_json(v: &Value) -> Result<KSubspace> {
    let o = v.as_object().ok_or_else(|| bad("subspace object", v))?;
    let m = model_from_json(o.get("model").ok_or_else(|| bad("\"model\"", v))?)?;
    let b = o.get("basis").and_then(Value::as_array).ok_or_else(|| bad("\"basis\" list", v))?;
    let gens = b.iter().map(|u| elem_from_json(&m, u)).collect::<Result<Vec<_>>>()?;
    Ok(KSubspace::span(&m, &gens))
}

pub fn place_to_json(k: BaseField, p: &PlaceId) -> Value {
    match p {
        PlaceId::InfinityHyp => json!({ "kind": "infinity_hyp" }),
        PlaceId::Infinity0 => json!({ "kind": "infinity" }),
        PlaceId::Finite0(a) => json!({ "kind": "finite", "a": scalar_to_json(k, a) }),
        PlaceId::Point(a, b) => json!({ "kind": "point", "a": scalar_to_json(k, a), "b": scalar_to_json(k, b) }),
    }
}

pub fn place_from_json(k: BaseField, v: &Value) -> Result<PlaceId> {
    let o = v.as_object().ok_or_else(|| bad("place object", v))?;
    let get = |f: &str| o.get(f).ok_or_else(|| bad(&format!("\"{f}\""), v)).and_then(|x| scalar_from_json(k, x));
    match o.get("kind").and_then(Value::as_str) {
        Some("infinity_hyp") => Ok(PlaceId::InfinityHyp),
        Some("infinity") => Ok(PlaceId::Infinity0),
        Some("finite") => Ok(PlaceId::Finite0(get("a")?)),
        Some("point") => Ok(PlaceId::Point(get("a")?, get("b")?)),
        _ => Err(bad("place kind", v)),
    }
}

pub fn divisor_to_json(k: BaseField, d: &Divisor) -> Value {
    Value::Array(
        d.entries().iter().map(|(p, m)| json!({ "place": place_to_json(k, p), "mult": m })).collect(),
    )
}

pub fn divisor_from_json(k: BaseField, v: &Value) -> Result<Divisor> {
    let a = v.as_array().ok_or_else(|| bad("divisor list", v))?;
    let entries = a
        .iter()
        .map(|e| {
            let p = place_from_json(k, e.get("place").ok_or_else(|| bad("\"place\"", e))?)?;
            let m = e.get("mult").and_then(Value::as_i64).ok_or_else(|| bad("integer \"mult\"", e))?;
            Ok((p, m))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Divisor::new(k, entries))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceOptions {
    pub normalize: bool,
    pub assert: bool,
}

impl Default for InstanceOptions {
    fn default() -> Self {
        InstanceOptions { normalize: true, assert: true }
    }
}

/// A subspace to analyse together with run options.
#[derive(Clone, Debug)]
pub struct Instance {
    pub model: CurveModel,
    pub subspace: Vec<FFElem>,
    pub options: InstanceOptions,
}

impl Instance {
    pub fn new(s: &KSubspace, options: InstanceOptions) -> Self {
        Instance { model: s.model().clone(), subspace: s.basis().to_vec(), options }
    }

    pub fn span(&self) -> KSubspace {
        KSubspace::span(&self.model, &self.subspace)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "model": model_to_json(&self.model),
            "subspace": self.subspace.iter().map(elem_to_json).collect::<Vec<_>>(),
            "options": { "normalize": self.options.normalize, "assert": self.options.assert },
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let o = v.as_object().ok_or_else(|| bad("instance object", v))?;
        if let Some(ver) = o.get("report_version") {
            if ver.as_u64() != Some(REPORT_VERSION as u64) {
                return Err(Error::Parse(format!("unsupported report_version {ver}")));
            }
        }
        let model = model_from_json(o.get("model").ok_or_else(|| bad("\"model\"", v))?)?;
        let basis = o.get("subspace").and_then(Value::as_array).ok_or_else(|| bad("\"subspace\" list", v))?;
        let subspace = basis.iter().map(|u| elem_from_json(&model, u)).collect::<Result<Vec<_>>>()?;
        let mut options = InstanceOptions::default();
        if let Some(op) = o.get("options") {
            let op = op.as_object().ok_or_else(|| bad("options object", op))?;
            for (key, val) in op {
                let b = val.as_bool().ok_or_else(|| bad("boolean option", val))?;
                match key.as_str() {
                    "normalize" => options.normalize = b,
                    "assert" => options.assert = b,
                    _ => return Err(Error::Parse(format!("unknown option {key:?}"))),
                }
            }
        }
        Ok(Instance { model, subspace, options })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
        Self::from_json(&v)
    }
}

/// Wrap a report body with the schema version and optional instance echo.
pub fn envelope(kind: &str, body: Value, instance: Option<&Instance>) -> Value {
    let mut o = Map::new();
    o.insert("report_version".into(), json!(REPORT_VERSION));
    o.insert("report".into(), json!(kind));
    if let Some(i) = instance {
        o.insert("instance".into(), i.to_json());
    }
    match body {
        Value::Object(b) => o.extend(b),
        other => {
            o.insert("result".into(), other);
        }
    }
    Value::Object(o)
}
