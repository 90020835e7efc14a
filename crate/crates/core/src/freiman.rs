//! The 3k-4 verification pipeline and the intermediate constructions:
//! combinatorial genus, filtered bases, pivot selection, stabilizer analysis,
//! evaluation at a split fibre, and the `A ⊕ B ⊕ C` iteration.

use std::sync::Arc;

use num_integer::Integer;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::linalg;
use crate::model::{CurveModel, FFElem, Frame};
use crate::places::{self, PlaceId};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;
use crate::riemann_roch::{self, Divisor};
use crate::subspace::{mixed_intersect, FieldChecks, KSubspace, KxSubspace};

/// `γ = dim S² − 2 dim S + 1`.
pub fn combinatorial_genus(s: &KSubspace) -> Result<i64> {
    if s.is_zero() {
        return Err(Error::Precondition("combinatorial genus of the zero subspace".into()));
    }
    Ok(s.square().dim() as i64 - 2 * s.dim() as i64 + 1)
}

/// Basis with strictly decreasing valuation at `q`, each element scaled to
/// local leading coefficient 1, paired with its valuation. When `1 ∈ S` it is
/// kept as the valuation-0 element.
pub fn filtered_with_valuations(s: &KSubspace, q: &PlaceId) -> Result<Vec<(i64, FFElem)>> {
    let m = s.model();
    let k = m.field();
    let mut gens = vec![];
    if s.contains(&m.one()) {
        gens.push(m.one());
    }
    gens.extend(s.basis().iter().cloned());
    let mut done: Vec<(i64, FFElem)> = vec![];
    for u in gens {
        let mut u = u;
        while !u.is_zero() {
            let (v, lc) = places::leading(m, &u, q)?;
            match done.iter().find(|e| e.0 == v) {
                Some((_, b)) => u = m.sub(&u, &m.scale(b, &lc)),
                None => {
                    done.push((v, m.scale(&u, &k.inv(&lc).unwrap())));
                    break;
                }
            }
        }
    }
    if done.len() != s.dim() {
        return Err(Error::Assertion("filtered basis has the wrong length".into()));
    }
    done.sort_by_key(|e| std::cmp::Reverse(e.0));
    Ok(done)
}

pub fn filtered_basis(s: &KSubspace, q: &PlaceId) -> Result<Vec<FFElem>> {
    Ok(filtered_with_valuations(s, q)?.into_iter().map(|e| e.1).collect())
}

/// `S` itself when `1 ∈ S`, otherwise `f0⁻¹ S` with `f0` the element of
/// largest valuation at the model's infinity.
pub fn normalize_translate(s: &KSubspace) -> Result<KSubspace> {
    let m = s.model();
    if s.is_zero() {
        return Err(Error::Precondition("cannot normalize the zero subspace".into()));
    }
    if s.contains(&m.one()) {
        return Ok(s.clone());
    }
    let f0 = &filtered_with_valuations(s, &places::infinity(m))?[0].1;
    Ok(s.translate(&m.inv(f0)?))
}

/// A pivot `w ∈ S` whose pole divisor is the minimal divisor of `S`.
#[derive(Clone, Debug)]
pub struct PivotChoice {
    pub w: FFElem,
    pub divisor: Divisor,
    /// The place used for the filtered basis.
    pub q_inf: PlaceId,
    /// `N = −v_{Q∞}(w)`.
    pub n_pole: i64,
    /// Filtered basis at `Q∞`, ending in `w`.
    pub filtered: Vec<FFElem>,
    pub valuations: Vec<i64>,
    /// Scalars used to repair deficient places, in order.
    pub lambdas: Vec<Scalar>,
    /// `(w)_∞ = D`, checked place by place.
    pub pole_divisor_ok: bool,
}

impl PivotChoice {
    pub fn to_json(&self, m: &CurveModel) -> Value {
        let k = m.field();
        json!({
            "w": m.display(&self.w),
            "D": self.divisor.display(k),
            "q_inf": self.q_inf.display(k),
            "N": self.n_pole,
            "filtered": self.filtered.iter().map(|u| m.display(u)).collect::<Vec<_>>(),
            "valuations": self.valuations,
            "lambdas": self.lambdas.iter().map(|l| k.display(l)).collect::<Vec<_>>(),
            "pole_divisor_ok": self.pole_divisor_ok,
        })
    }
}

fn nonzero_scalars(k: crate::field::BaseField) -> impl Iterator<Item = Scalar> {
    places::scan_scalars(k).filter(move |a| !k.is_zero(a))
}

fn pole_order(m: &CurveModel, u: &FFElem, p: &PlaceId) -> Result<i64> {
    Ok(-places::valuation(m, u, p)?)
}

pub fn select_pivot(s: &KSubspace) -> Result<PivotChoice> {
    let m = s.model();
    let k = m.field();
    if !s.contains(&m.one()) {
        return Err(Error::Precondition("pivot selection needs 1 ∈ S (normalize first)".into()));
    }
    if s.dim() < 2 {
        return Err(Error::Precondition("pivot selection needs dim S ≥ 2".into()));
    }
    let d = riemann_roch::minimal_divisor(s)?;
    let inf = places::infinity(m);
    let mut order: Vec<PlaceId> = d.poles().map(|(p, _)| p.clone()).collect();
    if let Some(i) = order.iter().position(|p| *p == inf) {
        let p = order.remove(i);
        order.insert(0, p);
    }
    // Prefer a place where S has no zeros, so the filtered basis starts at 1.
    let mut chosen = None;
    for p in &order {
        let fb = filtered_with_valuations(s, p)?;
        if fb[0].0 == 0 {
            chosen = Some((p.clone(), fb));
            break;
        }
    }
    let (q, fb) = match chosen {
        Some(c) => c,
        None => (order[0].clone(), filtered_with_valuations(s, &order[0])?),
    };
    let n_pole = d.mult(&q);
    let mut w = fb.last().unwrap().1.clone();
    let mut fixed = vec![q.clone()];
    let mut lambdas = vec![];
    let agrees = |c: &FFElem, fixed: &[PlaceId]| -> Result<bool> {
        if c.is_zero() {
            return Ok(false);
        }
        for f in fixed {
            if pole_order(m, c, f)? != d.mult(f) {
                return Ok(false);
            }
        }
        Ok(true)
    };
    for p in order.iter().filter(|p| **p != q) {
        if pole_order(m, &w, p)? != d.mult(p) {
            let sp = filtered_with_valuations(s, p)?.pop().unwrap().1;
            let mut found = None;
            let mut with_p = fixed.clone();
            with_p.push(p.clone());
            for lam in nonzero_scalars(k) {
                let c = m.add(&w, &m.scale(&sp, &lam));
                if agrees(&c, &with_p)? {
                    found = Some((c, lam));
                    break;
                }
            }
            let (c, lam) = found.ok_or_else(|| {
                Error::Exhausted(format!("no λ realizes the pole order at {} over {k}", p.display(k)))
            })?;
            w = c;
            lambdas.push(lam);
        }
        fixed.push(p.clone());
    }
    // Hyperelliptic pivots need a y-part to coordinatize over K(w).
    if !m.is_rational() && w.coords()[1].is_zero() {
        if let Some(sy) = s.basis().iter().find(|u| !u.coords()[1].is_zero()) {
            let mut found = None;
            for lam in nonzero_scalars(k) {
                let c = m.add(&w, &m.scale(sy, &lam));
                if agrees(&c, &fixed)? {
                    found = Some((c, lam));
                    break;
                }
            }
            let (c, lam) = found.ok_or_else(|| Error::Exhausted(format!("no λ keeps v(w) = -{n_pole} over {k}")))?;
            w = c;
            lambdas.push(lam);
        }
    }
    let mut filtered: Vec<FFElem> = fb.iter().map(|e| e.1.clone()).collect();
    let valuations: Vec<i64> = fb.iter().map(|e| e.0).collect();
    *filtered.last_mut().unwrap() = w.clone();
    let mut pole_divisor_ok = agrees(&w, &order)?;
    if !order.contains(&inf) {
        pole_divisor_ok &= places::valuation(m, &w, &inf)? >= 0;
    }
    Ok(PivotChoice { w, divisor: d, q_inf: q, n_pole, filtered, valuations, lambdas, pole_divisor_ok })
}

fn frame_degree(m: &CurveModel, u: &FFElem) -> i64 {
    if m.is_rational() {
        let r = &u.coords()[0];
        r.num().deg().max(r.den().deg())
    } else {
        -places::valuation(m, u, &places::infinity(m)).unwrap_or(0)
    }
}

/// `K(t)[S]` in the given frame, as the limit of `V_{i+1} = V_i (K + S)`.
fn generated_algebra(frame: &Arc<Frame>, s: &KSubspace) -> Result<KxSubspace> {
    let m = s.model();
    let mut gens = vec![m.one()];
    gens.extend(s.basis().iter().cloned());
    let g = KxSubspace::span_elems(frame.clone(), &gens)?;
    let mut v = KxSubspace::base(frame.clone());
    loop {
        let nv = v.product(&g)?;
        if nv.dim() == v.dim() {
            return Ok(v);
        }
        v = nv;
    }
}

/// Whether `K(S) = F`.
pub fn generates_field(s: &KSubspace) -> Result<bool> {
    let m = s.model();
    let cands: Vec<&FFElem> = s
        .basis()
        .iter()
        .filter(|u| !u.is_constant() && (m.is_rational() || !u.coords()[1].is_zero()))
        .collect();
    if cands.is_empty() {
        return Ok(false);
    }
    let w = if m.is_rational() {
        cands.into_iter().min_by_key(|u| frame_degree(m, u)).unwrap()
    } else {
        cands
            .into_iter()
            .filter(|u| u.is_poly())
            .min_by_key(|u| frame_degree(m, u))
            .ok_or_else(|| Error::Unsupported("field generation test needs a polynomial element with a y-part".into()))?
    };
    let frame = Arc::new(m.pivot_frame(w)?);
    Ok(generated_algebra(&frame, s)?.is_full())
}

#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyOptions {
    /// Translate so that `1 ∈ S` first.
    pub normalize: bool,
    /// Turn a violated conclusion into an [`Error::Assertion`].
    pub assert: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// Hypotheses not met; values are reported only.
    NotApplicable,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not-applicable",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TheoremReport {
    pub s: KSubspace,
    pub normalized: bool,
    pub k: usize,
    pub gamma: i64,
    pub hypothesis_met: bool,
    pub g: usize,
    pub divisor: Divisor,
    pub rr_dim: usize,
    pub codim: i64,
    pub genus_ok: bool,
    pub codim_ok: bool,
    pub generates_field: bool,
    pub verdict: Verdict,
}

impl TheoremReport {
    pub fn to_json(&self) -> Value {
        let k = self.s.model().field();
        json!({
            "S": self.s.display(),
            "normalized": self.normalized,
            "k": self.k,
            "gamma": self.gamma,
            "hypothesis_met": self.hypothesis_met,
            "g": self.g,
            "D": self.divisor.display(k),
            "deg_D": self.divisor.degree(),
            "rr_dim": self.rr_dim,
            "codim": self.codim,
            "genus_ok": self.genus_ok,
            "codim_ok": self.codim_ok,
            "generates_field": self.generates_field,
            "verdict": self.verdict.as_str(),
        })
    }
}

fn hypothesis(k: usize, gamma: i64) -> bool {
    k >= 3 && gamma <= k as i64 - 3
}

pub fn verify_theorem(s: &KSubspace, opts: VerifyOptions) -> Result<TheoremReport> {
    let m = s.model();
    let original = s;
    let s = if opts.normalize { normalize_translate(s)? } else { s.clone() };
    if !s.contains(&m.one()) {
        return Err(Error::Precondition("1 ∉ S; enable normalization".into()));
    }
    let k = s.dim();
    let gamma = combinatorial_genus(&s)?;
    let hypothesis_met = hypothesis(k, gamma);
    let g = m.genus();
    let divisor = riemann_roch::minimal_divisor(&s)?;
    let rr = riemann_roch::rr_basis(m, &divisor)?;
    if !s.is_subspace_of(&rr.space(m)) {
        return Err(Error::Assertion(format!("S ⊄ L({})", divisor.display(m.field()))));
    }
    let codim = rr.dim as i64 - k as i64;
    let genus_ok = g as i64 <= gamma;
    let codim_ok = codim <= gamma - g as i64;
    let generates_field = generates_field(&s)?;
    let verdict = match (hypothesis_met && generates_field, genus_ok && codim_ok) {
        (false, _) => Verdict::NotApplicable,
        (true, true) => Verdict::Pass,
        (true, false) => Verdict::Fail,
    };
    if opts.assert && verdict == Verdict::Fail {
        return Err(Error::Assertion(format!(
            "theorem fails for S = {:?}: g = {g}, γ = {gamma}, codim = {codim}",
            s.display()
        )));
    }
    Ok(TheoremReport {
        normalized: &s != original,
        s,
        k,
        gamma,
        hypothesis_met,
        g,
        divisor,
        rr_dim: rr.dim,
        codim,
        genus_ok,
        codim_ok,
        generates_field,
        verdict,
    })
}

#[derive(Clone, Debug)]
pub struct StabilizerReport {
    pub frame: Arc<Frame>,
    pub k: usize,
    pub gamma: i64,
    pub hypothesis_met: bool,
    pub generates_field: bool,
    /// `[F : K(w)]`.
    pub n: usize,
    pub v: KxSubspace,
    pub v2: KxSubspace,
    pub l: KxSubspace,
    pub ls: KxSubspace,
    pub ell: i64,
    pub kappa: i64,
    pub tau: i64,
    pub field_checks: FieldChecks,
    pub kxs_dim_ok: bool,
    pub kneser_ok: bool,
    pub tau_identity_ok: bool,
    pub lemma_bound_ok: bool,
    pub l_is_full: bool,
    /// `v_{Q∞}(L^×) = dZ`.
    pub d: i64,
    /// False when `d` is only an upper bound from finitely many elements.
    pub d_exact: bool,
    pub ls_basis: Vec<FFElem>,
    pub ls_basis_ok: bool,
}

impl StabilizerReport {
    pub fn to_json(&self) -> Result<Value> {
        let m = self.frame.model();
        Ok(json!({
            "coordinate": self.frame.describe(),
            "n": self.n,
            "k": self.k,
            "gamma": self.gamma,
            "hypothesis_met": self.hypothesis_met,
            "generates_field": self.generates_field,
            "dim_KwS": self.v.dim(),
            "dim_KwS2": self.v2.dim(),
            "dim_LS": self.ls.dim(),
            "ell": self.ell,
            "kappa": self.kappa,
            "tau": self.tau,
            "L_basis": self.l.display()?,
            "field_checks": {
                "contains_one": self.field_checks.contains_one,
                "closed": self.field_checks.closed,
                "stabilizes": self.field_checks.stabilizes,
            },
            "kxs_dim_ok": self.kxs_dim_ok,
            "kneser_ok": self.kneser_ok,
            "tau_identity_ok": self.tau_identity_ok,
            "lemma_bound_ok": self.lemma_bound_ok,
            "L_is_F": self.l_is_full,
            "d": self.d,
            "d_exact": self.d_exact,
            "LS_basis": self.ls_basis.iter().map(|u| m.display(u)).collect::<Vec<_>>(),
            "LS_basis_ok": self.ls_basis_ok,
        }))
    }
}

/// Upper bound for `d` from the valuations of finitely many elements of `L`,
/// refined by cancelling leading terms against powers of `w`.
fn valuation_gcd(m: &CurveModel, l: &KxSubspace, w: &FFElem, q: &PlaceId, n: i64) -> Result<i64> {
    let k = m.field();
    let mut elems: Vec<(i64, Scalar, FFElem)> = vec![];
    for u in l.basis_elems()? {
        let (v, lc) = places::leading(m, &u, q)?;
        elems.push((v, lc, u));
    }
    let mut d = elems.iter().fold(n, |acc, e| acc.gcd(&e.0));
    for _ in 0..4 * elems.len() + 8 {
        let pair = (0..elems.len())
            .flat_map(|i| (i + 1..elems.len()).map(move |j| (i, j)))
            .find(|&(i, j)| (elems[i].0 - elems[j].0).rem_euclid(n) == 0);
        let Some((i, j)) = pair else { break };
        let e = (elems[j].0 - elems[i].0) / n;
        let shifted = m.mul(&m.pow(w, e)?, &elems[j].2);
        let (_, lc) = places::leading(m, &shifted, q)?;
        let c = m.sub(&elems[i].2, &m.scale(&shifted, &k.div(&elems[i].1, &lc).unwrap()));
        if c.is_zero() {
            break;
        }
        let (v, lc) = places::leading(m, &c, q)?;
        d = d.gcd(&v);
        elems[i] = (v, lc, c);
    }
    Ok(d)
}

pub fn stabilizer_report(s: &KSubspace, pivot: &PivotChoice, assert: bool) -> Result<StabilizerReport> {
    let m = s.model();
    let frame = Arc::new(m.pivot_frame(&pivot.w)?);
    let k = s.dim();
    let gamma = combinatorial_genus(s)?;
    let hypothesis_met = hypothesis(k, gamma);
    let generates_field = generated_algebra(&frame, s)?.is_full();
    let n = frame.n();
    let v = KxSubspace::span(frame.clone(), s)?;
    let v2 = v.product(&v)?;
    let l = v2.stabilizer_unchecked()?;
    let field_checks = l.field_checks(&v2)?;
    let ls = l.product(&v)?;
    let ell = l.dim() as i64;
    let kappa = ls.dim() as i64 / ell;
    let tau = kappa * ell - k as i64 + 1;
    let kxs_dim_ok = v.dim() + 1 == k;
    let kneser_ok = v2.dim() + l.dim() >= 2 * v.dim();
    let tau_identity_ok = ls.dim() as i64 % ell == 0 && tau == ls.dim() as i64 - v.dim() as i64;
    let lemma_bound_ok = (2 * kappa - 1) * ell <= 2 * k as i64 - 4;
    let l_is_full = l.is_full();
    let single_pole = pivot.divisor.poles().count() == 1;
    let (d, d_exact) = if single_pole && pivot.n_pole % ell == 0 {
        (pivot.n_pole / ell, true)
    } else {
        (valuation_gcd(m, &l, &pivot.w, &pivot.q_inf, pivot.n_pole)?, false)
    };
    // Max-valuation representative of each class mod d, by decreasing valuation.
    let mut ls_basis: Vec<FFElem> = vec![];
    let mut seen: Vec<i64> = vec![];
    for (v, u) in pivot.valuations.iter().zip(&pivot.filtered) {
        let c = v.rem_euclid(d);
        if !seen.contains(&c) {
            seen.push(c);
            ls_basis.push(u.clone());
        }
    }
    ls_basis.truncate(kappa as usize);
    let ls_basis_ok = ls_basis.len() == kappa as usize
        && l.product(&KxSubspace::span_elems(frame.clone(), &ls_basis)?)? == ls;
    if assert {
        let mut failures = vec![];
        if !field_checks.all() {
            failures.push(format!("stabilizer field checks {field_checks:?}"));
        }
        if !kxs_dim_ok {
            failures.push(format!("dim K(w)S = {} ≠ k − 1", v.dim()));
        }
        if !kneser_ok {
            failures.push("Kneser inequality".into());
        }
        if !tau_identity_ok {
            failures.push("τ identity".into());
        }
        if hypothesis_met && !lemma_bound_ok {
            failures.push("(2κ−1)ℓ ≤ 2k−4".into());
        }
        if hypothesis_met && generates_field && !l_is_full {
            failures.push("L ≠ F under the hypotheses".into());
        }
        if !failures.is_empty() {
            return Err(Error::Assertion(failures.join("; ")));
        }
    }
    Ok(StabilizerReport {
        frame,
        k,
        gamma,
        hypothesis_met,
        generates_field,
        n,
        v,
        v2,
        l,
        ls,
        ell,
        kappa,
        tau,
        field_checks,
        kxs_dim_ok,
        kneser_ok,
        tau_identity_ok,
        lemma_bound_ok,
        l_is_full,
        d,
        d_exact,
        ls_basis,
        ls_basis_ok,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibrePoint {
    pub x: Scalar,
    /// `y`-coordinate on hyperelliptic models.
    pub y: Option<Scalar>,
}

#[derive(Clone, Debug)]
pub struct EvaluationReport {
    /// The fibre is `w = a`.
    pub fibre_a: Scalar,
    pub points: Vec<FibrePoint>,
    pub blocks: Vec<Vec<usize>>,
    pub s0: KSubspace,
    pub sl: KSubspace,
    pub containment_ok: bool,
    pub equality: bool,
    pub blocks_ok: bool,
    pub dim_bound: i64,
    pub dim_bound_ok: bool,
    /// Kernel of evaluation on `L(D)`.
    pub kernel: Vec<FFElem>,
    pub kernel_ok: bool,
    pub standing_hypotheses: bool,
}

impl EvaluationReport {
    pub fn to_json(&self, m: &CurveModel) -> Value {
        let k = m.field();
        json!({
            "fibre_a": k.display(&self.fibre_a),
            "points": self.points.iter().map(|p| match &p.y {
                Some(y) => json!([k.display(&p.x), k.display(y)]),
                None => json!([k.display(&p.x)]),
            }).collect::<Vec<_>>(),
            "blocks": self.blocks,
            "S0": self.s0.display(),
            "SL": self.sl.display(),
            "dim_S0": self.s0.dim(),
            "dim_SL": self.sl.dim(),
            "containment_ok": self.containment_ok,
            "equality": self.equality,
            "blocks_ok": self.blocks_ok,
            "dim_bound": self.dim_bound,
            "dim_bound_ok": self.dim_bound_ok,
            "kernel": self.kernel.iter().map(|u| m.display(u)).collect::<Vec<_>>(),
            "kernel_ok": self.kernel_ok,
            "standing_hypotheses": self.standing_hypotheses,
        })
    }
}

/// First `a` in scan order where `m(a, X)` has `n` distinct roots in `K` and
/// every row in `regular` has coordinates regular at `t = a`.
fn split_fibre(frame: &Frame, regular: &[Vec<RatFunc>]) -> Result<(Scalar, Vec<Scalar>)> {
    let k = frame.field();
    'scan: for a in places::scan_scalars(k) {
        if frame.minpoly().iter().any(|c| !c.is_regular_at(&a)) {
            continue;
        }
        for r in regular.iter().flatten() {
            if !r.is_regular_at(&a) {
                continue 'scan;
            }
        }
        let mp = frame.fibre_poly(&a)?;
        if !mp.is_squarefree()? {
            continue;
        }
        let mut roots = mp.roots()?;
        if roots.len() == frame.n() {
            roots.sort_by(|x, y| k.cmp(x, y));
            return Ok((a, roots));
        }
    }
    Err(Error::Exhausted(format!("no split unramified fibre of {} over {k}", frame.describe())))
}

fn eval_row(frame: &Frame, v: &[RatFunc], a: &Scalar, roots: &[Scalar]) -> Result<Vec<Scalar>> {
    roots.iter().map(|r| frame.eval_at(v, a, r)).collect()
}

/// Rows of `l` rescaled into a lattice that is regular at `t = a` and whose
/// evaluation at the fibre has full rank.
fn saturated_rows(frame: &Frame, l: &KxSubspace, a: &Scalar, roots: &[Scalar]) -> Result<Vec<Vec<RatFunc>>> {
    let k = frame.field();
    let lin: RatFunc = Poly::linear_root(k, a).into();
    let mut rows: Vec<Vec<RatFunc>> = l
        .rows()
        .iter()
        .map(|r| {
            let e = r.iter().filter(|c| !c.is_zero()).map(|c| c.ord_at(a).unwrap()).min().unwrap_or(0);
            let f = lin.pow(-e).unwrap();
            r.iter().map(|c| c * &f).collect()
        })
        .collect();
    for _ in 0..10_000 {
        let ev = rows.iter().map(|r| eval_row(frame, r, a, roots)).collect::<Result<Vec<_>>>()?;
        let ker = linalg::left_kernel_k(k, &ev);
        let Some(c) = ker.first() else { return Ok(rows) };
        let i = c.iter().rposition(|x| !k.is_zero(x)).unwrap();
        let comb: Vec<RatFunc> = (0..frame.n())
            .map(|j| {
                rows.iter().zip(c).fold(RatFunc::zero(k), |acc, (r, ci)| &acc + &r[j].scale(ci))
            })
            .collect();
        let inv = lin.inv()?;
        rows[i] = comb.iter().map(|x| x * &inv).collect();
    }
    Err(Error::Assertion("lattice saturation did not terminate".into()))
}

pub fn evaluation_report(
    s: &KSubspace,
    pivot: &PivotChoice,
    stab: &StabilizerReport,
    assert: bool,
) -> Result<EvaluationReport> {
    let m = s.model();
    let k = m.field();
    let frame = stab.frame.clone();
    let s_rows = s.basis().iter().map(|u| frame.from_parent(u)).collect::<Result<Vec<_>>>()?;
    let (a, roots) = split_fibre(&frame, &s_rows)?;
    let y_rows = match m.y() {
        Ok(y) => Some(frame.from_parent(&y)?),
        Err(_) => None,
    };
    let points = roots
        .iter()
        .map(|r| {
            Ok(FibrePoint {
                x: r.clone(),
                y: y_rows.as_ref().map(|y| frame.eval_at(y, &a, r)).transpose()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let l_rows = saturated_rows(&frame, &stab.l, &a, &roots)?;
    let l_ev = l_rows.iter().map(|r| eval_row(&frame, r, &a, &roots)).collect::<Result<Vec<_>>>()?;
    let mut blocks: Vec<Vec<usize>> = vec![];
    for p in 0..roots.len() {
        let col: Vec<&Scalar> = l_ev.iter().map(|r| &r[p]).collect();
        match blocks.iter_mut().find(|b| l_ev.iter().map(|r| &r[b[0]]).eq(col.iter().copied())) {
            Some(b) => b.push(p),
            None => blocks.push(vec![p]),
        }
    }
    let blocks_ok = blocks.len() as i64 == stab.ell;
    // Blockwise-constant combinations of the basis of S.
    let s_ev = s_rows.iter().map(|r| eval_row(&frame, r, &a, &roots)).collect::<Result<Vec<_>>>()?;
    let mut constraints: Vec<Vec<Scalar>> = vec![];
    for b in &blocks {
        for &p in &b[1..] {
            constraints.push(s_ev.iter().map(|r| k.sub(&r[p], &r[b[0]])).collect());
        }
    }
    let coeffs = linalg::nullspace_k(k, &constraints, s.dim());
    let s0 = KSubspace::span(m, &coeffs.iter().map(|c| s.combine(c)).collect::<Vec<_>>());
    let sl = mixed_intersect(s, &stab.l)?;
    let containment_ok = sl.is_subspace_of(&s0);
    let equality = sl == s0;
    let dim_bound = stab.ell + 1 - stab.tau;
    let dim_bound_ok = s0.dim() as i64 >= dim_bound;
    // Kernel of evaluation on L(D) should be K (w − a).
    let rr = riemann_roch::rr_basis(m, &pivot.divisor)?;
    let rr_ev = rr
        .basis
        .iter()
        .map(|u| eval_row(&frame, &frame.from_parent(u)?, &a, &roots))
        .collect::<Result<Vec<_>>>()?;
    let kernel: Vec<FFElem> = linalg::left_kernel_k(k, &rr_ev)
        .iter()
        .map(|c| {
            rr.basis.iter().zip(c).fold(m.zero(), |acc, (b, ci)| m.add(&acc, &m.scale(b, ci)))
        })
        .collect();
    let w_shift = m.sub(&pivot.w, &m.constant(a.clone()));
    let kernel_ok = KSubspace::span(m, &kernel) == KSubspace::span(m, &[w_shift]);
    let standing_hypotheses = stab.hypothesis_met && stab.generates_field && pivot.pole_divisor_ok;
    if assert {
        let mut failures = vec![];
        if !containment_ok {
            failures.push("S∩L ⊄ S0".to_string());
        }
        if !kernel_ok {
            failures.push("evaluation kernel on L(D) ≠ K(w − a)".into());
        }
        if standing_hypotheses && !(equality && dim_bound_ok) {
            failures.push("S0 ≠ S∩L or dim S0 < ℓ + 1 − τ".into());
        }
        if !failures.is_empty() {
            return Err(Error::Assertion(failures.join("; ")));
        }
    }
    Ok(EvaluationReport {
        fibre_a: a,
        points,
        blocks,
        s0,
        sl,
        containment_ok,
        equality,
        blocks_ok,
        dim_bound,
        dim_bound_ok,
        kernel,
        kernel_ok,
        standing_hypotheses,
    })
}

#[derive(Clone, Debug)]
pub struct AbcReport {
    pub s_used: FFElem,
    pub a_space: KxSubspace,
    pub b_space: KxSubspace,
    pub c_space: KxSubspace,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub a_cap_s: KSubspace,
    pub aplus_cap_s: KSubspace,
    pub cond1: bool,
    pub cond2: bool,
    pub cond3: bool,
    pub cond4: bool,
    pub direct_sum_ok: bool,
    pub l_in_a: bool,
    pub iterations: usize,
    pub dim_s0_prime: usize,
    pub dim_t0: usize,
    pub t0s_in_s: bool,
}

impl AbcReport {
    pub fn to_json(&self, m: &CurveModel) -> Result<Value> {
        Ok(json!({
            "s": m.display(&self.s_used),
            "A": self.a_space.display()?,
            "B": self.b_space.display()?,
            "C": self.c_space.display()?,
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "A_cap_S": self.a_cap_s.display(),
            "Aplus_cap_S": self.aplus_cap_s.display(),
            "cond1": self.cond1,
            "cond2": self.cond2,
            "cond3": self.cond3,
            "cond4": self.cond4,
            "direct_sum_ok": self.direct_sum_ok,
            "L_in_A": self.l_in_a,
            "iterations": self.iterations,
            "dim_S0_prime": self.dim_s0_prime,
            "dim_T0": self.dim_t0,
            "T0s_in_S": self.t0s_in_s,
        }))
    }
}

/// An `L`-complement of `sub` inside `sup`.
fn l_complement(l: &KxSubspace, sub: &KxSubspace, sup: &KxSubspace) -> Result<KxSubspace> {
    let mut b = KxSubspace::zero(l.frame().clone());
    for r in sup.rows() {
        if !sub.sum(&b)?.contains(r) {
            b = b.sum(&l.translate(r))?;
        }
    }
    Ok(b)
}

/// The `A ⊕ B ⊕ C` iteration, for `K(w) ⊊ L ⊊ F`. `s0` is `S ∩ L`; the
/// candidates default to `s_2, …, s_κ`.
pub fn abc_decomposition(
    s: &KSubspace,
    pivot: &PivotChoice,
    stab: &StabilizerReport,
    s0: &KSubspace,
    candidates: Option<&[FFElem]>,
) -> Result<AbcReport> {
    let m = s.model();
    let frame = stab.frame.clone();
    let (l, ls, ell) = (&stab.l, &stab.ls, stab.ell);
    if ell <= 1 || stab.l_is_full {
        return Err(Error::Precondition("the A⊕B⊕C iteration needs K(w) ⊊ L ⊊ F".into()));
    }
    let cands: Vec<FFElem> = match candidates {
        Some(c) => c.to_vec(),
        None => stab.ls_basis.iter().skip(1).cloned().collect(),
    };
    if cands.is_empty() {
        return Err(Error::Precondition("no candidate elements s".into()));
    }
    let cand_rows = cands.iter().map(|u| frame.from_parent(u)).collect::<Result<Vec<_>>>()?;
    let l_dim = |v: &KxSubspace| v.dim() as i64 / ell;
    let cond3_of = |a_sp: &KxSubspace| -> Result<bool> {
        Ok(mixed_intersect(s, a_sp)?.dim() as i64 <= s0.dim() as i64 + (l_dim(a_sp) - 1) * ell)
    };
    let mut si = 0;
    let mut a_sp = ls.intersect(&ls.quotient_by(&cand_rows[si])?)?;
    let mut b_sp = l_complement(l, &a_sp, ls)?;
    let mut c_sp = KxSubspace::zero(frame.clone());
    let mut iterations = 1;
    while !cond3_of(&a_sp)? {
        let Some(next) = (0..cands.len()).find(|&j| !a_sp.translate(&cand_rows[j]).is_subspace_of(ls)) else {
            break;
        };
        let a_next = a_sp.intersect(&ls.quotient_by(&cand_rows[next])?)?;
        if a_next.dim() == a_sp.dim() {
            break;
        }
        let b_next = l_complement(l, &a_next, &a_sp)?;
        c_sp = b_sp.sum(&c_sp)?;
        b_sp = b_next;
        a_sp = a_next;
        si = next;
        iterations += 1;
    }
    let s_row = &cand_rows[si];
    let (a, b, c) = (l_dim(&a_sp), l_dim(&b_sp), l_dim(&c_sp));
    let cond1 = a_sp.translate(s_row).is_subspace_of(ls);
    let cond2 = ls.intersect(&b_sp.translate(s_row))?.dim() == 0;
    let cond3 = cond3_of(&a_sp)?;
    let apb = a_sp.sum(&b_sp)?;
    let aplus_cap_s = mixed_intersect(s, &apb)?;
    let cond4 = aplus_cap_s.dim() as i64 >= s.dim() as i64 - c * ell;
    let direct_sum_ok =
        a + b + c == stab.kappa && apb.sum(&c_sp)? == *ls && a_sp.dim() + b_sp.dim() + c_sp.dim() == ls.dim();
    let l_in_a = l.is_subspace_of(&a_sp);
    // T0 ⊆ S0' = S0 ∩ s⁻¹(S + wS): elements with v_{Q∞} > −N.
    let s_elem = &cands[si];
    let s_plus_ws = s.sum(&s.translate(&pivot.w))?;
    let s0p = s0.intersect(&s_plus_ws.translate(&m.inv(s_elem)?))?;
    let t0: Vec<FFElem> = if s0p.is_zero() {
        vec![]
    } else {
        filtered_with_valuations(&s0p, &pivot.q_inf)?
            .into_iter()
            .filter(|(v, _)| *v > -pivot.n_pole)
            .map(|e| e.1)
            .collect()
    };
    let t0s_in_s = t0.iter().all(|u| s.contains(&m.mul(u, s_elem)));
    Ok(AbcReport {
        s_used: s_elem.clone(),
        a_cap_s: mixed_intersect(s, &a_sp)?,
        a_space: a_sp,
        b_space: b_sp,
        c_space: c_sp,
        a,
        b,
        c,
        aplus_cap_s,
        cond1,
        cond2,
        cond3,
        cond4,
        direct_sum_ok,
        l_in_a,
        iterations,
        dim_s0_prime: s0p.dim(),
        dim_t0: t0.len(),
        t0s_in_s,
    })
}

#[derive(Clone, Debug)]
pub struct KneserBoundReport {
    pub dim_s2: usize,
    pub dim_w: usize,
    /// `w̄ = dim_L LW`.
    pub wbar: i64,
    pub bound_rhs: i64,
    pub bound_ok: bool,
    pub wbar_in_range: bool,
    pub dim_s_plus_ws: usize,
    pub s_plus_ws_ok: bool,
    pub s_cap_ws_ok: bool,
    pub freiman_hypothesis: bool,
}

impl KneserBoundReport {
    pub fn to_json(&self) -> Value {
        json!({
            "dim_S2": self.dim_s2,
            "dim_W": self.dim_w,
            "wbar": self.wbar,
            "bound_rhs": self.bound_rhs,
            "bound_ok": self.bound_ok,
            "wbar_in_range": self.wbar_in_range,
            "dim_S_plus_wS": self.dim_s_plus_ws,
            "S_plus_wS_ok": self.s_plus_ws_ok,
            "S_cap_wS_ok": self.s_cap_ws_ok,
            "freiman_hypothesis": self.freiman_hypothesis,
        })
    }
}

pub fn kneser_bound_checks(
    s: &KSubspace,
    pivot: &PivotChoice,
    stab: &StabilizerReport,
    assert: bool,
) -> Result<KneserBoundReport> {
    let m = s.model();
    let k = s.dim();
    let s2 = s.square();
    let w_sp = mixed_intersect(&s2, &stab.ls)?;
    let lw = stab.l.product(&KxSubspace::span(stab.frame.clone(), &w_sp)?)?;
    let wbar = lw.dim() as i64 / stab.ell;
    let bound_rhs = w_sp.dim() as i64 + (2 * stab.kappa - 1 - wbar) * stab.ell;
    let bound_ok = s2.dim() as i64 >= bound_rhs;
    let ws = s.translate(&pivot.w);
    let dim_s_plus_ws = s.sum(&ws)?.dim();
    let s_plus_ws_ok = dim_s_plus_ws == 2 * k - 1;
    let s_cap_ws_ok = s.intersect(&ws)? == KSubspace::span(m, std::slice::from_ref(&pivot.w));
    let report = KneserBoundReport {
        dim_s2: s2.dim(),
        dim_w: w_sp.dim(),
        wbar,
        bound_rhs,
        bound_ok,
        wbar_in_range: wbar < 2 * stab.kappa,
        dim_s_plus_ws,
        s_plus_ws_ok,
        s_cap_ws_ok,
        freiman_hypothesis: s2.dim() + 4 <= 3 * k,
    };
    if assert && pivot.pole_divisor_ok && !(bound_ok && s_plus_ws_ok && s_cap_ws_ok) {
        return Err(Error::Assertion(format!("Kneser-type bounds failed: {report:?}")));
    }
    Ok(report)
}

/// Every report for one subspace, in pipeline order.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub theorem: TheoremReport,
    pub pivot: PivotChoice,
    pub stabilizer: StabilizerReport,
    pub evaluation: Option<std::result::Result<EvaluationReport, Error>>,
    pub kneser: KneserBoundReport,
    pub abc: Option<std::result::Result<AbcReport, Error>>,
}

impl Analysis {
    pub fn to_json(&self) -> Result<Value> {
        let m = self.theorem.s.model();
        let opt = |r: &Option<std::result::Result<Value, Error>>| match r {
            None => Value::Null,
            Some(Ok(v)) => v.clone(),
            Some(Err(e)) => json!({ "error": e.to_string() }),
        };
        let eval = self.evaluation.as_ref().map(|r| r.as_ref().map(|e| e.to_json(m)).map_err(Clone::clone));
        let abc = match &self.abc {
            None => None,
            Some(Ok(a)) => Some(a.to_json(m)),
            Some(Err(e)) => Some(Err(e.clone())),
        };
        Ok(json!({
            "theorem": self.theorem.to_json(),
            "pivot": self.pivot.to_json(m),
            "stabilizer": self.stabilizer.to_json()?,
            "evaluation": opt(&eval),
            "kneser": self.kneser.to_json(),
            "abc": opt(&abc),
        }))
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct AnalysisOptions {
    pub assert: bool,
    pub evaluation: bool,
}

/// Theorem check, pivot, stabilizer and bound reports; the evaluation and
/// `A ⊕ B ⊕ C` stages are attempted when requested or applicable and keep
/// their own errors.
pub fn analyze(s: &KSubspace, opts: AnalysisOptions) -> Result<Analysis> {
    let theorem = verify_theorem(s, VerifyOptions { normalize: true, assert: opts.assert })?;
    let s = theorem.s.clone();
    let pivot = select_pivot(&s)?;
    let stabilizer = stabilizer_report(&s, &pivot, opts.assert)?;
    let kneser = kneser_bound_checks(&s, &pivot, &stabilizer, opts.assert)?;
    let evaluation = opts.evaluation.then(|| evaluation_report(&s, &pivot, &stabilizer, opts.assert));
    let abc = (stabilizer.ell > 1 && !stabilizer.l_is_full).then(|| {
        let s0 = mixed_intersect(&s, &stabilizer.l)?;
        abc_decomposition(&s, &pivot, &stabilizer, &s0, None)
    });
    if let Some(Err(e @ Error::Assertion(_))) = &evaluation {
        return Err(e.clone());
    }
    Ok(Analysis { theorem, pivot, stabilizer, evaluation, kneser, abc })
}

/// `S` over the extension `k2` of its prime base field.
pub fn base_change(s: &KSubspace, k2: crate::field::BaseField) -> Result<KSubspace> {
    let m = s.model();
    let m2 = m.base_change(k2)?;
    let gens = s.basis().iter().map(|u| m.lift_elem(u, &m2)).collect::<Result<Vec<_>>>()?;
    Ok(KSubspace::span(&m2, &gens))
}
