//! Finite integer sets: sumsets, the classical 3k-4 statement, Kneser in
//! `Z/nZ`, reduction modulo `max A`, and the monomial bridge to subspaces of
//! `K(x)`.

use num_integer::Integer;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::BaseField;
use crate::freiman::{self, Verdict, VerifyOptions};
use crate::limits::{MAX_MODULUS, MAX_SET_ELEMENT, MAX_SET_SIZE};
use crate::model::CurveModel;
use crate::places::PlaceId;
use crate::riemann_roch::{self, Divisor};
use crate::subspace::KSubspace;

/// Sorted, duplicate-free set of non-negative integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntSet {
    elems: Vec<u64>,
}

/// `A = shift + scale · A'` with `A'` normalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Normalization {
    pub shift: i64,
    pub scale: i64,
}

impl IntSet {
    pub fn new(elems: impl IntoIterator<Item = u64>) -> Self {
        let mut elems: Vec<u64> = elems.into_iter().collect();
        elems.sort_unstable();
        elems.dedup();
        IntSet { elems }
    }

    /// Accepts arbitrary integers and normalizes them.
    pub fn from_signed(elems: &[i64]) -> Result<(IntSet, Normalization)> {
        let Some(&min) = elems.iter().min() else {
            return Err(Error::Parse("empty set".into()));
        };
        let scale = elems.iter().fold(0i64, |g, &a| g.gcd(&(a - min))).max(1);
        let set = IntSet::new(elems.iter().map(|&a| ((a - min) / scale) as u64));
        Ok((set, Normalization { shift: min, scale }))
    }

    /// Parse `a1,a2,...`.
    pub fn parse(s: &str) -> Result<(IntSet, Normalization)> {
        let v = s
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|e| Error::Parse(format!("set element {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_signed(&v)
    }

    pub fn elems(&self) -> &[u64] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn max(&self) -> Option<u64> {
        self.elems.last().copied()
    }

    pub fn contains(&self, a: u64) -> bool {
        self.elems.binary_search(&a).is_ok()
    }

    pub fn is_normalized(&self) -> bool {
        self.elems.first() == Some(&0) && self.elems.iter().fold(0u64, |g, a| g.gcd(a)) <= 1
    }

    pub fn normalize(&self) -> (IntSet, Normalization) {
        let signed: Vec<i64> = self.elems.iter().map(|&a| a as i64).collect();
        Self::from_signed(&signed).expect("nonempty")
    }

    /// Integers of `[0, max A]` missing from `A`.
    pub fn gaps(&self) -> u64 {
        self.max().map_or(0, |m| m + 1 - self.len() as u64)
    }

    pub fn check_limits(&self) -> Result<()> {
        if self.len() > MAX_SET_SIZE {
            return Err(Error::Limit(format!("|A| = {} exceeds {MAX_SET_SIZE}", self.len())));
        }
        if self.max().unwrap_or(0) > MAX_SET_ELEMENT {
            return Err(Error::Limit(format!("max A exceeds {MAX_SET_ELEMENT}")));
        }
        Ok(())
    }
}

pub fn sumset(a: &IntSet, b: &IntSet) -> IntSet {
    IntSet::new(a.elems.iter().flat_map(|x| b.elems.iter().map(move |y| x + y)))
}

fn gamma_of(a: &IntSet, aa: &IntSet) -> i64 {
    aa.len() as i64 - 2 * a.len() as i64 + 1
}

#[derive(Clone, Debug)]
pub struct Freiman3k4Report {
    pub set: IntSet,
    pub normalization: Normalization,
    pub k: usize,
    pub sumset_size: usize,
    pub gamma: i64,
    pub hypothesis_met: bool,
    pub max: u64,
    pub gaps: u64,
    /// `max A ≤ |A| − 1 + γ`.
    pub ap_cover_ok: bool,
}

impl Freiman3k4Report {
    pub fn to_json(&self) -> Value {
        json!({
            "A": self.set.elems(),
            "normalization": { "shift": self.normalization.shift, "scale": self.normalization.scale },
            "k": self.k,
            "sumset_size": self.sumset_size,
            "gamma": self.gamma,
            "hypothesis_met": self.hypothesis_met,
            "max": self.max,
            "gaps": self.gaps,
            "ap_cover_ok": self.ap_cover_ok,
        })
    }
}

pub fn freiman_3k4_verify(a: &IntSet, assert: bool) -> Result<Freiman3k4Report> {
    let (set, normalization) = a.normalize();
    if set.len() < 3 {
        return Err(Error::Precondition(format!("|A| = {} < 3", set.len())));
    }
    let aa = sumset(&set, &set);
    let k = set.len();
    let gamma = gamma_of(&set, &aa);
    let max = set.max().unwrap();
    let hypothesis_met = gamma <= k as i64 - 3;
    let ap_cover_ok = max as i64 <= k as i64 - 1 + gamma;
    if assert && hypothesis_met && !ap_cover_ok {
        return Err(Error::Assertion(format!("3k-4 fails for {:?}", set.elems())));
    }
    Ok(Freiman3k4Report {
        gaps: set.gaps(),
        set,
        normalization,
        k,
        sumset_size: aa.len(),
        gamma,
        hypothesis_met,
        max,
        ap_cover_ok,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KneserModReport {
    pub n: u64,
    pub reduced: Vec<u64>,
    pub sumset: Vec<u64>,
    /// `H = dZ/nZ`.
    pub h_generator: u64,
    pub h_order: u64,
    pub stable: bool,
    pub maximal: bool,
    pub bound_ok: bool,
}

impl KneserModReport {
    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n,
            "A_mod_n": self.reduced,
            "sumset": self.sumset,
            "H_generator": self.h_generator,
            "H_order": self.h_order,
            "H": (0..self.h_order).map(|i| i * self.h_generator).collect::<Vec<_>>(),
            "stable": self.stable,
            "maximal": self.maximal,
            "bound_ok": self.bound_ok,
        })
    }
}

fn mod_sumset(a: &[u64], n: u64) -> Vec<bool> {
    let mut hit = vec![false; n as usize];
    for x in a {
        for y in a {
            hit[((x + y) % n) as usize] = true;
        }
    }
    hit
}

/// The stabilizer `H` of `Ã + Ã` in `Z/nZ`, found exhaustively.
pub fn kneser_mod(a: &IntSet, n: u64) -> Result<KneserModReport> {
    if n == 0 {
        return Err(Error::Parse("modulus must be positive".into()));
    }
    if n > MAX_MODULUS {
        return Err(Error::Limit(format!("modulus {n} exceeds {MAX_MODULUS}")));
    }
    if a.is_empty() {
        return Err(Error::Precondition("empty set".into()));
    }
    let reduced = IntSet::new(a.elems().iter().map(|x| x % n)).elems;
    let hit = mod_sumset(&reduced, n);
    let sum: Vec<u64> = (0..n).filter(|&i| hit[i as usize]).collect();
    let stabilizes = |h: u64| sum.iter().all(|s| hit[((s + h) % n) as usize]);
    let periods: Vec<u64> = (0..n).filter(|&h| stabilizes(h)).collect();
    // The stabilizer is a subgroup, so its least positive element generates it.
    let h_generator = periods.iter().copied().find(|&h| h > 0).unwrap_or(n);
    let h_order = n / h_generator;
    let subgroup: Vec<u64> = (0..h_order).map(|i| i * h_generator).collect();
    let stable = subgroup.iter().all(|&h| stabilizes(h));
    let maximal = periods == subgroup;
    let bound_ok = sum.len() as i64 >= 2 * reduced.len() as i64 - h_order as i64;
    Ok(KneserModReport { n, reduced, sumset: sum, h_generator, h_order, stable, maximal, bound_ok })
}

#[derive(Clone, Debug)]
pub struct LevSmelianskyReport {
    pub set: IntSet,
    pub n: u64,
    pub gamma: i64,
    pub reduced_size: usize,
    pub reduced_sumset_size: usize,
    pub hypothesis_met: bool,
    /// `|Ã| = |A| − 1`.
    pub size_ok: bool,
    /// `|Ã + Ã| ≤ |Ã| + γ`.
    pub upper_ok: bool,
    /// `|Ã| + γ ≤ 2|Ã| − 2`.
    pub chain_ok: bool,
    pub kneser: KneserModReport,
}

impl LevSmelianskyReport {
    pub fn to_json(&self) -> Value {
        json!({
            "A": self.set.elems(),
            "n": self.n,
            "gamma": self.gamma,
            "reduced_size": self.reduced_size,
            "reduced_sumset_size": self.reduced_sumset_size,
            "hypothesis_met": self.hypothesis_met,
            "size_ok": self.size_ok,
            "upper_ok": self.upper_ok,
            "chain_ok": self.chain_ok,
            "kneser": self.kneser.to_json(),
        })
    }
}

pub fn lev_smeliansky_report(a: &IntSet, assert: bool) -> Result<LevSmelianskyReport> {
    let (set, _) = a.normalize();
    let n = set.max().unwrap();
    if n == 0 {
        return Err(Error::Precondition("reduction needs max A > 0".into()));
    }
    let aa = sumset(&set, &set);
    let gamma = gamma_of(&set, &aa);
    let kneser = kneser_mod(&set, n)?;
    let reduced_size = kneser.reduced.len();
    let reduced_sumset_size = kneser.sumset.len();
    let hypothesis_met = set.len() >= 3 && gamma <= set.len() as i64 - 3;
    let size_ok = reduced_size + 1 == set.len();
    let upper_ok = reduced_sumset_size as i64 <= reduced_size as i64 + gamma;
    let chain_ok = reduced_size as i64 + gamma <= 2 * reduced_size as i64 - 2;
    if assert && !(size_ok && upper_ok && (!hypothesis_met || chain_ok) && kneser.bound_ok) {
        return Err(Error::Assertion(format!("reduction mod {n} inequalities fail for {:?}", set.elems())));
    }
    Ok(LevSmelianskyReport {
        set,
        n,
        gamma,
        reduced_size,
        reduced_sumset_size,
        hypothesis_met,
        size_ok,
        upper_ok,
        chain_ok,
        kneser,
    })
}

#[derive(Clone, Debug)]
pub struct BridgeReport {
    pub set: IntSet,
    pub normalization: Normalization,
    pub field: BaseField,
    pub gamma_add: i64,
    pub gamma_ff: i64,
    pub sumset_size: usize,
    pub dim_s: usize,
    pub dim_s2: usize,
    pub divisor: Divisor,
    pub rr_dim: usize,
    pub codim: i64,
    pub gaps: u64,
    pub ap_cover_ok: bool,
    pub hypothesis_met: bool,
    pub theorem_verdict: Verdict,
    /// `None` when `|A| < 3`.
    pub classical: Option<Freiman3k4Report>,
    pub verdicts_agree: bool,
    /// Every identity between the two sides holds.
    pub consistent: bool,
}

impl BridgeReport {
    pub fn to_json(&self) -> Value {
        json!({
            "A": self.set.elems(),
            "normalization": { "shift": self.normalization.shift, "scale": self.normalization.scale },
            "field": self.field.to_string(),
            "gamma_add": self.gamma_add,
            "gamma_ff": self.gamma_ff,
            "sumset_size": self.sumset_size,
            "dim_S": self.dim_s,
            "dimS2": self.dim_s2,
            "D": self.divisor.display(self.field),
            "rr_dim": self.rr_dim,
            "codim": self.codim,
            "gaps": self.gaps,
            "ap_cover_ok": self.ap_cover_ok,
            "hypothesis_met": self.hypothesis_met,
            "theorem_verdict": self.theorem_verdict.as_str(),
            "classical": self.classical.as_ref().map(Freiman3k4Report::to_json),
            "verdicts_agree": self.verdicts_agree,
            "consistent": self.consistent,
        })
    }
}

/// Compare `A` with `S = span{x^a : a ∈ A}` on the rational model over `base`.
pub fn monomial_bridge(a: &IntSet, base: BaseField, assert: bool) -> Result<BridgeReport> {
    let (set, normalization) = a.normalize();
    set.check_limits()?;
    let m = CurveModel::rational(base);
    let s = KSubspace::span(&m, &set.elems().iter().map(|&e| m.x_pow(e as usize)).collect::<Vec<_>>());
    let aa = sumset(&set, &set);
    let gamma_add = gamma_of(&set, &aa);
    let dim_s2 = s.square().dim();
    let gamma_ff = dim_s2 as i64 - 2 * s.dim() as i64 + 1;
    let max = set.max().unwrap();
    let divisor = if max == 0 {
        Divisor::zero()
    } else {
        riemann_roch::minimal_divisor(&s)?
    };
    let rr_dim = riemann_roch::rr_basis(&m, &divisor)?.dim;
    let codim = rr_dim as i64 - s.dim() as i64;
    let theorem = freiman::verify_theorem(&s, VerifyOptions { normalize: false, assert })?;
    let classical = if set.len() >= 3 { Some(freiman_3k4_verify(&set, assert)?) } else { None };
    let hypothesis_met = set.len() >= 3 && gamma_add <= set.len() as i64 - 3;
    let ap_cover_ok = max as i64 <= set.len() as i64 - 1 + gamma_add;
    let verdicts_agree = match &classical {
        Some(c) => {
            c.hypothesis_met == theorem.hypothesis_met
                && (theorem.verdict == Verdict::Pass) == (c.hypothesis_met && c.ap_cover_ok)
        }
        None => theorem.verdict == Verdict::NotApplicable,
    };
    let consistent = s.dim() == set.len()
        && dim_s2 == aa.len()
        && gamma_ff == gamma_add
        && divisor == Divisor::single(PlaceId::Infinity0, max as i64)
        && rr_dim as u64 == max + 1
        && codim as u64 == set.gaps()
        && verdicts_agree;
    if assert && !consistent {
        return Err(Error::Assertion(format!("monomial bridge inconsistent for {:?}", set.elems())));
    }
    Ok(BridgeReport {
        gaps: set.gaps(),
        set,
        normalization,
        field: base,
        gamma_add,
        gamma_ff,
        sumset_size: aa.len(),
        dim_s: s.dim(),
        dim_s2,
        divisor,
        rr_dim,
        codim,
        ap_cover_ok,
        hypothesis_met,
        theorem_verdict: theorem.verdict,
        classical,
        verdicts_agree,
        consistent,
    })
}
