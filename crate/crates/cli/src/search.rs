//! Seeded random search for theorem counterexamples.
//!
//! Trial `i` draws from its own xorshift128 stream seeded with `seed + i`, so
//! any single trial can be replayed in isolation and trials may run in
//! parallel without changing the output.

use fflab_core::freiman::{verify_theorem, VerifyOptions};
use fflab_core::json::{envelope, Instance, InstanceOptions};
use fflab_core::riemann_roch::{rr_basis, Divisor};
use fflab_core::{BaseField, CurveModel, Error, FFElem, KSubspace, PlaceId, Poly, Result, Scalar};
use rand_core::{RngCore, SeedableRng};
use rand_xorshift::XorShiftRng;
use rayon::prelude::*;
use serde_json::{json, Value};

pub const MAX_TRIALS: u64 = 1_000_000;
pub const MAX_K: usize = 24;
pub const MAX_CODIM: usize = 8;

/// Trials evaluated in parallel before their lines are flushed in order.
const BATCH: u64 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub seed: u64,
    pub trials: u64,
    /// 0 selects the rationals.
    pub char: u32,
    pub ext: usize,
    pub genus: usize,
    pub k_range: (usize, usize),
    pub codim_range: (usize, usize),
}

impl SearchConfig {
    pub fn validate(&self) -> Result<BaseField> {
        if self.genus > 2 {
            return Err(Error::Config(format!("genus {} is not supported (0, 1 or 2)", self.genus)));
        }
        let (k0, k1) = self.k_range;
        let (c0, c1) = self.codim_range;
        if k0 > k1 || c0 > c1 {
            return Err(Error::Config("empty k or codim range".into()));
        }
        let k_min = if self.genus == 0 { 1 } else { 3 };
        if k0 < k_min || k1 > MAX_K {
            return Err(Error::Config(format!("k range must lie in [{k_min}, {MAX_K}] for genus {}", self.genus)));
        }
        if c1 > MAX_CODIM {
            return Err(Error::Config(format!("codim is capped at {MAX_CODIM}")));
        }
        if self.trials > MAX_TRIALS {
            return Err(Error::Limit(format!("{} trials > {MAX_TRIALS}", self.trials)));
        }
        let k = if self.char == 0 {
            if self.ext != 1 {
                return Err(Error::Config("ext must be 1 over Q".into()));
            }
            BaseField::rationals()
        } else {
            BaseField::finite(self.char, self.ext)?
        };
        if self.genus > 0 && self.char == 2 {
            return Err(Error::Config("hyperelliptic models need odd characteristic".into()));
        }
        Ok(k)
    }
}

/// Uniform draws from a xorshift128 stream.
pub struct TrialRng(XorShiftRng);

impl TrialRng {
    pub fn new(seed: u64) -> Self {
        TrialRng(XorShiftRng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform on `0..n` by rejection sampling.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let zone = u64::MAX - (u64::MAX - n + 1) % n;
        loop {
            let r = self.next_u64();
            if r <= zone {
                return r % n;
            }
        }
    }

    pub fn range(&mut self, lo: usize, hi: usize) -> usize {
        lo + self.below((hi - lo + 1) as u64) as usize
    }

    /// Uniform over a finite field, or an integer in `-5..=5` over Q.
    pub fn scalar(&mut self, k: BaseField) -> Scalar {
        match k.order() {
            Some(q) if q <= u64::MAX as u128 => k.element(self.below(q as u64) as u128),
            _ => k.from_i64(self.below(11) as i64 - 5),
        }
    }

    pub fn nonzero_scalar(&mut self, k: BaseField) -> Scalar {
        loop {
            let s = self.scalar(k);
            if !k.is_zero(&s) {
                return s;
            }
        }
    }
}

/// Retries per trial before giving up on reaching the requested dimension.
const DRAWS: usize = 64;

fn random_combination(m: &CurveModel, basis: &[FFElem], rng: &mut TrialRng) -> FFElem {
    let k = m.field();
    basis.iter().fold(m.zero(), |acc, b| m.add(&acc, &m.scale(b, &rng.scalar(k))))
}

/// `fixed` plus random elements of `span(pool)` until the span has dimension `dim`.
fn extend_randomly(m: &CurveModel, fixed: Vec<FFElem>, pool: &[FFElem], dim: usize, rng: &mut TrialRng) -> Result<Vec<FFElem>> {
    let mut gens = fixed;
    let mut cur = KSubspace::span(m, &gens).dim();
    for _ in 0..DRAWS * dim.max(1) {
        if cur >= dim {
            return Ok(gens);
        }
        let u = random_combination(m, pool, rng);
        let next = KSubspace::span(m, &[gens.as_slice(), std::slice::from_ref(&u)].concat()).dim();
        if next > cur {
            gens.push(u);
            cur = next;
        }
    }
    Err(Error::Exhausted(format!("could not draw a {dim}-dimensional subspace")))
}

fn genus0_instance(k: BaseField, dim: usize, codim: usize, monomial: bool, rng: &mut TrialRng) -> Result<Vec<FFElem>> {
    let m = CurveModel::rational(k);
    let n = dim + codim - 1;
    if monomial {
        // 0 and n pinned so the pole order is exactly n.
        let mut exps = vec![0];
        if dim > 1 {
            exps.push(n);
        }
        let mut rest: Vec<usize> = (1..n).collect();
        while exps.len() < dim {
            let j = rng.below(rest.len() as u64) as usize;
            exps.push(rest.swap_remove(j));
        }
        exps.sort_unstable();
        return Ok(exps.into_iter().map(|e| m.x_pow(e)).collect());
    }
    let pool: Vec<FFElem> = (1..=n).map(|e| m.x_pow(e)).collect();
    extend_randomly(&m, vec![m.one()], &pool, dim, rng)
}

fn random_curve(k: BaseField, g: usize, rng: &mut TrialRng) -> Result<CurveModel> {
    for _ in 0..DRAWS {
        let mut cs: Vec<Scalar> = (0..=2 * g).map(|_| rng.scalar(k)).collect();
        cs.push(k.one());
        let f = Poly::new(k, cs);
        if f.is_squarefree()? {
            return CurveModel::hyperelliptic(k, f);
        }
    }
    Err(Error::Exhausted(format!("no squarefree quintic or cubic found over {k}")))
}

fn hyperelliptic_instance(k: BaseField, g: usize, dim: usize, codim: usize, rng: &mut TrialRng) -> Result<(CurveModel, Vec<FFElem>)> {
    let m = random_curve(k, g, rng)?;
    let n = (dim + codim + g - 1).max(2 * g + 1) as i64;
    let l = rr_basis(&m, &Divisor::single(PlaceId::InfinityHyp, n))?;
    let fixed = vec![m.one(), m.x(), m.y()?];
    let target = dim.min(l.dim);
    let gens = extend_randomly(&m, fixed, &l.basis, target, rng)?;
    Ok((m, gens))
}

/// The instance drawn by trial `index`.
pub fn trial_instance(cfg: &SearchConfig, k: BaseField, index: u64) -> Result<Instance> {
    let mut rng = TrialRng::new(cfg.seed.wrapping_add(index));
    let dim = rng.range(cfg.k_range.0, cfg.k_range.1);
    let codim = rng.range(cfg.codim_range.0, cfg.codim_range.1);
    let (model, subspace) = if cfg.genus == 0 {
        (CurveModel::rational(k), genus0_instance(k, dim, codim, index % 2 == 1, &mut rng)?)
    } else {
        hyperelliptic_instance(k, cfg.genus, dim, codim, &mut rng)?
    };
    Ok(Instance { model, subspace, options: InstanceOptions { normalize: true, assert: true } })
}

/// One trial's outcome.
#[derive(Clone, Debug)]
pub struct TrialLine {
    pub index: u64,
    pub json: Value,
    pub assertion: bool,
}

pub fn run_trial(cfg: &SearchConfig, k: BaseField, index: u64) -> TrialLine {
    let seed = cfg.seed.wrapping_add(index);
    let head = json!({ "trial": index, "seed": seed });
    let inst = match trial_instance(cfg, k, index) {
        Ok(i) => i,
        Err(e) => {
            return TrialLine { index, json: envelope("search-trial", merge(head, json!({ "error": e.to_string() })), None), assertion: false }
        }
    };
    let opts = VerifyOptions { normalize: inst.options.normalize, assert: inst.options.assert };
    let (body, assertion) = match verify_theorem(&inst.span(), opts) {
        Ok(r) => (json!({ "theorem": r.to_json() }), false),
        Err(e @ Error::Assertion(_)) => (json!({ "assertion": e.to_string() }), true),
        Err(e) => (json!({ "error": e.to_string() }), false),
    };
    TrialLine { index, json: envelope("search-trial", merge(head, body), Some(&inst)), assertion }
}

fn merge(a: Value, b: Value) -> Value {
    match (a, b) {
        (Value::Object(mut a), Value::Object(b)) => {
            a.extend(b);
            Value::Object(a)
        }
        (a, _) => a,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchSummary {
    pub emitted: u64,
    /// Index of the trial that violated an assertion, if any.
    pub assertion_at: Option<u64>,
}

/// Run the search and hand each JSON line to `emit` in trial order.
/// Stops after the first assertion failure.
pub fn run_search(cfg: &SearchConfig, mut emit: impl FnMut(&str) -> std::io::Result<()>) -> Result<SearchSummary> {
    let k = cfg.validate()?;
    let mut emitted = 0;
    let mut start = 0;
    while start < cfg.trials {
        let end = (start + BATCH).min(cfg.trials);
        let lines: Vec<TrialLine> = (start..end).into_par_iter().map(|i| run_trial(cfg, k, i)).collect();
        for line in lines {
            emit(&line.json.to_string()).map_err(|e| Error::Config(format!("write failed: {e}")))?;
            emitted += 1;
            if line.assertion {
                return Ok(SearchSummary { emitted, assertion_at: Some(line.index) });
            }
        }
        start = end;
    }
    Ok(SearchSummary { emitted, assertion_at: None })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(genus: usize) -> SearchConfig {
        SearchConfig { seed: 7, trials: 6, char: 101, ext: 1, genus, k_range: (3, 6), codim_range: (0, 2) }
    }

    #[test]
    fn below_is_in_range_and_reproducible() {
        let mut a = TrialRng::new(1);
        let mut b = TrialRng::new(1);
        for n in [1u64, 2, 3, 10, 101, u64::MAX] {
            let x = a.below(n);
            assert!(x < n);
            assert_eq!(x, b.below(n));
        }
    }

    /// Reference stream: PCG32 expands the seed into four words, then xorshift128 (11, 8, 19).
    fn reference_stream(seed: u64, count: usize) -> Vec<u64> {
        let mut st = seed;
        let mut words = [0u32; 4];
        for w in &mut words {
            st = st.wrapping_mul(6364136223846793005).wrapping_add(11634580027462260723);
            let xorshifted = (((st >> 18) ^ st) >> 27) as u32;
            *w = xorshifted.rotate_right((st >> 59) as u32);
        }
        if words == [0; 4] {
            words = [0xBAD_5EED; 4];
        }
        let [mut x, mut y, mut z, mut w] = words;
        let mut next = || {
            let t = x ^ (x << 11);
            (x, y, z) = (y, z, w);
            w = w ^ (w >> 19) ^ (t ^ (t >> 8));
            w
        };
        (0..count)
            .map(|_| {
                let lo = next() as u64;
                let hi = next() as u64;
                (hi << 32) | lo
            })
            .collect()
    }

    #[test]
    fn stream_matches_documented_algorithm() {
        for seed in [0u64, 1, 42, u64::MAX] {
            let mut r = TrialRng::new(seed);
            let got: Vec<u64> = (0..16).map(|_| r.next_u64()).collect();
            assert_eq!(got, reference_stream(seed, 16), "seed {seed}");
        }
    }

    #[test]
    fn instances_have_requested_shape() {
        for g in 0..=2 {
            let c = cfg(g);
            let k = c.validate().unwrap();
            for i in 0..c.trials {
                let inst = trial_instance(&c, k, i).unwrap();
                let s = inst.span();
                assert!((3..=6).contains(&s.dim()), "genus {g} trial {i}: dim {}", s.dim());
                assert!(s.contains(&inst.model.one()));
                assert_eq!(inst.model.genus(), g);
            }
        }
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = cfg(3);
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.genus = 1;
        c.k_range = (5, 4);
        assert!(c.validate().is_err());
        c.k_range = (3, 4);
        c.char = 2;
        assert!(c.validate().is_err());
        c.char = 9;
        assert!(c.validate().is_err());
    }
}
