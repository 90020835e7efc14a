use fflab_core::additive::{kneser_mod, monomial_bridge, sumset, IntSet};
use fflab_core::freiman::{combinatorial_genus, filtered_with_valuations, select_pivot};
use fflab_core::linalg::rref_k;
use fflab_core::places::{evaluate, split_points, valuation};
use fflab_core::riemann_roch::minimal_divisor;
use fflab_core::subspace::KxSubspace;
use fflab_core::{BaseField, CurveModel, FFElem, KSubspace, PlaceId, Poly, RatFunc, Scalar};
use proptest::prelude::*;
use std::sync::Arc;

fn fields() -> Vec<BaseField> {
    vec![
        BaseField::rationals(),
        BaseField::prime(7).unwrap(),
        BaseField::prime(101).unwrap(),
        BaseField::finite(3, 2).unwrap(),
        BaseField::finite(5, 3).unwrap(),
    ]
}

fn scalar(k: BaseField, i: i64) -> Scalar {
    match k.order() {
        Some(q) => k.element(i.rem_euclid(q as i64) as u128),
        None => k.from_i64(i),
    }
}

fn poly(k: BaseField, cs: &[i64]) -> Poly {
    Poly::new(k, cs.iter().map(|&c| scalar(k, c)).collect())
}

fn genus1() -> CurveModel {
    let k = BaseField::prime(101).unwrap();
    CurveModel::hyperelliptic(k, Poly::from_i64s(k, &[1, 1, 0, 1])).unwrap()
}

fn genus2() -> CurveModel {
    let k = BaseField::prime(31).unwrap();
    CurveModel::hyperelliptic(k, Poly::from_i64s(k, &[2, 0, 1, 0, 0, 1])).unwrap()
}

/// Polynomial element `a(x) + b(x) y` (or `a(x)` on the rational model).
fn elem(m: &CurveModel, a: &[i64], b: &[i64]) -> FFElem {
    let k = m.field();
    let pa = m.from_poly(poly(k, a));
    if m.is_rational() {
        return pa;
    }
    m.add(&pa, &m.mul(&m.from_poly(poly(k, b)), &m.y().unwrap()))
}

fn coeffs(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-60i64..60, 0..=len)
}

fn models() -> Vec<CurveModel> {
    vec![CurveModel::rational(BaseField::prime(101).unwrap()), CurveModel::rational(BaseField::rationals()), genus1(), genus2()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(fi in 0usize..5, a in -500i64..500, b in -500i64..500, c in -500i64..500) {
        let k = fields()[fi];
        let (a, b, c) = (scalar(k, a), scalar(k, b), scalar(k, c));
        prop_assert_eq!(k.add(&a, &b), k.add(&b, &a));
        prop_assert_eq!(k.mul(&k.mul(&a, &b), &c), k.mul(&a, &k.mul(&b, &c)));
        prop_assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
        prop_assert!(k.is_zero(&k.add(&a, &k.neg(&a))));
        if !k.is_zero(&a) {
            prop_assert!(k.is_one(&k.mul(&a, &k.inv(&a).unwrap())));
        }
        if let Some(q) = k.order() {
            prop_assert_eq!(k.pow(&a, q), a);
        }
    }

    #[test]
    fn poly_division_and_gcd(fi in 0usize..5, a in coeffs(8), b in coeffs(5), c in coeffs(4)) {
        let k = fields()[fi];
        let (a, b, c) = (poly(k, &a), poly(k, &b), poly(k, &c));
        prop_assume!(!b.is_zero());
        let (q, r) = a.divrem(&b).unwrap();
        prop_assert_eq!(&(&q * &b) + &r, a.clone());
        prop_assert!(r.deg() < b.deg());
        let ac = &a * &c;
        let bc = &b * &c;
        let g = Poly::gcd(&ac, &bc);
        prop_assert!(g.divides(&ac) && g.divides(&bc));
        if !c.is_zero() {
            prop_assert!(c.divides(&g));
        }
    }

    #[test]
    fn ratfunc_field_ops(fi in 0usize..5, a in coeffs(4), b in coeffs(4), c in coeffs(3)) {
        let k = fields()[fi];
        let (pa, pb) = (poly(k, &a), poly(k, &b));
        prop_assume!(!pa.is_zero() && !pb.is_zero());
        let u = RatFunc::new(pa.clone(), pb.clone()).unwrap();
        let v = RatFunc::new(poly(k, &c), Poly::one(k)).unwrap();
        prop_assert!((&u * &u.inv().unwrap()).is_one());
        prop_assert_eq!(&u + &v, &v + &u);
        prop_assert_eq!(&(&u + &v) - &v, u.clone());
        prop_assert_eq!(&u * &(&v + &u), &(&u * &v) + &(&u * &u));
    }

    #[test]
    fn rref_is_canonical(rows in prop::collection::vec(prop::collection::vec(-9i64..9, 5), 1..5), mix in prop::collection::vec(-9i64..9, 4)) {
        let k = BaseField::prime(13).unwrap();
        let rows: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&c| scalar(k, c)).collect()).collect();
        let e = rref_k(k, &rows);
        let mut more = rows.clone();
        more.reverse();
        let combo: Vec<Scalar> = (0..5)
            .map(|j| rows.iter().zip(&mix).fold(k.zero(), |acc, (r, &m)| k.add(&acc, &k.mul(&r[j], &scalar(k, m)))))
            .collect();
        more.push(combo);
        prop_assert_eq!(rref_k(k, &more), e.clone());
        prop_assert_eq!(rref_k(k, &e.rows), e);
    }

    #[test]
    fn valuation_axioms(mi in 0usize..4, a in coeffs(5), b in coeffs(3), c in coeffs(5), d in coeffs(3), pt in 0i64..101) {
        let m = &models()[mi];
        let (u, v) = (elem(m, &a, &b), elem(m, &c, &d));
        prop_assume!(!u.is_zero() && !v.is_zero());
        let k = m.field();
        let mut places = vec![fflab_core::places::infinity(m)];
        if m.is_rational() {
            places.push(PlaceId::Finite0(scalar(k, pt)));
        } else if let Ok(f) = split_points(m, &scalar(k, pt)) {
            places.extend(f.points.into_iter().map(|(x, y)| PlaceId::Point(x, y)));
        }
        for p in &places {
            let (vu, vv) = (valuation(m, &u, p).unwrap(), valuation(m, &v, p).unwrap());
            prop_assert_eq!(valuation(m, &m.mul(&u, &v), p).unwrap(), vu + vv);
            let s = m.add(&u, &v);
            if !s.is_zero() {
                prop_assert!(valuation(m, &s, p).unwrap() >= vu.min(vv));
            }
            if !p.is_infinite() && vu >= 0 && vv >= 0 {
                let ev = |w: &FFElem| evaluate(m, w, p).unwrap();
                prop_assert_eq!(ev(&m.mul(&u, &v)), k.mul(&ev(&u), &ev(&v)));
                prop_assert_eq!(ev(&m.add(&u, &v)), k.add(&ev(&u), &ev(&v)));
            }
        }
    }

    #[test]
    fn grassmann(mi in 0usize..4, gens in prop::collection::vec((coeffs(4), coeffs(2)), 2..7), split in 1usize..6) {
        let m = &models()[mi];
        let es: Vec<FFElem> = gens.iter().map(|(a, b)| elem(m, a, b)).collect();
        let split = split.min(es.len() - 1);
        let s = KSubspace::span(m, &es[..split]);
        let t = KSubspace::span(m, &es[split - 1..]);
        let sum = s.sum(&t).unwrap();
        let cap = s.intersect(&t).unwrap();
        prop_assert_eq!(sum.dim() + cap.dim(), s.dim() + t.dim());
        prop_assert!(cap.is_subspace_of(&s) && cap.is_subspace_of(&t));
    }

    #[test]
    fn kneser_for_kx_subspaces(mi in 0usize..3, us in prop::collection::vec(0usize..12, 1..4), vs in prop::collection::vec(0usize..12, 1..4), y in any::<bool>()) {
        // Spans over K(w) with [F : K(w)] = 6, so intermediate fields exist.
        let m = &models()[[0, 2, 3][mi]];
        let w = if m.is_rational() { m.x_pow(6) } else { m.add(&m.x_pow(3), &m.y().unwrap()) };
        let frame = Arc::new(m.pivot_frame(&w).unwrap());
        let mono = |e: usize| {
            let u = m.x_pow(e);
            if y && !m.is_rational() && e % 2 == 1 { m.mul(&u, &m.y().unwrap()) } else { u }
        };
        let u = KxSubspace::span_elems(frame.clone(), &us.iter().map(|&e| mono(e)).collect::<Vec<_>>()).unwrap();
        let v = KxSubspace::span_elems(frame.clone(), &vs.iter().map(|&e| mono(e)).collect::<Vec<_>>()).unwrap();
        let uv = u.product(&v).unwrap();
        let st = uv.stabilizer().unwrap();
        prop_assert!(uv.dim() + st.dim() >= u.dim() + v.dim());
        prop_assert!(st.field_checks(&uv).unwrap().all());
        prop_assert_eq!(frame.n() % st.dim(), 0);
    }

    #[test]
    fn cauchy_davenport(p in prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 31]), a in prop::collection::vec(0u64..40, 1..8), b in prop::collection::vec(0u64..40, 1..8)) {
        let a = IntSet::new(a.into_iter().map(|x| x % p));
        let b = IntSet::new(b.into_iter().map(|x| x % p));
        let s: std::collections::BTreeSet<u64> = sumset(&a, &b).elems().iter().map(|x| x % p).collect();
        prop_assert!(s.len() as u64 >= p.min((a.len() + b.len()) as u64 - 1));
        let r = kneser_mod(&a, p).unwrap();
        prop_assert!(r.stable && r.maximal && r.bound_ok);
        prop_assert!(r.h_order == 1 || r.h_order == p);
    }

    #[test]
    fn kneser_mod_stabilizer(n in 1u64..60, a in prop::collection::vec(0u64..200, 1..10)) {
        let r = kneser_mod(&IntSet::new(a), n).unwrap();
        prop_assert!(r.stable && r.maximal && r.bound_ok);
        prop_assert_eq!(n % r.h_generator, 0);
    }

    #[test]
    fn genus_is_translation_invariant(mi in 0usize..4, gens in prop::collection::vec((coeffs(3), coeffs(1)), 1..5), t in (coeffs(3), coeffs(2))) {
        let m = &models()[mi];
        let mut es: Vec<FFElem> = gens.iter().map(|(a, b)| elem(m, a, b)).collect();
        es.push(m.one());
        let s = KSubspace::span(m, &es);
        let u = elem(m, &t.0, &t.1);
        prop_assume!(!u.is_zero());
        prop_assert_eq!(combinatorial_genus(&s).unwrap(), combinatorial_genus(&s.translate(&u)).unwrap());
    }

    #[test]
    fn filtered_basis_and_pivot(mi in 0usize..4, gens in prop::collection::vec((coeffs(5), coeffs(2)), 1..5)) {
        let m = &models()[mi];
        let mut es: Vec<FFElem> = gens.iter().map(|(a, b)| elem(m, a, b)).collect();
        es.push(m.one());
        let s = KSubspace::span(m, &es);
        prop_assume!(s.dim() >= 2);
        let q = fflab_core::places::infinity(m);
        let f = filtered_with_valuations(&s, &q).unwrap();
        prop_assert_eq!(f.len(), s.dim());
        prop_assert!(f.windows(2).all(|w| w[0].0 > w[1].0));
        let d = minimal_divisor(&s).unwrap();
        match select_pivot(&s) {
            Ok(p) => {
                prop_assert!(p.pole_divisor_ok);
                prop_assert_eq!(&p.divisor, &d);
                prop_assert!(s.contains(&p.w));
            }
            Err(e) => prop_assert!(matches!(e, fflab_core::Error::Exhausted(_))),
        }
    }

    #[test]
    fn monomials_are_independent(a in prop::collection::btree_set(0u64..30, 1..12)) {
        let set = IntSet::new(a);
        let r = monomial_bridge(&set, BaseField::prime(101).unwrap(), true).unwrap();
        let (norm, _) = set.normalize();
        prop_assert_eq!(r.dim_s, norm.len());
        prop_assert_eq!(r.dim_s2, sumset(&norm, &norm).len());
        prop_assert!(r.consistent);
    }
}
