//! Worked examples checked against oracles that do not share code paths with
//! the library: exhaustive enumeration over tiny fields, hand-rolled sumsets
//! and direct substitution of curve points.

#![allow(clippy::int_plus_one)]

use std::collections::BTreeSet;
use std::sync::Arc;

use fflab_core::additive::{freiman_3k4_verify, kneser_mod, IntSet};
use fflab_core::freiman::{
    analyze, combinatorial_genus, kneser_bound_checks, select_pivot, stabilizer_report, verify_theorem, AnalysisOptions,
    Verdict, VerifyOptions,
};
use fflab_core::json::Instance;
use fflab_core::parse::parse_elem;
use fflab_core::riemann_roch::{rr_basis, rr_dim_identities};
use fflab_core::subspace::KxSubspace;
use fflab_core::{BaseField, CurveModel, Divisor, FFElem, KSubspace, PlaceId, Poly};

fn hyper(p: u32, f: &[i64]) -> CurveModel {
    let k = BaseField::prime(p).unwrap();
    CurveModel::hyperelliptic(k, Poly::from_i64s(k, f)).unwrap()
}

fn span(m: &CurveModel, exprs: &[&str]) -> KSubspace {
    KSubspace::span(m, &exprs.iter().map(|e| parse_elem(m, e).unwrap()).collect::<Vec<_>>())
}

fn naive_sumset(a: &[u64]) -> BTreeSet<u64> {
    a.iter().flat_map(|x| a.iter().map(move |y| x + y)).collect()
}

/// All `K`-combinations of `gens` over a finite `K`, as a set of displayed elements.
fn enumerate(m: &CurveModel, gens: &[FFElem]) -> BTreeSet<String> {
    let k = m.field();
    let q = k.order().unwrap();
    let total = q.pow(gens.len() as u32);
    (0..total)
        .map(|mut idx| {
            let mut acc = m.zero();
            for g in gens {
                acc = m.add(&acc, &m.scale(g, &k.element(idx % q)));
                idx /= q;
            }
            m.display(&acc)
        })
        .collect()
}

#[test]
fn span_dimension_matches_exhaustive_count_over_f3() {
    let m = hyper(3, &[1, 2, 0, 1]);
    for exprs in [&["1", "y", "x + x*y"][..], &["1", "y", "1 + y"], &["x", "x*y", "x + 2*x*y", "x^2"]] {
        let gens: Vec<FFElem> = exprs.iter().map(|e| parse_elem(&m, e).unwrap()).collect();
        let s = KSubspace::span(&m, &gens);
        assert_eq!(enumerate(&m, &gens).len() as u128, 3u128.pow(s.dim() as u32), "{exprs:?}");
    }
}

#[test]
fn square_dimension_is_sumset_size() {
    let k = BaseField::prime(101).unwrap();
    let m = CurveModel::rational(k);
    for a in [vec![0u64, 1, 3], vec![0, 1, 2, 3, 5], vec![0, 4, 5, 9, 17], vec![0, 2, 3, 7, 8, 11]] {
        let s = KSubspace::span(&m, &a.iter().map(|&e| m.x_pow(e as usize)).collect::<Vec<_>>());
        let sum = naive_sumset(&a);
        assert_eq!(s.square().dim(), sum.len());
        assert_eq!(combinatorial_genus(&s).unwrap(), sum.len() as i64 - 2 * a.len() as i64 + 1);
    }
    let s = span(&m, &["1", "x", "x^2"]);
    assert_eq!(combinatorial_genus(&s).unwrap(), 0);
}

#[test]
fn genus1_square_flattens_to_monomials() {
    let m = hyper(101, &[1, 1, 0, 1]);
    let s = span(&m, &["1", "x", "x^2", "y"]);
    let expected = span(&m, &["1", "x", "x^2", "x^3", "x^4", "y", "x*y", "x^2*y"]);
    assert_eq!(s.square(), expected);
    assert_eq!(combinatorial_genus(&s).unwrap(), 1);
    assert_eq!(m.mul(&parse_elem(&m, "1 + y").unwrap(), &parse_elem(&m, "1 - y").unwrap()), parse_elem(&m, "-x^3 - x").unwrap());
}

#[test]
fn riemann_roch_bases_follow_the_pole_order_rule() {
    // L(n P_inf) is spanned by x^i y^j with 2i + (2g+1) j <= n, j <= 1.
    for (m, g) in [(hyper(101, &[1, 1, 0, 1]), 1usize), (hyper(31, &[2, 0, 1, 0, 0, 1]), 2)] {
        for n in 0..=12i64 {
            let l = rr_basis(&m, &Divisor::single(PlaceId::InfinityHyp, n)).unwrap();
            let count = (0..=n).filter(|i| 2 * i <= n).count() + (0..=n).filter(|i| 2 * i + 2 * g as i64 + 1 <= n).count();
            assert_eq!(l.dim, count, "g={g} n={n}");
        }
        assert!(rr_dim_identities(&m, 0..=20).unwrap().iter().all(|r| r.ok));
    }
}

#[test]
fn stabilizers_in_the_x4_tower() {
    let k = BaseField::prime(101).unwrap();
    let m = CurveModel::rational(k);
    let frame = Arc::new(m.pivot_frame(&m.x_pow(4)).unwrap());
    let kx = |es: &[&str]| KxSubspace::span_elems(frame.clone(), &es.iter().map(|e| parse_elem(&m, e).unwrap()).collect::<Vec<_>>()).unwrap();
    let st = kx(&["1", "x^2"]).stabilizer().unwrap();
    assert_eq!(st.dim(), 2);
    assert!(st.contains_elem(&m.x_pow(2)).unwrap());
    assert!(!st.contains_elem(&m.x()).unwrap());
    let u = kx(&["1", "x"]);
    let uu = u.product(&u).unwrap();
    assert_eq!(uu.dim(), 3);
    assert_eq!(uu.stabilizer().unwrap().dim(), 1);
}

#[test]
fn modular_law_on_genus1() {
    let m = hyper(101, &[1, 1, 0, 1]);
    let s = span(&m, &["1", "x", "y"]);
    let p = select_pivot(&s).unwrap();
    assert_eq!(p.w, m.y().unwrap());
    let ws = s.translate(&p.w);
    assert_eq!(s.intersect(&ws).unwrap(), span(&m, &["y"]));
    assert_eq!(s.sum(&ws).unwrap().dim(), 5);

    let l4 = span(&m, &["1", "x", "y", "x^2"]);
    let p = select_pivot(&l4).unwrap();
    let st = stabilizer_report(&l4, &p, true).unwrap();
    let b = kneser_bound_checks(&l4, &p, &st, true).unwrap();
    assert_eq!(b.dim_s_plus_ws, 7);
    assert!(b.s_cap_ws_ok);
}

#[test]
fn evaluation_values_match_point_substitution() {
    let m = hyper(101, &[1, 1, 0, 1]);
    let s = span(&m, &["1", "x", "y", "x^2"]);
    let a = analyze(&s, AnalysisOptions { assert: true, evaluation: true }).unwrap();
    let ev = a.evaluation.unwrap().unwrap();
    let k = m.field();
    let f = m.f().unwrap();
    for pt in &ev.points {
        let y = pt.y.clone().unwrap();
        assert_eq!(k.mul(&y, &y), f.eval(&pt.x), "point off the curve");
    }
    // The kernel is spanned by w - a; substituting each point into w gives a.
    let w = &a.pivot.w;
    for pt in &ev.points {
        let (x, y) = (pt.x.clone(), pt.y.clone().unwrap());
        let val = w.coords()[0].eval(&x).unwrap();
        let val = k.add(&val, &k.mul(&w.coords()[1].eval(&x).unwrap(), &y));
        assert_eq!(val, ev.fibre_a);
    }
    assert!(ev.equality && ev.kernel_ok && ev.containment_ok);
}

#[test]
fn theorem_pipeline_from_instance_text() {
    let inst = Instance::parse(
        r#"{"model": {"kind": "hyperelliptic", "field": {"char": 101}, "f": "x^3+x+1"},
            "subspace": ["1", "x", "y", "x^2"], "options": {"normalize": true, "assert": true}}"#,
    )
    .unwrap();
    let r = verify_theorem(&inst.span(), VerifyOptions { normalize: true, assert: true }).unwrap();
    assert_eq!((r.k, r.gamma, r.rr_dim, r.codim), (4, 1, 4, 0));
    assert!(r.hypothesis_met && r.genus_ok && r.codim_ok);
    assert_eq!(r.verdict, Verdict::Pass);

    let l3 = span(&inst.model, &["1", "x", "y"]);
    let r = verify_theorem(&l3, VerifyOptions { normalize: true, assert: true }).unwrap();
    assert!(!r.hypothesis_met);
    assert_eq!(r.verdict, Verdict::NotApplicable);
}

#[test]
fn classical_examples_against_enumeration() {
    for (a, met) in [(vec![0u64, 1, 2, 3, 5], true), (vec![0, 1, 3], false)] {
        let sum = naive_sumset(&a);
        assert_eq!(sum.len() as i64 - 2 * a.len() as i64 + 1 <= a.len() as i64 - 3, met);
        let r = freiman_3k4_verify(&IntSet::new(a.clone()), true).unwrap();
        assert_eq!(r.hypothesis_met, met);
    }
    assert_eq!(naive_sumset(&[0, 1, 2, 3, 5]), (0..=8).chain([10]).collect());
}

#[test]
fn kneser_mod_against_exhaustive_periods() {
    for (a, n) in [(vec![0u64, 2, 4], 6u64), (vec![0, 1], 5), (vec![0, 3, 6, 1], 9), (vec![1, 5], 8)] {
        let sum: BTreeSet<u64> = a.iter().flat_map(|x| a.iter().map(move |y| (x + y) % n)).collect();
        let h: Vec<u64> = (0..n).filter(|h| sum.iter().all(|s| sum.contains(&((s + h) % n)))).collect();
        let r = kneser_mod(&IntSet::new(a), n).unwrap();
        assert_eq!(r.h_order as usize, h.len());
        assert_eq!(r.sumset, sum.into_iter().collect::<Vec<_>>());
    }
}
