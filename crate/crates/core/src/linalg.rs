//! Exact Gauss-Jordan elimination over `K` and over `K(x)`.
//!
//! Both eliminations return the reduced row-echelon form with unit pivots,
//! which is unique for a given row space. Over `K(x)` the work is done
//! fraction-free on polynomial rows and divided out only at the end.

use crate::field::{BaseField, Scalar};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon<T> {
    pub rank: usize,
    pub rows: Vec<Vec<T>>,
    pub pivots: Vec<usize>,
}

pub fn rref_k(k: BaseField, rows: &[Vec<Scalar>]) -> Echelon<Scalar> {
    let mut m = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..ncols {
        let Some(i) = (r..m.len()).find(|&i| !k.is_zero(&m[i][c])) else {
            continue;
        };
        m.swap(r, i);
        let inv = k.inv(&m[r][c]).unwrap();
        for e in m[r].iter_mut() {
            *e = k.mul(e, &inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || k.is_zero(&row[c]) {
                continue;
            }
            let f = row[c].clone();
            for (e, p) in row.iter_mut().zip(&pivot_row) {
                if !k.is_zero(p) {
                    *e = k.sub(e, &k.mul(&f, p));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    Echelon { rank: r, rows: m, pivots }
}

/// Reduce `v` modulo the row space of a reduced echelon form.
pub fn residual_k(k: BaseField, e: &Echelon<Scalar>, v: &[Scalar]) -> Vec<Scalar> {
    let mut out = v.to_vec();
    for (row, &p) in e.rows.iter().zip(&e.pivots) {
        let f = out[p].clone();
        if k.is_zero(&f) {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            if !k.is_zero(r) {
                *o = k.sub(o, &k.mul(&f, r));
            }
        }
    }
    out
}

/// Canonical basis of `{v : M v = 0}` where `M` has `ncols` columns.
pub fn nullspace_k(k: BaseField, rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let e = rref_k(k, rows);
    let vecs: Vec<Vec<Scalar>> = (0..ncols)
        .filter(|c| !e.pivots.contains(c))
        .map(|f| {
            let mut v = vec![k.zero(); ncols];
            v[f] = k.one();
            for (row, &p) in e.rows.iter().zip(&e.pivots) {
                v[p] = k.neg(&row[f]);
            }
            v
        })
        .collect();
    rref_k(k, &vecs).rows
}

/// Canonical basis of the coefficient vectors `c` with `sum c_i rows_i = 0`.
pub fn left_kernel_k(k: BaseField, rows: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let t: Vec<Vec<Scalar>> = (0..ncols).map(|c| rows.iter().map(|r| r[c].clone()).collect()).collect();
    if t.is_empty() {
        // No columns: every combination vanishes.
        let n = rows.len();
        return (0..n)
            .map(|i| (0..n).map(|j| if i == j { k.one() } else { k.zero() }).collect())
            .collect();
    }
    nullspace_k(k, &t, rows.len())
}

/// Divide a polynomial row by the gcd of its entries and, over `Q`, by its
/// scalar content.
fn normalize_row(row: &mut [Poly]) {
    let Some(first) = row.iter().find(|p| !p.is_zero()) else {
        return;
    };
    let k = first.field();
    let g = row.iter().fold(Poly::zero(k), |acc, p| Poly::gcd(&acc, p));
    if !g.is_one() {
        for p in row.iter_mut() {
            *p = p.div_exact(&g).unwrap();
        }
    }
    if matches!(k, BaseField::Rationals) {
        // Scale so the concatenated coefficients form a primitive integer vector.
        let mut all: Vec<Scalar> = vec![];
        for p in row.iter() {
            all.extend(p.coeffs().iter().cloned());
        }
        let joined = Poly::new(k, all);
        let prim = joined.primitive();
        let (a, b) = (joined.lc().unwrap(), prim.lc().unwrap());
        let s = k.div(b, a).unwrap();
        if !k.is_one(&s) {
            for p in row.iter_mut() {
                *p = p.scale(&s);
            }
        }
    }
}

fn clear_row(k: BaseField, row: &[RatFunc]) -> Vec<Poly> {
    let d = row.iter().fold(Poly::one(k), |acc, r| Poly::lcm(&acc, r.den()));
    row.iter().map(|r| r.num() * &d.div_exact(r.den()).unwrap()).collect()
}

pub fn rref_kx(k: BaseField, rows: &[Vec<RatFunc>]) -> Echelon<RatFunc> {
    let mut m: Vec<Vec<Poly>> = rows.iter().map(|r| clear_row(k, r)).collect();
    for r in m.iter_mut() {
        normalize_row(r);
    }
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..ncols {
        let Some(i) = (r..m.len())
            .filter(|&i| !m[i][c].is_zero())
            .min_by_key(|&i| (m[i][c].deg(), i))
        else {
            continue;
        };
        m.swap(r, i);
        let pivot_row = m[r].clone();
        let p = &pivot_row[c];
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let g = Poly::gcd(p, &row[c]);
            let a = p.div_exact(&g).unwrap();
            let b = row[c].div_exact(&g).unwrap();
            for (e, pe) in row.iter_mut().zip(&pivot_row) {
                *e = &(&a * e) - &(&b * pe);
            }
            normalize_row(row);
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    let rows = m
        .into_iter()
        .zip(&pivots)
        .map(|(row, &p)| {
            let piv = row[p].clone();
            row.into_iter().map(|e| RatFunc::new(e, piv.clone()).unwrap()).collect()
        })
        .collect();
    Echelon { rank: r, rows, pivots }
}

pub fn residual_kx(e: &Echelon<RatFunc>, v: &[RatFunc]) -> Vec<RatFunc> {
    let mut out = v.to_vec();
    for (row, &p) in e.rows.iter().zip(&e.pivots) {
        let f = out[p].clone();
        if f.is_zero() {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            if !r.is_zero() {
                *o = &*o - &(&f * r);
            }
        }
    }
    out
}

pub fn nullspace_kx(k: BaseField, rows: &[Vec<RatFunc>], ncols: usize) -> Vec<Vec<RatFunc>> {
    let e = rref_kx(k, rows);
    let vecs: Vec<Vec<RatFunc>> = (0..ncols)
        .filter(|c| !e.pivots.contains(c))
        .map(|f| {
            let mut v = vec![RatFunc::zero(k); ncols];
            v[f] = RatFunc::one(k);
            for (row, &p) in e.rows.iter().zip(&e.pivots) {
                v[p] = -&row[f];
            }
            v
        })
        .collect();
    rref_kx(k, &vecs).rows
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KxSolution {
    Unique(Vec<RatFunc>),
    Inconsistent,
    /// `particular + span(kernel)`.
    Family { particular: Vec<RatFunc>, kernel: Vec<Vec<RatFunc>> },
}

/// Solve `A s = b` over `K(x)`.
pub fn solve_kx(k: BaseField, a: &[Vec<RatFunc>], b: &[RatFunc]) -> KxSolution {
    let ncols = a.first().map_or(0, Vec::len);
    let aug: Vec<Vec<RatFunc>> =
        a.iter().zip(b).map(|(row, bi)| row.iter().cloned().chain([bi.clone()]).collect()).collect();
    let e = rref_kx(k, &aug);
    if e.pivots.last() == Some(&ncols) {
        return KxSolution::Inconsistent;
    }
    let mut particular = vec![RatFunc::zero(k); ncols];
    for (row, &p) in e.rows.iter().zip(&e.pivots) {
        particular[p] = row[ncols].clone();
    }
    let kernel = nullspace_kx(k, a, ncols);
    if kernel.is_empty() {
        KxSolution::Unique(particular)
    } else {
        KxSolution::Family { particular, kernel }
    }
}

/// `A v` over `K(x)`.
pub fn mat_vec_kx(k: BaseField, a: &[Vec<RatFunc>], v: &[RatFunc]) -> Vec<RatFunc> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(RatFunc::zero(k), |acc, (x, y)| &acc + &(x * y)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> BaseField {
        BaseField::rationals()
    }

    fn qrow(v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&a| q().from_i64(a)).collect()
    }

    fn rf(num: &[i64], den: &[i64]) -> RatFunc {
        RatFunc::new(Poly::from_i64s(q(), num), Poly::from_i64s(q(), den)).unwrap()
    }

    fn poly(c: &[i64]) -> RatFunc {
        rf(c, &[1])
    }

    #[test]
    fn rref_k_examples() {
        let e = rref_k(q(), &[qrow(&[2, 4]), qrow(&[1, 2])]);
        assert_eq!((e.rank, e.rows), (1, vec![qrow(&[1, 2])]));
        let id = vec![qrow(&[1, 0, 0]), qrow(&[0, 1, 0]), qrow(&[0, 0, 1])];
        assert_eq!(rref_k(q(), &id).rows, id);
        let e = rref_k(q(), &[qrow(&[1, 1]), qrow(&[1, 2]), qrow(&[0, 1])]);
        assert_eq!((e.rank, e.rows), (2, vec![qrow(&[1, 0]), qrow(&[0, 1])]));
    }

    #[test]
    fn rref_kx_examples() {
        let e = rref_kx(q(), &[vec![poly(&[0, 1]), poly(&[0, 0, 1])], vec![poly(&[1]), poly(&[0, 1])]]);
        assert_eq!((e.rank, e.rows), (1, vec![vec![poly(&[1]), poly(&[0, 1])]]));
        let e = rref_kx(q(), &[vec![poly(&[1]), poly(&[])], vec![poly(&[]), poly(&[0, 1])]]);
        assert_eq!((e.rank, e.rows), (2, vec![vec![poly(&[1]), poly(&[])], vec![poly(&[]), poly(&[1])]]));
        // x/(x+1) * (x+1)/x = 1, so the rows are proportional.
        let e = rref_kx(q(), &[vec![rf(&[0, 1], &[1, 1]), poly(&[1])], vec![poly(&[1]), rf(&[1, 1], &[0, 1])]]);
        assert_eq!(e.rank, 1);
        assert_eq!(e.rows[0][1], rf(&[1, 1], &[0, 1]));
    }

    #[test]
    fn solve_kx_examples() {
        assert_eq!(solve_kx(q(), &[vec![poly(&[1])]], &[poly(&[0, 1])]), KxSolution::Unique(vec![poly(&[0, 1])]));
        match solve_kx(q(), &[vec![poly(&[0, 1]), poly(&[-1])]], &[poly(&[])]) {
            KxSolution::Family { kernel, .. } => assert_eq!(kernel, vec![vec![poly(&[1]), poly(&[0, 1])]]),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            solve_kx(q(), &[vec![poly(&[1])], vec![poly(&[1])]], &[poly(&[0]), poly(&[1])]),
            KxSolution::Inconsistent
        );
    }

    #[test]
    fn generic_system_over_f7_checked_by_residual() {
        let k = BaseField::prime(7).unwrap();
        let p = |c: &[i64]| RatFunc::from(Poly::from_i64s(k, c));
        let a = vec![vec![p(&[1, 2]), p(&[3, 0, 1])], vec![p(&[5]), p(&[0, 1, 1])]];
        let b = vec![p(&[1, 1]), p(&[2])];
        let KxSolution::Unique(s) = solve_kx(k, &a, &b) else { panic!() };
        assert_eq!(mat_vec_kx(k, &a, &s), b);
    }

    #[test]
    fn nullspace_and_residual() {
        let rows = vec![qrow(&[1, 2, 3]), qrow(&[2, 4, 6])];
        let ns = nullspace_k(q(), &rows, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            let dot = v.iter().zip(&rows[0]).fold(q().zero(), |acc, (a, b)| q().add(&acc, &q().mul(a, b)));
            assert!(q().is_zero(&dot));
        }
        let e = rref_k(q(), &rows);
        assert!(residual_k(q(), &e, &qrow(&[2, 4, 6])).iter().all(|s| q().is_zero(s)));
        let half = q().from_ratio(&(-1).into(), &2.into()).unwrap();
        assert_eq!(left_kernel_k(q(), &rows), vec![vec![q().one(), half]]);
    }
}
