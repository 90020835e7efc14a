//! Finite-dimensional `K`-subspaces of `F` and `K(t)`-subspaces in a frame.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::linalg::{self, Echelon};
use crate::model::{CurveModel, FFElem, Frame};
use crate::poly::Poly;
use crate::ratfunc::RatFunc;

/// A `K`-subspace in canonical form: the reduced echelon basis of the
/// flattened numerators over the least common denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KSubspace {
    model: CurveModel,
    basis: Vec<FFElem>,
    common_den: Poly,
}

/// Slot layout for flattening: coordinate `j` occupies columns
/// `offsets[j] .. offsets[j] + widths[j]`, one per power of `x`.
struct Layout {
    offsets: Vec<usize>,
    widths: Vec<usize>,
}

impl Layout {
    fn new(widths: Vec<usize>) -> Self {
        let mut offsets = vec![0];
        for w in &widths[..widths.len() - 1] {
            offsets.push(offsets.last().unwrap() + w);
        }
        Layout { offsets, widths }
    }

    fn ncols(&self) -> usize {
        self.offsets.last().unwrap() + self.widths.last().unwrap()
    }
}

fn numerators(u: &FFElem, den: &Poly) -> Vec<Poly> {
    u.coords().iter().map(|c| c.num() * &den.div_exact(c.den()).unwrap()).collect()
}

fn common_den<'a>(model: &CurveModel, elems: impl IntoIterator<Item = &'a FFElem>) -> Poly {
    let k = model.field();
    elems.into_iter().flat_map(|u| u.coords()).fold(Poly::one(k), |acc, c| Poly::lcm(&acc, c.den()))
}

fn flatten(model: &CurveModel, elems: &[FFElem], den: &Poly) -> (Vec<Vec<Scalar>>, Layout) {
    let k = model.field();
    let nums: Vec<Vec<Poly>> = elems.iter().map(|u| numerators(u, den)).collect();
    let widths = (0..model.n())
        .map(|j| nums.iter().map(|v| v[j].coeffs().len()).max().unwrap_or(0))
        .collect();
    let layout = Layout::new(widths);
    let rows = nums
        .iter()
        .map(|v| {
            let mut row = vec![k.zero(); layout.ncols()];
            for (j, p) in v.iter().enumerate() {
                for (e, c) in p.coeffs().iter().enumerate() {
                    row[layout.offsets[j] + e] = c.clone();
                }
            }
            row
        })
        .collect();
    (rows, layout)
}

fn unflatten(model: &CurveModel, row: &[Scalar], layout: &Layout, den: &Poly) -> FFElem {
    let k = model.field();
    let coords = (0..model.n())
        .map(|j| {
            let o = layout.offsets[j];
            let p = Poly::new(k, row[o..o + layout.widths[j]].to_vec());
            RatFunc::new(p, den.clone()).unwrap()
        })
        .collect();
    model.elem(coords).unwrap()
}

fn check_model(a: &CurveModel, b: &CurveModel) -> Result<()> {
    if a != b {
        return Err(Error::Precondition("subspaces over different models".into()));
    }
    Ok(())
}

impl KSubspace {
    /// Canonical `K`-span of `gens`.
    pub fn span(model: &CurveModel, gens: &[FFElem]) -> KSubspace {
        let gens: Vec<FFElem> = gens.iter().filter(|u| !u.is_zero()).cloned().collect();
        let den = common_den(model, &gens);
        let (rows, layout) = flatten(model, &gens, &den);
        let e = linalg::rref_k(model.field(), &rows);
        let basis: Vec<FFElem> = e.rows.iter().map(|r| unflatten(model, r, &layout, &den)).collect();
        // The lcm over the span equals the lcm over any spanning set.
        let common_den = common_den(model, &basis);
        KSubspace { model: model.clone(), basis, common_den }
    }

    pub fn zero(model: &CurveModel) -> KSubspace {
        Self::span(model, &[])
    }

    pub fn model(&self) -> &CurveModel {
        &self.model
    }

    pub fn basis(&self) -> &[FFElem] {
        &self.basis
    }

    pub fn common_den(&self) -> &Poly {
        &self.common_den
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn contains(&self, u: &FFElem) -> bool {
        if u.is_zero() {
            return true;
        }
        let mut all = self.basis.clone();
        all.push(u.clone());
        let den = common_den(&self.model, &all);
        let (rows, _) = flatten(&self.model, &all, &den);
        linalg::rref_k(self.model.field(), &rows).rank == self.dim()
    }

    pub fn is_subspace_of(&self, o: &KSubspace) -> bool {
        self.basis.iter().all(|u| o.contains(u))
    }

    pub fn sum(&self, o: &KSubspace) -> Result<KSubspace> {
        check_model(&self.model, &o.model)?;
        let all: Vec<FFElem> = self.basis.iter().chain(&o.basis).cloned().collect();
        Ok(Self::span(&self.model, &all))
    }

    pub fn intersect(&self, o: &KSubspace) -> Result<KSubspace> {
        check_model(&self.model, &o.model)?;
        let all: Vec<FFElem> = self.basis.iter().chain(&o.basis).cloned().collect();
        let den = common_den(&self.model, &all);
        let (rows, _) = flatten(&self.model, &all, &den);
        let ker = linalg::left_kernel_k(self.model.field(), &rows);
        let elems: Vec<FFElem> = ker.iter().map(|c| self.combine(&c[..self.dim()])).collect();
        Ok(Self::span(&self.model, &elems))
    }

    /// `ST`, the span of all products.
    pub fn product(&self, o: &KSubspace) -> Result<KSubspace> {
        check_model(&self.model, &o.model)?;
        let m = &self.model;
        let mut prods = Vec::with_capacity(self.dim() * o.dim());
        for (i, s) in self.basis.iter().enumerate() {
            for (j, t) in o.basis.iter().enumerate() {
                if std::ptr::eq(self, o) && j < i {
                    continue;
                }
                prods.push(m.mul(s, t));
            }
        }
        Ok(Self::span(m, &prods))
    }

    pub fn square(&self) -> KSubspace {
        self.product(self).unwrap()
    }

    /// `u S`.
    pub fn translate(&self, u: &FFElem) -> KSubspace {
        let elems: Vec<FFElem> = self.basis.iter().map(|s| self.model.mul(u, s)).collect();
        Self::span(&self.model, &elems)
    }

    /// `sum c_i basis_i`.
    pub fn combine(&self, c: &[Scalar]) -> FFElem {
        let m = &self.model;
        self.basis.iter().zip(c).fold(m.zero(), |acc, (b, ci)| m.add(&acc, &m.scale(b, ci)))
    }

    pub fn display(&self) -> Vec<String> {
        self.basis.iter().map(|u| self.model.display(u)).collect()
    }
}

/// A `K(t)`-subspace of `F` inside a [`Frame`], stored in reduced echelon form.
#[derive(Clone, Debug)]
pub struct KxSubspace {
    frame: Arc<Frame>,
    ech: Echelon<RatFunc>,
}

impl PartialEq for KxSubspace {
    fn eq(&self, o: &Self) -> bool {
        self.frame == o.frame && self.ech.rows == o.ech.rows
    }
}

impl Eq for KxSubspace {}

/// Outcome of the three field checks on a stabilizer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldChecks {
    pub contains_one: bool,
    pub closed: bool,
    pub stabilizes: bool,
}

impl FieldChecks {
    pub fn all(&self) -> bool {
        self.contains_one && self.closed && self.stabilizes
    }
}

impl KxSubspace {
    pub fn from_rows(frame: Arc<Frame>, rows: &[Vec<RatFunc>]) -> KxSubspace {
        let ech = linalg::rref_kx(frame.field(), rows);
        KxSubspace { frame, ech }
    }

    pub fn span_elems(frame: Arc<Frame>, elems: &[FFElem]) -> Result<KxSubspace> {
        let rows = elems.iter().map(|u| frame.from_parent(u)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_rows(frame, &rows))
    }

    /// `K(t) S` in the given frame.
    pub fn span(frame: Arc<Frame>, s: &KSubspace) -> Result<KxSubspace> {
        check_model(frame.model(), s.model())?;
        Self::span_elems(frame, s.basis())
    }

    pub fn full(frame: Arc<Frame>) -> KxSubspace {
        let n = frame.n();
        let rows: Vec<Vec<RatFunc>> = (0..n)
            .map(|i| {
                let mut v = frame.zero();
                v[i] = RatFunc::one(frame.field());
                v
            })
            .collect();
        Self::from_rows(frame, &rows)
    }

    /// The coefficient field `K(t)` itself.
    pub fn base(frame: Arc<Frame>) -> KxSubspace {
        let one = frame.one();
        Self::from_rows(frame, &[one])
    }

    pub fn frame(&self) -> &Arc<Frame> {
        &self.frame
    }

    pub fn dim(&self) -> usize {
        self.ech.rank
    }

    pub fn rows(&self) -> &[Vec<RatFunc>] {
        &self.ech.rows
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.frame.n()
    }

    pub fn residual(&self, v: &[RatFunc]) -> Vec<RatFunc> {
        linalg::residual_kx(&self.ech, v)
    }

    pub fn contains(&self, v: &[RatFunc]) -> bool {
        self.residual(v).iter().all(RatFunc::is_zero)
    }

    pub fn contains_elem(&self, u: &FFElem) -> Result<bool> {
        Ok(self.contains(&self.frame.from_parent(u)?))
    }

    pub fn is_subspace_of(&self, o: &KxSubspace) -> bool {
        self.ech.rows.iter().all(|r| o.contains(r))
    }

    fn same_frame(&self, o: &KxSubspace) -> Result<()> {
        if self.frame != o.frame {
            return Err(Error::Precondition("subspaces over different frames".into()));
        }
        Ok(())
    }

    pub fn sum(&self, o: &KxSubspace) -> Result<KxSubspace> {
        self.same_frame(o)?;
        let rows: Vec<Vec<RatFunc>> = self.ech.rows.iter().chain(&o.ech.rows).cloned().collect();
        Ok(Self::from_rows(self.frame.clone(), &rows))
    }

    pub fn product(&self, o: &KxSubspace) -> Result<KxSubspace> {
        self.same_frame(o)?;
        let mut rows = vec![];
        for (i, u) in self.ech.rows.iter().enumerate() {
            for (j, v) in o.ech.rows.iter().enumerate() {
                if std::ptr::eq(self, o) && j < i {
                    continue;
                }
                rows.push(self.frame.mul(u, v));
            }
        }
        Ok(Self::from_rows(self.frame.clone(), &rows))
    }

    pub fn zero(frame: Arc<Frame>) -> KxSubspace {
        Self::from_rows(frame, &[])
    }

    pub fn intersect(&self, o: &KxSubspace) -> Result<KxSubspace> {
        self.same_frame(o)?;
        let k = self.frame.field();
        let (a, b) = (&self.ech.rows, &o.ech.rows);
        if a.is_empty() || b.is_empty() {
            return Ok(Self::zero(self.frame.clone()));
        }
        // c with sum c_i a_i + sum c'_j b_j = 0, as a right kernel of the transpose.
        let n = self.frame.n();
        let cols: Vec<Vec<RatFunc>> =
            (0..n).map(|r| a.iter().chain(b).map(|v| v[r].clone()).collect()).collect();
        let ker = linalg::nullspace_kx(k, &cols, a.len() + b.len());
        let rows: Vec<Vec<RatFunc>> = ker
            .iter()
            .map(|c| {
                a.iter().zip(c).fold(self.frame.zero(), |acc, (v, ci)| {
                    acc.iter().zip(v).map(|(x, y)| x + &(ci * y)).collect()
                })
            })
            .collect();
        Ok(Self::from_rows(self.frame.clone(), &rows))
    }

    /// `{v : v u ∈ self}` for a nonzero frame element `u`.
    pub fn quotient_by(&self, u: &[RatFunc]) -> Result<KxSubspace> {
        Ok(self.translate(&self.frame.inv(u)?))
    }

    /// `u V` for a frame element `u`.
    pub fn translate(&self, u: &[RatFunc]) -> KxSubspace {
        let rows: Vec<Vec<RatFunc>> = self.ech.rows.iter().map(|v| self.frame.mul(u, v)).collect();
        Self::from_rows(self.frame.clone(), &rows)
    }

    /// `{z in F : z V ⊆ V}`, after verifying that it contains 1, is closed
    /// under multiplication and satisfies `St(V) V = V`.
    pub fn stabilizer(&self) -> Result<KxSubspace> {
        let st = self.stabilizer_unchecked()?;
        let checks = st.field_checks(self)?;
        if !checks.all() {
            return Err(Error::Assertion(format!("stabilizer failed field checks: {checks:?}")));
        }
        Ok(st)
    }

    pub fn stabilizer_unchecked(&self) -> Result<KxSubspace> {
        if self.dim() == 0 {
            return Err(Error::Precondition("stabilizer of the zero subspace".into()));
        }
        let n = self.frame.n();
        let k = self.frame.field();
        let free: Vec<usize> = (0..n).filter(|c| !self.ech.pivots.contains(c)).collect();
        let mut constraints = vec![];
        for v in &self.ech.rows {
            let m = self.frame.mul_matrix(v);
            for &r in &free {
                let mut row = m[r].clone();
                for (brow, &p) in self.ech.rows.iter().zip(&self.ech.pivots) {
                    if brow[r].is_zero() {
                        continue;
                    }
                    for (c, e) in row.iter_mut().enumerate() {
                        *e = &*e - &(&brow[r] * &m[p][c]);
                    }
                }
                if row.iter().any(|e| !e.is_zero()) {
                    constraints.push(row);
                }
            }
        }
        let basis = if constraints.is_empty() {
            (0..n)
                .map(|i| {
                    let mut v = vec![RatFunc::zero(k); n];
                    v[i] = RatFunc::one(k);
                    v
                })
                .collect()
        } else {
            linalg::nullspace_kx(k, &constraints, n)
        };
        Ok(Self::from_rows(self.frame.clone(), &basis))
    }

    /// Field checks for `self` as the stabilizer of `v`.
    pub fn field_checks(&self, v: &KxSubspace) -> Result<FieldChecks> {
        let contains_one = self.contains(&self.frame.one());
        let mut closed = true;
        'outer: for (i, a) in self.ech.rows.iter().enumerate() {
            for b in &self.ech.rows[i..] {
                if !self.contains(&self.frame.mul(a, b)) {
                    closed = false;
                    break 'outer;
                }
            }
        }
        let stabilizes = &self.product(v)? == v;
        Ok(FieldChecks { contains_one, closed, stabilizes })
    }

    /// Basis elements mapped back to the model.
    pub fn basis_elems(&self) -> Result<Vec<FFElem>> {
        self.ech.rows.iter().map(|r| self.frame.to_parent(r)).collect()
    }

    pub fn display(&self) -> Result<Vec<String>> {
        Ok(self.basis_elems()?.iter().map(|u| self.frame.model().display(u)).collect())
    }
}

/// `S ∩ V`: elements of `S` lying in the `K(t)`-span `V`.
pub fn mixed_intersect(s: &KSubspace, v: &KxSubspace) -> Result<KSubspace> {
    check_model(s.model(), v.frame().model())?;
    let k = s.model().field();
    let frame = v.frame();
    let res = s
        .basis()
        .iter()
        .map(|u| Ok(v.residual(&frame.from_parent(u)?)))
        .collect::<Result<Vec<Vec<RatFunc>>>>()?;
    let den = res.iter().flatten().fold(Poly::one(k), |acc, c| Poly::lcm(&acc, c.den()));
    let nums: Vec<Vec<Poly>> =
        res.iter().map(|r| r.iter().map(|c| c.num() * &den.div_exact(c.den()).unwrap()).collect()).collect();
    let widths: Vec<usize> = (0..frame.n())
        .map(|j| nums.iter().map(|r| r[j].coeffs().len()).max().unwrap_or(0))
        .collect();
    let total: usize = widths.iter().sum();
    let rows: Vec<Vec<Scalar>> = nums
        .iter()
        .map(|r| {
            let mut row = Vec::with_capacity(total);
            for (j, p) in r.iter().enumerate() {
                for e in 0..widths[j] {
                    row.push(p.coeff(e));
                }
            }
            row
        })
        .collect();
    let ker = linalg::left_kernel_k(k, &rows);
    let elems: Vec<FFElem> = ker.iter().map(|c| s.combine(c)).collect();
    Ok(KSubspace::span(s.model(), &elems))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::BaseField;

    fn f101() -> BaseField {
        BaseField::prime(101).unwrap()
    }

    fn genus1() -> CurveModel {
        let k = f101();
        CurveModel::hyperelliptic(k, Poly::from_i64s(k, &[1, 1, 0, 1])).unwrap()
    }

    fn monomials(m: &CurveModel, a: &[usize]) -> KSubspace {
        KSubspace::span(m, &a.iter().map(|&e| m.x_pow(e)).collect::<Vec<_>>())
    }

    #[test]
    fn span_examples() {
        let m = CurveModel::rational(f101());
        let k = m.field();
        let two_x = m.scale(&m.x(), &k.from_i64(2));
        let s = KSubspace::span(&m, &[m.one(), m.x(), two_x]);
        assert_eq!(s.basis(), &[m.one(), m.x()]);
        let h = genus1();
        let y = h.y().unwrap();
        assert_eq!(KSubspace::span(&h, &[h.add(&h.x(), &y), h.x(), y]).dim(), 2);
        let xp1 = m.add(&m.x(), &m.one());
        let a = m.inv(&xp1).unwrap();
        let b = m.mul(&m.x(), &a);
        let s = KSubspace::span(&m, &[a, b]);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.common_den(), &Poly::from_i64s(k, &[1, 1]));
    }

    #[test]
    fn product_examples() {
        let m = CurveModel::rational(f101());
        assert_eq!(monomials(&m, &[0, 1]).square(), monomials(&m, &[0, 1, 2]));
        assert_eq!(monomials(&m, &[0, 1, 3]).square().dim(), 6);
        let h = genus1();
        let s = KSubspace::span(&h, &[h.one(), h.x(), h.x_pow(2), h.y().unwrap()]);
        let s2 = s.square();
        assert_eq!(s2.dim(), 8);
        let want: Vec<FFElem> = [(0, 0), (1, 0), (2, 0), (3, 0), (4, 0), (0, 1), (1, 1), (2, 1)]
            .iter()
            .map(|&(i, j)| h.monomial(i, j).unwrap())
            .collect();
        assert_eq!(s2, KSubspace::span(&h, &want));
    }

    #[test]
    fn lattice_examples() {
        let h = genus1();
        let y = h.y().unwrap();
        let s = KSubspace::span(&h, &[h.one(), h.x(), y.clone()]);
        assert_eq!(s.intersect(&s).unwrap(), s);
        let ws = s.translate(&y);
        assert_eq!(s.intersect(&ws).unwrap(), KSubspace::span(&h, &[y]));
        assert_eq!(s.sum(&ws).unwrap().dim(), 5);
    }

    #[test]
    fn kx_span_examples() {
        let m = CurveModel::rational(f101());
        let fr = Arc::new(m.model_frame());
        assert_eq!(KxSubspace::span(fr, &monomials(&m, &[0, 1])).unwrap().dim(), 1);
        let h = genus1();
        let fr = Arc::new(h.model_frame());
        let y = h.y().unwrap();
        let s = KSubspace::span(&h, &[h.one(), y.clone()]);
        assert_eq!(KxSubspace::span(fr.clone(), &s).unwrap().dim(), 2);
        let s = KSubspace::span(&h, &[h.one(), h.x(), y.clone(), h.mul(&h.x(), &y)]);
        assert_eq!(KxSubspace::span(fr, &s).unwrap().dim(), 2);
    }

    #[test]
    fn stabilizer_examples() {
        let h = genus1();
        let fr = Arc::new(h.model_frame());
        let full = KxSubspace::full(fr.clone());
        assert_eq!(full.stabilizer().unwrap(), full);
        let base = KxSubspace::base(fr);
        assert_eq!(base.stabilizer().unwrap(), base);

        // K(x) over K(u), u = x^4.
        let m = CurveModel::rational(f101());
        let fr = Arc::new(m.pivot_frame(&m.x_pow(4)).unwrap());
        let v = KxSubspace::span_elems(fr.clone(), &[m.one(), m.x_pow(2)]).unwrap();
        let st = v.stabilizer().unwrap();
        assert_eq!(st, v);
        assert_eq!(st.dim(), 2);
        let u = KxSubspace::span_elems(fr.clone(), &[m.one(), m.x()]).unwrap();
        let uu = u.product(&u).unwrap();
        assert_eq!(uu.dim(), 3);
        assert_eq!(uu.stabilizer().unwrap(), KxSubspace::base(fr));
        let hy = KxSubspace::full(Arc::new(h.model_frame()));
        assert_eq!(hy.product(&hy).unwrap().dim(), 2);
    }

    #[test]
    fn mixed_intersect_examples() {
        let h = genus1();
        let fr = Arc::new(h.model_frame());
        let y = h.y().unwrap();
        let s = KSubspace::span(&h, &[h.one(), h.x(), y]);
        assert_eq!(mixed_intersect(&s, &KxSubspace::full(fr.clone())).unwrap(), s);
        let base = KxSubspace::base(fr);
        assert_eq!(mixed_intersect(&s, &base).unwrap(), KSubspace::span(&h, &[h.one(), h.x()]));
    }
}
