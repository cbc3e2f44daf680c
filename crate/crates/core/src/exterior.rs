//! Vectors and alternating forms on a Lie algebra with an orthonormal frame.
//!
//! Basis `k`-forms `e^I` (strictly increasing `I`) are orthonormal and satisfy
//! `e^I(e_{i1}, .., e_{ik}) = 1`. The volume form `e^0 ^ .. ^ e^{n-1}` is
//! positive.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::algebra::QHAlgebra;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// A vector in the frame coordinates; the metric is the standard dot product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vector(pub Vec<Scalar>);

impl Vector {
    pub fn zero(n: usize) -> Self {
        Vector(vec![Scalar::zero(); n])
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.0[i] = Scalar::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Vector(self.0.iter().map(|x| x * c).collect())
    }

    pub fn dot(&self, other: &Vector) -> Scalar {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Indices and values of the nonzero coordinates.
    pub fn support(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.0.iter().enumerate().filter(|(_, c)| !c.is_zero())
    }

    pub fn eval(&self, at: &Rational) -> Result<Vec<Rational>> {
        self.0.iter().map(|c| c.eval(at)).collect()
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }
}

/// Sorts `idx` in place and returns the permutation sign, or `None` on a
/// repeated index.
pub(crate) fn sort_with_sign(idx: &mut [usize]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// An alternating form stored sparsely on increasing index tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KForm {
    n: usize,
    degree: usize,
    comps: BTreeMap<Vec<usize>, Scalar>,
}

impl KForm {
    pub fn zero(n: usize, degree: usize) -> Self {
        Self { n, degree, comps: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        let mut f = Self::zero(n, 0);
        f.add_component(&[], c);
        f
    }

    /// The basis form `e^{i1} ^ .. ^ e^{ik}` for arbitrary (unsorted) indices.
    pub fn basis(n: usize, idx: &[usize]) -> Self {
        let mut f = Self::zero(n, idx.len());
        f.add_component(idx, Scalar::one());
        f
    }

    /// The metric dual of a vector.
    pub fn from_vector(v: &Vector) -> Self {
        let mut f = Self::zero(v.dim(), 1);
        for (i, c) in v.support() {
            f.add_component(&[i], c.clone());
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (&[usize], &Scalar)> {
        self.comps.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    /// The component on `e^idx`, taking the ordering sign of `idx` into account.
    pub fn component(&self, idx: &[usize]) -> Scalar {
        let mut sorted = idx.to_vec();
        match sort_with_sign(&mut sorted) {
            Some(sign) => {
                let c = self.comps.get(&sorted).cloned().unwrap_or_default();
                if sign < 0 { -c } else { c }
            }
            None => Scalar::zero(),
        }
    }

    /// Adds `c * e^idx`; indices may be unsorted, repeated indices contribute nothing.
    pub fn add_component(&mut self, idx: &[usize], c: Scalar) {
        assert_eq!(idx.len(), self.degree, "component degree");
        assert!(idx.iter().all(|&i| i < self.n), "component index out of range");
        if c.is_zero() {
            return;
        }
        let mut sorted = idx.to_vec();
        let Some(sign) = sort_with_sign(&mut sorted) else { return };
        let c = if sign < 0 { -c } else { c };
        let entry = self.comps.entry(sorted.clone()).or_default();
        *entry += c;
        if entry.is_zero() {
            self.comps.remove(&sorted);
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero(self.n, self.degree);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.comps {
            out.comps.insert(k.clone(), v * c);
        }
        out.comps.retain(|_, v| !v.is_zero());
        out
    }

    pub fn try_add(&self, other: &KForm) -> Result<KForm> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (k, v) in &other.comps {
            out.add_component(k, v.clone());
        }
        Ok(out)
    }

    fn check_same(&self, other: &KForm) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch(self.degree, other.degree));
        }
        Ok(())
    }

    /// Evaluates the form on `degree` vectors.
    pub fn evaluate(&self, vectors: &[&Vector]) -> Scalar {
        assert_eq!(vectors.len(), self.degree);
        let mut total = Scalar::zero();
        for (idx, c) in &self.comps {
            // determinant of the minor, expanded over permutations
            total += &(c * &minor_det(vectors, idx));
        }
        total
    }

    /// Evaluates all components at `l = at`.
    pub fn eval(&self, at: &Rational) -> Result<BTreeMap<Vec<usize>, Rational>> {
        self.comps.iter().map(|(k, v)| Ok((k.clone(), v.eval(at)?))).collect()
    }
}

fn minor_det(vectors: &[&Vector], idx: &[usize]) -> Scalar {
    let k = idx.len();
    if k == 0 {
        return Scalar::one();
    }
    let mut total = Scalar::zero();
    for (col, &i) in idx.iter().enumerate() {
        let entry = &vectors[0].0[i];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = idx.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, &j)| j).collect();
        let sub = minor_det(&vectors[1..], &rest);
        let term = entry * &sub;
        if col % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    total
}

impl Add for &KForm {
    type Output = KForm;
    fn add(self, rhs: &KForm) -> KForm {
        self.try_add(rhs).expect("form addition")
    }
}

impl Sub for &KForm {
    type Output = KForm;
    fn sub(self, rhs: &KForm) -> KForm {
        self.try_add(&rhs.scale(&-Scalar::one())).expect("form subtraction")
    }
}

impl Neg for &KForm {
    type Output = KForm;
    fn neg(self) -> KForm {
        self.scale(&-Scalar::one())
    }
}

impl fmt::Display for KForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .comps
            .iter()
            .map(|(idx, c)| {
                let name: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
                format!("({c})*e{}", name.join("^e"))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Exterior product.
pub fn wedge(a: &KForm, b: &KForm) -> Result<KForm> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { expected: a.n, got: b.n });
    }
    let mut out = KForm::zero(a.n, a.degree + b.degree);
    if a.degree + b.degree > a.n {
        return Ok(out);
    }
    for (i, ca) in &a.comps {
        for (j, cb) in &b.comps {
            if i.iter().any(|x| j.contains(x)) {
                continue;
            }
            let mut idx = i.clone();
            idx.extend_from_slice(j);
            out.add_component(&idx, ca * cb);
        }
    }
    Ok(out)
}

/// Wedge of several forms, left to right.
pub fn wedge_all(forms: &[&KForm]) -> Result<KForm> {
    let (first, rest) = forms.split_first().expect("at least one form");
    rest.iter().try_fold((*first).clone(), |acc, f| wedge(&acc, f))
}

/// Interior product `X ⨼ a`.
pub fn interior(x: &Vector, a: &KForm) -> Result<KForm> {
    if x.dim() != a.n {
        return Err(Error::DimensionMismatch { expected: a.n, got: x.dim() });
    }
    if a.degree == 0 {
        return Err(Error::WrongDegree { expected: 1, got: 0 });
    }
    let mut out = KForm::zero(a.n, a.degree - 1);
    for (idx, c) in &a.comps {
        for (pos, &i) in idx.iter().enumerate() {
            let xi = &x.0[i];
            if xi.is_zero() {
                continue;
            }
            let rest: Vec<usize> = idx.iter().enumerate().filter(|(p, _)| *p != pos).map(|(_, &j)| j).collect();
            let term = c * xi;
            out.add_component(&rest, if pos % 2 == 0 { term } else { -term });
        }
    }
    Ok(out)
}

/// Hodge star for the orientation `e^0 ^ .. ^ e^{n-1}`.
pub fn hodge_star(a: &KForm) -> KForm {
    let n = a.n;
    let mut out = KForm::zero(n, n - a.degree);
    for (idx, c) in &a.comps {
        let complement: Vec<usize> = (0..n).filter(|i| !idx.contains(i)).collect();
        let mut full = idx.clone();
        full.extend_from_slice(&complement);
        let sign = sort_with_sign(&mut full).expect("disjoint");
        out.add_component(&complement, if sign < 0 { -c.clone() } else { c.clone() });
    }
    out
}

/// The volume form.
pub fn volume(n: usize) -> KForm {
    KForm::basis(n, &(0..n).collect::<Vec<_>>())
}

/// Inner product for which the basis forms are orthonormal.
pub fn form_inner(a: &KForm, b: &KForm) -> Result<Scalar> {
    a.check_same(b)?;
    Ok(a.comps.iter().filter_map(|(k, v)| b.comps.get(k).map(|w| v * w)).sum())
}

/// Chevalley–Eilenberg differential of a left-invariant form.
///
/// On 1-forms `da(X, Y) = -a([X, Y])`; extended as an antiderivation.
pub fn ce_differential(a: &KForm, alg: &QHAlgebra) -> Result<KForm> {
    if a.n != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), got: a.n });
    }
    let mut out = KForm::zero(a.n, a.degree + 1);
    for (idx, c) in &a.comps {
        for (pos, &m) in idx.iter().enumerate() {
            let dm = alg.d_basis(m);
            for (pair, v) in dm.components() {
                // antiderivation sign (-1)^pos; the 2-form commutes to the front
                let mut full: Vec<usize> = pair.to_vec();
                full.extend(idx.iter().enumerate().filter(|(p, _)| *p != pos).map(|(_, &j)| j));
                let term = c * v;
                out.add_component(&full, if pos % 2 == 0 { term } else { -term });
            }
        }
    }
    Ok(out)
}

/// Derivation action of an endomorphism on a form, `(A.a)(Y..) = -sum a(.., AY, ..)`.
///
/// For a skew `A` this is the infinitesimal action of the rotation `exp(tA)`.
pub fn act_on_form(a_endo: &crate::endo::Endo, a: &KForm) -> KForm {
    let rows = a_endo.sparse_rows();
    let mut out = KForm::zero(a.n, a.degree);
    for (idx, c) in &a.comps {
        for (pos, &m) in idx.iter().enumerate() {
            for (i, entry) in &rows[m] {
                let mut next = idx.clone();
                next[pos] = *i;
                out.add_component(&next, -(c * entry));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{tau, xi, QHAlgebra};
    use proptest::prelude::*;

    fn e(n: usize, idx: &[usize]) -> KForm {
        KForm::basis(n, idx)
    }

    #[test]
    fn wedge_basics() {
        let n = 7;
        let t12 = wedge(&e(n, &[tau(1)]), &e(n, &[tau(2)])).unwrap();
        assert_eq!(t12, e(n, &[tau(1), tau(2)]));
        assert!(wedge(&t12, &e(n, &[tau(1)])).unwrap().is_zero());
        assert!(wedge(&t12, &KForm::basis(5, &[0])).is_err());
        let sum = &e(n, &[tau(1), tau(2)]) + &e(n, &[tau(3), tau(4)]);
        let w = wedge(&e(n, &[xi(1)]), &sum).unwrap();
        assert_eq!(w.component(&[xi(1), tau(1), tau(2)]), Scalar::one());
        assert_eq!(w.component(&[xi(1), tau(3), tau(4)]), Scalar::one());
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn interior_basics() {
        let n = 7;
        let t12 = e(n, &[tau(1), tau(2)]);
        let r = interior(&Vector::basis(n, tau(1)), &t12).unwrap();
        assert_eq!(r, e(n, &[tau(2)]));
        assert!(interior(&Vector::basis(n, xi(1)), &t12).unwrap().is_zero());
        assert!(interior(&Vector::basis(n, 0), &KForm::constant(n, Scalar::one())).is_err());

        let alg = QHAlgebra::build(1).unwrap();
        let d1 = ce_differential(&e(n, &[xi(1)]), &alg).unwrap();
        let r = interior(&Vector::basis(n, tau(1)), &d1).unwrap();
        assert_eq!(r, e(n, &[tau(2)]).scale(&-Scalar::lambda()));
    }

    #[test]
    fn hodge_basics() {
        let n = 7;
        assert_eq!(hodge_star(&volume(n)), KForm::constant(n, Scalar::one()));
        assert_eq!(hodge_star(&KForm::constant(n, Scalar::one())), volume(n));
        let a = e(n, &[0, 3, 5]);
        assert_eq!(hodge_star(&hodge_star(&a)), a);
        // a ^ *a = |a|^2 vol
        let b = &e(n, &[1, 2, 6]) + &e(n, &[0, 3, 5]).scale(&Scalar::int(2));
        assert_eq!(wedge(&b, &hodge_star(&b)).unwrap(), volume(n).scale(&Scalar::int(5)));
    }

    #[test]
    fn form_inner_basics() {
        let n = 7;
        assert_eq!(form_inner(&e(n, &[3, 4]), &e(n, &[3, 4])).unwrap(), Scalar::one());
        assert_eq!(form_inner(&e(n, &[3, 4]), &e(n, &[4, 3])).unwrap(), -Scalar::one());
        assert!(form_inner(&e(n, &[3, 4]), &e(n, &[3])).is_err());
    }

    #[test]
    fn evaluate_matches_determinant() {
        let n = 4;
        let f = e(n, &[0, 1]);
        let x = Vector(vec![Scalar::int(1), Scalar::int(2), Scalar::zero(), Scalar::zero()]);
        let y = Vector(vec![Scalar::int(3), Scalar::int(4), Scalar::zero(), Scalar::zero()]);
        assert_eq!(f.evaluate(&[&x, &y]), Scalar::int(-2));
    }

    #[test]
    fn d_squared_vanishes() {
        for p in 1..=3 {
            let alg = QHAlgebra::build(p).unwrap();
            let n = alg.dim();
            for deg in 1..=3usize.min(n) {
                for idx in combinations(n, deg) {
                    let f = e(n, &idx);
                    let dd = ce_differential(&ce_differential(&f, &alg).unwrap(), &alg).unwrap();
                    assert!(dd.is_zero(), "d^2 e{idx:?} != 0 for p={p}");
                }
            }
        }
    }

    pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(i + 1, n, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(0, n, k, &mut Vec::new(), &mut out);
        out
    }

    fn arb_form(n: usize, deg: usize) -> impl Strategy<Value = KForm> {
        prop::collection::vec((prop::collection::vec(0..n, deg), -3i64..4), 0..5).prop_map(move |terms| {
            let mut f = KForm::zero(n, deg);
            for (idx, c) in terms {
                f.add_component(&idx, Scalar::int(c) * Scalar::lambda().pow((c.unsigned_abs() % 2) as u32));
            }
            f
        })
    }

    fn arb_vector(n: usize) -> impl Strategy<Value = Vector> {
        prop::collection::vec(-2i64..3, n).prop_map(|v| Vector(v.into_iter().map(Scalar::int).collect()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn wedge_associative_graded(a in arb_form(7, 1), b in arb_form(7, 2), c in arb_form(7, 2)) {
            let ab_c = wedge(&wedge(&a, &b).unwrap(), &c).unwrap();
            let a_bc = wedge(&a, &wedge(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(&ab_c, &a_bc);
            let ab = wedge(&a, &b).unwrap();
            let ba = wedge(&b, &a).unwrap();
            prop_assert_eq!(ab, ba);
            let aa = wedge(&a, &a).unwrap();
            prop_assert!(aa.is_zero());
        }

        #[test]
        fn hodge_is_isometry(a in arb_form(7, 3), b in arb_form(7, 3)) {
            prop_assert_eq!(form_inner(&hodge_star(&a), &hodge_star(&b)).unwrap(), form_inner(&a, &b).unwrap());
            prop_assert_eq!(hodge_star(&hodge_star(&a)), a);
        }

        #[test]
        fn hodge_sign_even_dim(a in arb_form(6, 3)) {
            // k(n-k) = 9 is odd
            prop_assert_eq!(hodge_star(&hodge_star(&a)), -&a);
        }

        #[test]
        fn interior_antiderivation(x in arb_vector(7), a in arb_form(7, 2), b in arb_form(7, 3)) {
            let lhs = interior(&x, &wedge(&a, &b).unwrap()).unwrap();
            let rhs = &wedge(&interior(&x, &a).unwrap(), &b).unwrap()
                + &wedge(&a, &interior(&x, &b).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn d_antiderivation(a in arb_form(7, 1), b in arb_form(7, 2)) {
            let alg = QHAlgebra::build(1).unwrap();
            let lhs = ce_differential(&wedge(&a, &b).unwrap(), &alg).unwrap();
            let rhs = &wedge(&ce_differential(&a, &alg).unwrap(), &b).unwrap()
                - &wedge(&a, &ce_differential(&b, &alg).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
