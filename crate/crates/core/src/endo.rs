//! Endomorphisms of the Lie algebra in the orthonormal frame, and the
//! identification of skew endomorphisms with 2-forms.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::exterior::{KForm, Vector};
use crate::scalar::{Rational, Scalar};

/// Square matrix with `A e_j = sum_i A[i][j] e_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Endo {
    n: usize,
    m: Vec<Scalar>,
}

impl Endo {
    pub fn zero(n: usize) -> Self {
        Self { n, m: vec![Scalar::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut e = Self::zero(n);
        for i in 0..n {
            e.set(i, i, Scalar::one());
        }
        e
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut m = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                m.push(f(i, j));
            }
        }
        Self { n, m }
    }

    /// The rank-one map `X -> a(X) v`.
    pub fn outer(a: &KForm, v: &Vector) -> Self {
        assert_eq!(a.degree(), 1);
        let n = v.dim();
        let mut e = Self::zero(n);
        for (idx, c) in a.components() {
            for (i, vi) in v.support() {
                e.add_at(i, idx[0], &(c * vi));
            }
        }
        e
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.m[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.m[i * self.n + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &Scalar) {
        self.m[i * self.n + j] += v;
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().all(Scalar::is_zero)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone())
    }

    pub fn is_skew(&self) -> bool {
        (0..self.n).all(|i| (i..self.n).all(|j| (self.get(i, j) + self.get(j, i)).is_zero()))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        Self { n: self.n, m: self.m.iter().map(|x| x * c).collect() }
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        assert_eq!(v.dim(), self.n);
        let mut out = Vector::zero(self.n);
        for (j, vj) in v.support() {
            for i in 0..self.n {
                let a = self.get(i, j);
                if !a.is_zero() {
                    out.0[i] += a * vj;
                }
            }
        }
        out
    }

    /// Image of the basis vector `e_j`.
    pub fn column(&self, j: usize) -> Vector {
        Vector((0..self.n).map(|i| self.get(i, j).clone()).collect())
    }

    pub fn commutator(&self, other: &Endo) -> Endo {
        &(self * other) - &(other * self)
    }

    pub fn trace(&self) -> Scalar {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    /// `rows[m]` lists the nonzero `(i, A[m][i])`.
    pub fn sparse_rows(&self) -> Vec<Vec<(usize, Scalar)>> {
        (0..self.n)
            .map(|m| {
                (0..self.n)
                    .filter_map(|i| {
                        let a = self.get(m, i);
                        (!a.is_zero()).then(|| (i, a.clone()))
                    })
                    .collect()
            })
            .collect()
    }

    /// Entries flattened row-major and evaluated at `l = at`.
    pub fn eval_flat(&self, at: &Rational) -> Result<Vec<Rational>> {
        self.m.iter().map(|c| c.eval(at)).collect()
    }

    /// Restriction to the span of the given frame indices, as a square block.
    pub fn block(&self, idx: &[usize]) -> Endo {
        Endo::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]).clone())
    }

    /// `true` if the span of the frame vectors `idx` is mapped into itself.
    pub fn preserves(&self, idx: &[usize]) -> bool {
        idx.iter().all(|&j| (0..self.n).filter(|i| !idx.contains(i)).all(|i| self.get(i, j).is_zero()))
    }
}

impl Add for &Endo {
    type Output = Endo;
    fn add(self, rhs: &Endo) -> Endo {
        assert_eq!(self.n, rhs.n);
        Endo { n: self.n, m: self.m.iter().zip(&rhs.m).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Endo {
    type Output = Endo;
    fn sub(self, rhs: &Endo) -> Endo {
        assert_eq!(self.n, rhs.n);
        Endo { n: self.n, m: self.m.iter().zip(&rhs.m).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &Endo {
    type Output = Endo;
    fn neg(self) -> Endo {
        Endo { n: self.n, m: self.m.iter().map(|a| -a).collect() }
    }
}

impl Mul for &Endo {
    type Output = Endo;
    fn mul(self, rhs: &Endo) -> Endo {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = Endo::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if !b.is_zero() {
                        out.m[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for Endo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// The skew endomorphism `X -> X ⨼ a` (vectors and 1-forms identified by the metric).
pub fn two_form_endo(a: &KForm) -> Result<Endo> {
    if a.degree() != 2 {
        return Err(Error::WrongDegree { expected: 2, got: a.degree() });
    }
    let mut e = Endo::zero(a.dim());
    for (idx, c) in a.components() {
        let (i, j) = (idx[0], idx[1]);
        // e_i -> c e_j, e_j -> -c e_i
        e.add_at(j, i, c);
        e.add_at(i, j, &-c);
    }
    Ok(e)
}

/// Inverse of [`two_form_endo`].
pub fn endo_two_form(a: &Endo) -> Result<KForm> {
    if !a.is_skew() {
        return Err(Error::NotSkew);
    }
    let n = a.dim();
    let mut f = KForm::zero(n, 2);
    for i in 0..n {
        for j in i + 1..n {
            f.add_component(&[i, j], a.get(j, i).clone());
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{tau, xi};
    use crate::exterior::interior;
    use proptest::prelude::*;

    #[test]
    fn rotation_generator() {
        let n = 7;
        let r = two_form_endo(&KForm::basis(n, &[tau(1), tau(2)])).unwrap();
        assert_eq!(r.apply(&Vector::basis(n, tau(1))), Vector::basis(n, tau(2)));
        assert_eq!(r.apply(&Vector::basis(n, tau(2))), -&Vector::basis(n, tau(1)));
        assert!(r.is_skew());
        assert!(two_form_endo(&KForm::basis(n, &[1])).is_err());
        let mut bad = Endo::zero(n);
        bad.set(0, 1, Scalar::one());
        assert_eq!(endo_two_form(&bad), Err(Error::NotSkew));
    }

    #[test]
    fn action_matches_interior() {
        let n = 7;
        let a = &KForm::basis(n, &[tau(1), tau(2)]) + &KForm::basis(n, &[xi(2), xi(3)]).scale(&Scalar::int(2));
        let e = two_form_endo(&a).unwrap();
        for i in 0..n {
            let x = Vector::basis(n, i);
            let via = KForm::from_vector(&e.apply(&x));
            assert_eq!(via, interior(&x, &a).unwrap());
        }
    }

    proptest! {
        #[test]
        fn two_form_round_trip(entries in prop::collection::vec((0usize..7, 0usize..7, -3i64..4), 0..8)) {
            let mut f = KForm::zero(7, 2);
            for (i, j, c) in entries {
                f.add_component(&[i, j], Scalar::int(c) * Scalar::lambda());
            }
            let e = two_form_endo(&f).unwrap();
            prop_assert!(e.is_skew());
            prop_assert_eq!(endo_two_form(&e).unwrap(), f);
        }
    }
}
