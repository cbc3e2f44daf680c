//! Sparse covariant tensors in the orthonormal frame and the derivation action
//! of endomorphisms on them.
//!
//! Since the frame is orthonormal, vectors, 1-forms and endomorphisms are all
//! stored with lowered indices. A frame-constant tensor `t` is parallel for a
//! left-invariant connection iff `Omega(X) . t = 0` for every frame vector `X`.

use std::collections::BTreeMap;
use std::ops::{Add, Sub};

use crate::endo::Endo;
use crate::exterior::{KForm, Vector};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    n: usize,
    rank: usize,
    comps: BTreeMap<Vec<usize>, Scalar>,
}

impl Tensor {
    pub fn zero(n: usize, rank: usize) -> Self {
        Self { n, rank, comps: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn get(&self, idx: &[usize]) -> Scalar {
        self.comps.get(idx).cloned().unwrap_or_default()
    }

    pub fn components(&self) -> impl Iterator<Item = (&[usize], &Scalar)> {
        self.comps.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn add_at(&mut self, idx: Vec<usize>, c: Scalar) {
        debug_assert_eq!(idx.len(), self.rank);
        if c.is_zero() {
            return;
        }
        let key = idx.clone();
        let entry = self.comps.entry(idx).or_default();
        *entry += c;
        if entry.is_zero() {
            self.comps.remove(&key);
        }
    }

    pub fn from_vector(v: &Vector) -> Self {
        let mut t = Self::zero(v.dim(), 1);
        for (i, c) in v.support() {
            t.add_at(vec![i], c.clone());
        }
        t
    }

    /// `t(X, Y) = g(E X, Y)`.
    pub fn from_endo(e: &Endo) -> Self {
        let n = e.dim();
        let mut t = Self::zero(n, 2);
        for a in 0..n {
            for b in 0..n {
                t.add_at(vec![a, b], e.get(b, a).clone());
            }
        }
        t
    }

    /// Full antisymmetric expansion of a form.
    pub fn from_form(f: &KForm) -> Self {
        let mut t = Self::zero(f.dim(), f.degree());
        for (idx, c) in f.components() {
            for (perm, sign) in permutations(idx.len()) {
                let key: Vec<usize> = perm.iter().map(|&p| idx[p]).collect();
                t.add_at(key, if sign < 0 { -c.clone() } else { c.clone() });
            }
        }
        t
    }

    pub fn tensor(&self, other: &Tensor) -> Tensor {
        assert_eq!(self.n, other.n);
        let mut t = Self::zero(self.n, self.rank + other.rank);
        for (a, x) in &self.comps {
            for (b, y) in &other.comps {
                let mut key = a.clone();
                key.extend_from_slice(b);
                t.add_at(key, x * y);
            }
        }
        t
    }

    pub fn scale(&self, c: &Scalar) -> Tensor {
        let mut t = Self::zero(self.n, self.rank);
        for (k, v) in &self.comps {
            t.add_at(k.clone(), v * c);
        }
        t
    }

    /// Derivation action `(A.t)(Y_1, .., Y_r) = -sum_j t(.., A Y_j, ..)`.
    pub fn act(&self, a: &Endo) -> Tensor {
        self.act_rows(&a.sparse_rows())
    }

    pub(crate) fn act_rows(&self, rows: &[Vec<(usize, Scalar)>]) -> Tensor {
        let mut out = Self::zero(self.n, self.rank);
        for (idx, c) in &self.comps {
            for slot in 0..self.rank {
                let m = idx[slot];
                for (i, entry) in &rows[m] {
                    let mut key = idx.clone();
                    key[slot] = *i;
                    out.add_at(key, -(c * entry));
                }
            }
        }
        out
    }

    /// Restriction to index tuples with every slot in `allowed`.
    pub fn restrict(&self, allowed: &[usize]) -> Tensor {
        let mut t = Self::zero(self.n, self.rank);
        for (k, v) in &self.comps {
            if k.iter().all(|i| allowed.contains(i)) {
                t.comps.insert(k.clone(), v.clone());
            }
        }
        t
    }

    pub fn eval(&self, at: &Rational) -> crate::error::Result<BTreeMap<Vec<usize>, Rational>> {
        self.comps.iter().map(|(k, v)| Ok((k.clone(), v.eval(at)?))).collect()
    }
}

impl Add for &Tensor {
    type Output = Tensor;
    fn add(self, rhs: &Tensor) -> Tensor {
        assert_eq!((self.n, self.rank), (rhs.n, rhs.rank));
        let mut t = self.clone();
        for (k, v) in &rhs.comps {
            t.add_at(k.clone(), v.clone());
        }
        t
    }
}

impl Sub for &Tensor {
    type Output = Tensor;
    fn sub(self, rhs: &Tensor) -> Tensor {
        self + &rhs.scale(&-Scalar::one())
    }
}

/// All permutations of `0..k` with their signs.
pub(crate) fn permutations(k: usize) -> Vec<(Vec<usize>, i32)> {
    if k == 0 {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    for (perm, sign) in permutations(k - 1) {
        // insert k-1 at every position; moving it left past j entries costs (-1)^j
        for pos in 0..=perm.len() {
            let mut p = perm.clone();
            p.insert(pos, k - 1);
            let moved = perm.len() - pos;
            out.push((p, if moved % 2 == 0 { sign } else { -sign }));
        }
    }
    out
}
