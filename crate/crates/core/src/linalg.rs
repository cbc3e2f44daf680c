//! Exact linear algebra over the rationals, plus linear systems whose
//! coefficients are rational and whose right-hand sides are Laurent
//! polynomials.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

/// Reduced row echelon form built one vector at a time.
#[derive(Clone, Debug, Default)]
pub struct Span {
    /// pivot column -> normalized row with a 1 at the pivot
    rows: BTreeMap<usize, Vec<Rational>>,
    width: usize,
}

impl Span {
    pub fn new(width: usize) -> Self {
        Self { rows: BTreeMap::new(), width }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current rows; the remainder is zero iff `v` is in the span.
    pub fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.width);
        let mut r = v.to_vec();
        for (&pivot, row) in &self.rows {
            if r[pivot].is_zero() {
                continue;
            }
            let f = r[pivot].clone();
            for (x, y) in r.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v`; returns `true` if it enlarged the span.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        let mut r = self.reduce(v);
        let Some(pivot) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[pivot].recip();
        for x in r.iter_mut() {
            *x *= &inv;
        }
        for row in self.rows.values_mut() {
            if row[pivot].is_zero() {
                continue;
            }
            let f = row[pivot].clone();
            for (x, y) in row.iter_mut().zip(&r) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.rows.insert(pivot, r);
        true
    }
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let mut span = Span::new(first.len());
    for r in rows {
        span.insert(r);
    }
    span.dim()
}

/// Basis of `{x : A x = 0}` for `A` given by rows of length `width`.
pub fn nullspace(rows: &[Vec<Rational>], width: usize) -> Vec<Vec<Rational>> {
    let mut span = Span::new(width);
    for r in rows {
        span.insert(r);
    }
    let pivots: Vec<usize> = span.rows.keys().copied().collect();
    (0..width)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut x = vec![Rational::zero(); width];
            x[free] = Rational::one();
            for (&p, row) in &span.rows {
                x[p] = -row[free].clone();
            }
            x
        })
        .collect()
}

/// Determinant by Gaussian elimination.
pub fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Rational::zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= &a[col][col];
        let inv = a[col][col].recip();
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] * &inv;
            for c in col..n {
                let sub = &f * &a[col][c];
                a[r][c] -= sub;
            }
        }
    }
    det
}

/// Sign pattern of a symmetric rational matrix: `Some(true)` positive definite,
/// `Some(false)` negative definite, `None` otherwise (leading principal minors).
pub fn definiteness(m: &[Vec<Rational>]) -> Option<bool> {
    let n = m.len();
    let minors: Vec<Rational> = (1..=n)
        .map(|k| determinant(&m[..k].iter().map(|r| r[..k].to_vec()).collect::<Vec<_>>()))
        .collect();
    if minors.iter().all(Signed::is_positive) {
        Some(true)
    } else if minors.iter().enumerate().all(|(k, d)| if k % 2 == 0 { d.is_negative() } else { d.is_positive() }) {
        Some(false)
    } else {
        None
    }
}

/// `A t = b` with rational `A` and Laurent `b`, solved power by power.
#[derive(Clone, Debug)]
pub struct LaurentSystem {
    width: usize,
    rows: Vec<(BTreeMap<usize, Rational>, Scalar)>,
}

/// Solution set `particular + span(nullspace)` of a consistent system.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSolution {
    pub particular: Vec<Scalar>,
    pub nullspace: Vec<Vec<Rational>>,
}

impl LaurentSystem {
    pub fn new(width: usize) -> Self {
        Self { width, rows: Vec::new() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Adds `sum_c coeffs[c] t_c = rhs`. Coefficients must be constant.
    pub fn push(&mut self, coeffs: &BTreeMap<usize, Scalar>, rhs: Scalar) -> Result<()> {
        let mut row = BTreeMap::new();
        for (&c, v) in coeffs {
            assert!(c < self.width);
            if v.is_zero() {
                continue;
            }
            let k = v.as_constant().ok_or_else(|| Error::NonConstantCoefficient(v.to_string()))?;
            row.insert(c, k);
        }
        if row.is_empty() && rhs.is_zero() {
            return Ok(());
        }
        self.rows.push((row, rhs));
        Ok(())
    }

    /// `None` if the system is inconsistent.
    pub fn solve(&self) -> Option<LaurentSolution> {
        let powers: Vec<i32> = {
            let mut p: Vec<i32> = self.rows.iter().flat_map(|(_, b)| b.terms().map(|(k, _)| k)).collect();
            p.sort_unstable();
            p.dedup();
            p
        };
        // augmented columns: unknowns, then one column per power of l
        let total = self.width + powers.len();
        let mut span = Span::new(total);
        for (row, rhs) in &self.rows {
            let mut dense = vec![Rational::zero(); total];
            for (&c, v) in row {
                dense[c] = v.clone();
            }
            for (slot, &k) in powers.iter().enumerate() {
                dense[self.width + slot] = rhs.coefficient(k);
            }
            span.insert(&dense);
        }
        if span.rows.keys().any(|&p| p >= self.width) {
            return None;
        }
        let mut particular = vec![Scalar::zero(); self.width];
        for (&pivot, row) in &span.rows {
            for (slot, &k) in powers.iter().enumerate() {
                let c = &row[self.width + slot];
                if !c.is_zero() {
                    particular[pivot] += Scalar::monomial(c.clone(), k);
                }
            }
        }
        let coeff_rows: Vec<Vec<Rational>> = span.rows.values().map(|r| r[..self.width].to_vec()).collect();
        Some(LaurentSolution { particular, nullspace: nullspace(&coeff_rows, self.width) })
    }
}
