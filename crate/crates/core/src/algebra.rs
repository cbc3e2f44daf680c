//! The quaternionic Heisenberg Lie algebra `n_p = Im(H) + H^p` with the metric
//! `g_l` for which `{xi_1, xi_2, xi_3, tau_1, .., tau_4p}` is orthonormal.
//!
//! Frame layout: positions `0..3` hold `xi_1..xi_3`, positions `3..4p+3`
//! hold `tau_1..tau_4p`.

use std::collections::BTreeMap;

use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::exterior::{ce_differential, KForm, Vector};
use crate::linalg;
use crate::scalar::{rational, Rational, Scalar};

/// Frame position of `xi_i`, `i` in `1..=3`.
pub const fn xi(i: usize) -> usize {
    i - 1
}

/// Frame position of `tau_l`, `l` in `1..=4p`.
pub const fn tau(l: usize) -> usize {
    l + 2
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QHAlgebra {
    p: usize,
    lambda: Scalar,
    /// `[e_i, e_j]` for `i < j`, nonzero entries only.
    brackets: BTreeMap<(usize, usize), Vector>,
    d_basis: Vec<KForm>,
}

impl QHAlgebra {
    /// `n_p` with the formal metric parameter.
    pub fn build(p: usize) -> Result<Self> {
        Self::with_lambda(p, Scalar::lambda())
    }

    /// `n_p` with the metric parameter set to `lambda`, either `c*l` or a
    /// positive rational constant `c`.
    pub fn with_lambda(p: usize, lambda: Scalar) -> Result<Self> {
        if p < 1 {
            return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
        }
        match lambda.as_monomial() {
            Some((c, k)) if (k == 0 || k == 1) && c > &Rational::from_integer(0.into()) => {}
            _ => return Err(Error::InvalidParameter(format!("metric parameter {lambda} is not c*l or c with c > 0"))),
        }
        let n = 4 * p + 3;
        let mut brackets = BTreeMap::new();
        let mut put = |a: usize, b: usize, center: usize| {
            let v = Vector::basis(n, xi(center)).scale(&lambda);
            if a < b {
                brackets.insert((a, b), v);
            } else {
                brackets.insert((b, a), -&v);
            }
        };
        for r in 1..=p {
            put(tau(r), tau(p + r), 1);
            put(tau(r), tau(2 * p + r), 2);
            put(tau(r), tau(3 * p + r), 3);
            put(tau(2 * p + r), tau(3 * p + r), 1);
            put(tau(3 * p + r), tau(p + r), 2);
            put(tau(p + r), tau(2 * p + r), 3);
        }
        Ok(Self::from_parts(p, lambda, brackets))
    }

    fn from_parts(p: usize, lambda: Scalar, brackets: BTreeMap<(usize, usize), Vector>) -> Self {
        let mut alg = Self { p, lambda, brackets, d_basis: Vec::new() };
        let n = alg.dim();
        alg.d_basis = (0..n)
            .map(|m| {
                let mut f = KForm::zero(n, 2);
                for ((i, j), v) in &alg.brackets {
                    if !v.0[m].is_zero() {
                        f.add_component(&[*i, *j], -v.0[m].clone());
                    }
                }
                f
            })
            .collect();
        alg
    }

    /// Copy with `[e_i, e_j]` replaced by `value` (and `[e_j, e_i] = -value`).
    pub fn with_bracket(&self, i: usize, j: usize, value: Vector) -> Self {
        let mut brackets = self.brackets.clone();
        let (key, v) = if i < j { ((i, j), value) } else { ((j, i), -&value) };
        if v.is_zero() {
            brackets.remove(&key);
        } else {
            brackets.insert(key, v);
        }
        Self::from_parts(self.p, self.lambda.clone(), brackets)
    }

    /// Same frame and metric with every bracket set to zero.
    pub fn abelianized(&self) -> Self {
        Self::from_parts(self.p, self.lambda.clone(), BTreeMap::new())
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn dim(&self) -> usize {
        4 * self.p + 3
    }

    /// The metric parameter as a scalar (formal `l` or a constant).
    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn is_formal(&self) -> bool {
        self.lambda.as_constant().is_none()
    }

    /// A value of `l` at which to specialize formal scalars for rank computations.
    pub fn sample_point(&self, which: i64) -> Rational {
        rational(which, 1)
    }

    pub fn vertical(&self) -> Vec<usize> {
        (0..3).collect()
    }

    pub fn horizontal(&self) -> Vec<usize> {
        (3..self.dim()).collect()
    }

    /// `tau_r, tau_{p+r}, tau_{2p+r}, tau_{3p+r}`: the `r`-th copy of `H`.
    pub fn quaternionic_block(&self, r: usize) -> [usize; 4] {
        let p = self.p;
        [tau(r), tau(p + r), tau(2 * p + r), tau(3 * p + r)]
    }

    pub fn basis(&self, i: usize) -> Vector {
        Vector::basis(self.dim(), i)
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> Vector {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.brackets.get(&(i, j)).cloned().unwrap_or_else(|| Vector::zero(self.dim())),
            std::cmp::Ordering::Greater => {
                self.brackets.get(&(j, i)).map(|v| -v).unwrap_or_else(|| Vector::zero(self.dim()))
            }
            std::cmp::Ordering::Equal => Vector::zero(self.dim()),
        }
    }

    pub fn bracket(&self, x: &Vector, y: &Vector) -> Vector {
        let n = self.dim();
        let mut out = Vector::zero(n);
        for ((i, j), v) in &self.brackets {
            let coeff = &(&x.0[*i] * &y.0[*j]) - &(&x.0[*j] * &y.0[*i]);
            if !coeff.is_zero() {
                out = &out + &v.scale(&coeff);
            }
        }
        out
    }

    /// Nonzero brackets `[e_i, e_j]`, `i < j`.
    pub fn nonzero_brackets(&self) -> impl Iterator<Item = (usize, usize, &Vector)> {
        self.brackets.iter().map(|((i, j), v)| (*i, *j, v))
    }

    /// `d e^m` for the frame 1-form `e^m`.
    pub fn d_basis(&self, m: usize) -> &KForm {
        &self.d_basis[m]
    }

    /// `d` of an arbitrary form; shorthand for [`ce_differential`].
    pub fn d(&self, a: &KForm) -> KForm {
        ce_differential(a, self).expect("form on this algebra")
    }

    /// The 1-form `eta_i` dual to `xi_i`.
    pub fn eta(&self, i: usize) -> KForm {
        KForm::basis(self.dim(), &[xi(i)])
    }

    /// The 1-form `theta_l` dual to `tau_l`.
    pub fn theta(&self, l: usize) -> KForm {
        KForm::basis(self.dim(), &[tau(l)])
    }

    /// Checks the Jacobi identity on basis triples; returns the first violating triple.
    pub fn jacobi_check(&self) -> std::result::Result<(), [usize; 3]> {
        let n = self.dim();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (a, b, c) = (self.basis(i), self.basis(j), self.basis(k));
                    let s1 = self.bracket(&self.bracket(&a, &b), &c);
                    let s2 = self.bracket(&self.bracket(&b, &c), &a);
                    let s3 = self.bracket(&self.bracket(&c, &a), &b);
                    if !(&(&s1 + &s2) + &s3).is_zero() {
                        return Err([i, j, k]);
                    }
                }
            }
        }
        Ok(())
    }

    /// `true` if `[[X, Y], Z] = 0` on all basis triples.
    pub fn is_two_step_nilpotent(&self) -> bool {
        let n = self.dim();
        self.brackets.values().all(|v| (0..n).all(|k| self.bracket(v, &self.basis(k)).is_zero()))
    }

    /// Dimension of the center, computed at `l = 1`.
    pub fn center_dim(&self) -> usize {
        let n = self.dim();
        let at = self.sample_point(1);
        // ad(e_i) as columns: the center is the kernel of X -> ([X, e_k])_k
        let rows: Vec<Vec<Rational>> = (0..n)
            .flat_map(|k| {
                let cols: Vec<Vec<Rational>> =
                    (0..n).map(|i| self.bracket_basis(i, k).eval(&at).expect("polynomial")).collect();
                (0..n).map(move |comp| cols.iter().map(|c| c[comp].clone()).collect::<Vec<_>>())
            })
            .collect();
        n - linalg::rank(&rows)
    }

    /// Dimension of `[n, n]`, computed at `l = 1`.
    pub fn derived_dim(&self) -> usize {
        let at = self.sample_point(1);
        let rows: Vec<Vec<Rational>> = self.brackets.values().map(|v| v.eval(&at).expect("polynomial")).collect();
        linalg::rank(&rows)
    }

    /// Left multiplication by the imaginary unit `z_a` (a = 1, 2, 3 for i, j, k)
    /// on each copy of `H` in the horizontal space.
    pub fn quaternion_left_mult(&self, a: usize) -> Endo {
        // on (1, i, j, k): i*1 = i, i*i = -1, i*j = k, i*k = -j, and so on
        let table: [[(usize, i64); 4]; 3] = [
            [(1, 1), (0, -1), (3, 1), (2, -1)],
            [(2, 1), (3, -1), (0, -1), (1, 1)],
            [(3, 1), (2, 1), (1, -1), (0, -1)],
        ];
        let mut e = Endo::zero(self.dim());
        for r in 1..=self.p {
            let block = self.quaternionic_block(r);
            for (src, &(dst, sign)) in table[a - 1].iter().enumerate() {
                e.set(block[dst], block[src], Scalar::int(sign));
            }
        }
        e
    }

    /// Compares the structure constants against the type-H description
    /// `<[x, y], z_a> = <k(z_a) x, y>` with `k` the left quaternion
    /// multiplication and `z_a = l xi_a` orthonormal in the center.
    pub fn type_h_check(&self) -> std::result::Result<(), (usize, usize, usize)> {
        let inv = self.lambda.inv().expect("monomial");
        for a in 1..=3 {
            let k = self.quaternion_left_mult(a);
            for &x in &self.horizontal() {
                for &y in &self.horizontal() {
                    // coefficient of z_a = l xi_a
                    let lhs = &self.bracket_basis(x, y).0[xi(a)] * &inv;
                    let rhs = k.get(y, x).clone();
                    if lhs != rhs {
                        return Err((a, x, y));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l() -> Scalar {
        Scalar::lambda()
    }

    #[test]
    fn commutator_table() {
        let alg = QHAlgebra::build(1).unwrap();
        assert_eq!(alg.bracket_basis(tau(1), tau(2)), alg.basis(xi(1)).scale(&l()));
        assert_eq!(alg.bracket_basis(tau(3), tau(4)), alg.basis(xi(1)).scale(&l()));
        assert_eq!(alg.bracket_basis(tau(4), tau(2)), alg.basis(xi(2)).scale(&l()));
        assert_eq!(alg.bracket_basis(tau(2), tau(1)), alg.basis(xi(1)).scale(&-l()));
        let alg2 = QHAlgebra::build(2).unwrap();
        assert!(alg2.bracket_basis(tau(1), tau(6)).is_zero());
        assert_eq!(alg2.bracket_basis(tau(1), tau(3)), alg2.basis(xi(1)).scale(&l()));
        for i in 1..=3 {
            for k in 0..alg2.dim() {
                assert!(alg2.bracket_basis(xi(i), k).is_zero());
            }
        }
    }

    #[test]
    fn bracket_is_bilinear_antisymmetric() {
        let alg = QHAlgebra::build(1).unwrap();
        let x = Vector((0..7).map(|i| Scalar::int(i as i64 - 2)).collect());
        let y = Vector((0..7).map(|i| Scalar::int((i * i) as i64 % 5)).collect());
        assert!(alg.bracket(&x, &x).is_zero());
        assert_eq!(alg.bracket(&x, &y), -&alg.bracket(&y, &x));
        let b = alg.bracket(&x, &y);
        assert!(b.0[3..].iter().all(Scalar::is_zero), "values in the center");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(QHAlgebra::build(0).is_err());
        assert!(QHAlgebra::with_lambda(1, Scalar::int(-2)).is_err());
        assert!(QHAlgebra::with_lambda(1, Scalar::lambda() + Scalar::one()).is_err());
        assert!(QHAlgebra::with_lambda(1, Scalar::ratio(3, 2)).is_ok());
    }

    #[test]
    fn structure_invariants() {
        for p in 1..=3 {
            let alg = QHAlgebra::build(p).unwrap();
            assert_eq!(alg.dim(), 4 * p + 3);
            assert_eq!(alg.jacobi_check(), Ok(()));
            assert!(alg.is_two_step_nilpotent());
            assert_eq!(alg.center_dim(), 3);
            assert_eq!(alg.derived_dim(), 3);
            assert_eq!(alg.type_h_check(), Ok(()));
        }
    }

    #[test]
    fn mutated_constants_fail_jacobi() {
        let alg = QHAlgebra::build(1).unwrap();
        let bad = &alg.basis(xi(1)).scale(&l()) + &alg.basis(tau(3)).scale(&l());
        let mutated = alg.with_bracket(tau(1), tau(2), bad);
        let witness = mutated.jacobi_check().unwrap_err();
        assert!(witness.contains(&tau(1)) || witness.contains(&tau(2)));
    }

    #[test]
    fn quaternion_multiplication_is_quaternionic() {
        let alg = QHAlgebra::build(2).unwrap();
        let (i, j, k) = (alg.quaternion_left_mult(1), alg.quaternion_left_mult(2), alg.quaternion_left_mult(3));
        assert_eq!(&i * &j, k);
        let minus_id_h = Endo::from_fn(alg.dim(), |a, b| if a == b && a >= 3 { Scalar::int(-1) } else { Scalar::zero() });
        assert_eq!(&i * &i, minus_id_h);
        assert_eq!(&(&i * &j) * &k, minus_id_h);
    }

    #[test]
    fn d_eta_formulas() {
        // general p, index i mod 3
        for p in 1..=3 {
            let alg = QHAlgebra::build(p).unwrap();
            for i in 1..=3usize {
                let mut expected = KForm::zero(alg.dim(), 2);
                let m = |k: usize| (k - 1) % 3 + 1;
                for r in 1..=p {
                    expected.add_component(&[tau(r), tau(i * p + r)], -l());
                    expected.add_component(&[tau(m(i + 1) * p + r), tau(m(i + 2) * p + r)], -l());
                }
                assert_eq!(alg.d(&alg.eta(i)), expected, "p={p} i={i}");
            }
            for t in 1..=4 * p {
                assert!(alg.d(&alg.theta(t)).is_zero());
            }
        }
    }
}
