//! The real Clifford algebra `Cl(0, 7)` on the 8-dimensional spin module.
//!
//! Generators satisfy `gamma_i gamma_j + gamma_j gamma_i = -2 delta_ij`. They
//! are built from Kronecker products of 2x2 blocks and then written in the
//! orthogonal basis `{v, gamma_1 v, .., gamma_7 v}` for a fixed sign vector `v`.
//! In that basis every generator is a signed permutation and the first basis
//! spinor is the G2-invariant spinor of the `p = 1` algebra.

use std::sync::OnceLock;

use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::exterior::{KForm, Vector};
use crate::scalar::Scalar;

pub type Spinor = Vector;
pub type SpinEndo = Endo;

pub const SPIN_DIM: usize = 8;

const KRON_FACTORS: [&str; 7] = ["IIE", "IEX", "EIZ", "EXX", "EZX", "XEZ", "ZEZ"];
const ADAPTED: [i64; 8] = [1, -1, 1, 1, 1, 1, -1, 1];

fn block(c: char) -> [[i64; 2]; 2] {
    match c {
        'I' => [[1, 0], [0, 1]],
        'E' => [[0, 1], [-1, 0]],
        'X' => [[0, 1], [1, 0]],
        'Z' => [[1, 0], [0, -1]],
        _ => unreachable!(),
    }
}

fn kron3(word: &str) -> [[i64; 8]; 8] {
    let f: Vec<[[i64; 2]; 2]> = word.chars().map(block).collect();
    let mut m = [[0; 8]; 8];
    for (r, row) in m.iter_mut().enumerate() {
        for (c, entry) in row.iter_mut().enumerate() {
            let (r0, r1, r2) = (r >> 2, (r >> 1) & 1, r & 1);
            let (c0, c1, c2) = (c >> 2, (c >> 1) & 1, c & 1);
            *entry = f[0][r0][c0] * f[1][r1][c1] * f[2][r2][c2];
        }
    }
    m
}

fn mat_vec(m: &[[i64; 8]; 8], v: &[i64; 8]) -> [i64; 8] {
    let mut out = [0; 8];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

fn dot(a: &[i64; 8], b: &[i64; 8]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn generators() -> &'static [Endo; 7] {
    static GAMMA: OnceLock<[Endo; 7]> = OnceLock::new();
    GAMMA.get_or_init(|| {
        let raw: Vec<[[i64; 8]; 8]> = KRON_FACTORS.iter().map(|w| kron3(w)).collect();
        let mut frame = vec![ADAPTED];
        frame.extend(raw.iter().map(|g| mat_vec(g, &ADAPTED)));
        let norm = dot(&ADAPTED, &ADAPTED);
        std::array::from_fn(|k| {
            Endo::from_fn(SPIN_DIM, |a, b| {
                let v = dot(&frame[a], &mat_vec(&raw[k], &frame[b]));
                debug_assert_eq!(v % norm, 0);
                Scalar::int(v / norm)
            })
        })
    })
}

/// The seven generators `gamma_1, .., gamma_7` (index 0 is `gamma_1`).
pub fn build_gamma() -> Vec<SpinEndo> {
    generators().to_vec()
}

pub fn gamma(i: usize) -> &'static SpinEndo {
    &generators()[i]
}

/// `gamma_1 gamma_2 .. gamma_7`; equal to `+Id` for these generators.
pub fn volume_element() -> SpinEndo {
    generators().iter().skip(1).fold(generators()[0].clone(), |acc, g| &acc * g)
}

/// Clifford image of a form: `e^{i_1 .. i_k} -> gamma_{i_1} .. gamma_{i_k}`.
pub fn clifford_form(a: &KForm) -> Result<SpinEndo> {
    if a.dim() != 7 {
        return Err(Error::RequiresSevenDimensions(a.dim()));
    }
    let g = generators();
    let mut out = Endo::zero(SPIN_DIM);
    for (idx, c) in a.components() {
        let prod = idx.iter().fold(Endo::identity(SPIN_DIM), |acc, &i| &acc * &g[i]);
        out = &out + &prod.scale(c);
    }
    Ok(out)
}

pub fn clifford_action(a: &KForm, s: &Spinor) -> Result<Spinor> {
    if s.dim() != SPIN_DIM {
        return Err(Error::DimensionMismatch { expected: SPIN_DIM, got: s.dim() });
    }
    Ok(clifford_form(a)?.apply(s))
}

/// `X . s`.
pub fn vector_action(x: &Vector, s: &Spinor) -> Result<Spinor> {
    clifford_action(&KForm::from_vector(x), s)
}

/// `rho(A) = 1/2 sum_{i<j} A_ji gamma_i gamma_j`, so that `[rho(A), X.] = (AX).`.
pub fn spin_lift(a: &Endo) -> Result<SpinEndo> {
    if a.dim() != 7 {
        return Err(Error::RequiresSevenDimensions(a.dim()));
    }
    if !a.is_skew() {
        return Err(Error::NotSkew);
    }
    let g = generators();
    let half = Scalar::ratio(1, 2);
    let mut out = Endo::zero(SPIN_DIM);
    for i in 0..7 {
        for j in i + 1..7 {
            let c = a.get(j, i);
            if !c.is_zero() {
                out = &out + &(&g[i] * &g[j]).scale(&(c * &half));
            }
        }
    }
    Ok(out)
}

pub fn spinor_basis(i: usize) -> Spinor {
    Vector::basis(SPIN_DIM, i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{tau, xi};
    use crate::endo::two_form_endo;
    use crate::exterior::wedge;
    use proptest::prelude::*;

    fn skew(entries: &[(usize, usize, i64)]) -> Endo {
        let mut f = KForm::zero(7, 2);
        for &(i, j, c) in entries {
            f.add_component(&[i, j], Scalar::int(c));
        }
        two_form_endo(&f).unwrap()
    }

    #[test]
    fn clifford_relations() {
        let g = build_gamma();
        let minus_two = Endo::identity(8).scale(&Scalar::int(-2));
        for i in 0..7 {
            for j in 0..7 {
                let ac = &(&g[i] * &g[j]) + &(&g[j] * &g[i]);
                if i == j {
                    assert_eq!(ac, minus_two);
                } else {
                    assert!(ac.is_zero());
                }
            }
            assert!(g[i].is_skew());
            for a in 0..8 {
                for b in 0..8 {
                    let v = g[i].get(a, b);
                    assert!(v.is_zero() || *v == Scalar::one() || *v == Scalar::int(-1));
                }
            }
        }
        assert_eq!(volume_element(), Endo::identity(8));
    }

    #[test]
    fn conjugation_matches_kronecker_generators() {
        // oracle: the adapted generators are the raw ones in the basis F = [v | g_k v]
        let raw: Vec<[[i64; 8]; 8]> = KRON_FACTORS.iter().map(|w| kron3(w)).collect();
        let mut cols = vec![ADAPTED];
        cols.extend(raw.iter().map(|g| mat_vec(g, &ADAPTED)));
        for (k, gk) in raw.iter().enumerate() {
            for b in 0..8 {
                // F (g' e_b) == g F e_b
                let mut lhs = vec![Scalar::zero(); 8];
                for (a, col) in cols.iter().enumerate() {
                    for (r, entry) in lhs.iter_mut().enumerate() {
                        *entry += gamma(k).get(a, b) * &Scalar::int(col[r]);
                    }
                }
                let rhs: Vec<Scalar> = mat_vec(gk, &cols[b]).iter().map(|&x| Scalar::int(x)).collect();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn forms_act_by_clifford_products() {
        let s = Vector((0..8).map(|i| Scalar::int(i as i64 - 3)).collect());
        let eta123 = KForm::basis(7, &[xi(1), xi(2), xi(3)]);
        let direct = gamma(0).apply(&gamma(1).apply(&gamma(2).apply(&s)));
        assert_eq!(clifford_action(&eta123, &s).unwrap(), direct);
        let theta = KForm::basis(7, &[tau(2)]);
        let twice = clifford_action(&theta, &clifford_action(&theta, &s).unwrap()).unwrap();
        assert_eq!(twice, -&s);
        assert!(clifford_action(&KForm::basis(5, &[0]), &s).is_err());
        assert!(spin_lift(&Endo::identity(7)).is_err());
        assert!(spin_lift(&Endo::zero(7)).unwrap().is_zero());
    }

    #[test]
    fn two_forms_are_twice_the_lift() {
        let a = &KForm::basis(7, &[0, 3]) + &KForm::basis(7, &[4, 6]).scale(&Scalar::lambda());
        let lift = spin_lift(&two_form_endo(&a).unwrap()).unwrap();
        assert_eq!(clifford_form(&a).unwrap(), lift.scale(&Scalar::int(2)));
    }

    #[test]
    fn non_unit_one_form_squares_to_norm() {
        let theta = &KForm::basis(7, &[1]).scale(&Scalar::int(3)) + &KForm::basis(7, &[5]).scale(&Scalar::int(4));
        let s = spinor_basis(2);
        let twice = clifford_action(&theta, &clifford_action(&theta, &s).unwrap()).unwrap();
        assert_eq!(twice, s.scale(&Scalar::int(-25)));
        // a 2-form built from a wedge acts as the product of its factors
        let ab = wedge(&KForm::basis(7, &[1]), &KForm::basis(7, &[4])).unwrap();
        assert_eq!(clifford_form(&ab).unwrap(), gamma(1) * gamma(4));
    }

    fn skew_strategy() -> impl Strategy<Value = Endo> {
        prop::collection::vec((0usize..7, 0usize..7, -3i64..4), 1..6).prop_map(|e| skew(&e))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]
        #[test]
        fn lift_is_homomorphism(a in skew_strategy(), b in skew_strategy()) {
            let lhs = spin_lift(&a.commutator(&b)).unwrap();
            let rhs = spin_lift(&a).unwrap().commutator(&spin_lift(&b).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn lift_intertwines(a in skew_strategy(), x in prop::collection::vec(-3i64..4, 7)) {
            let x = Vector(x.into_iter().map(Scalar::int).collect());
            let gx = clifford_form(&KForm::from_vector(&x)).unwrap();
            let gax = clifford_form(&KForm::from_vector(&a.apply(&x))).unwrap();
            prop_assert_eq!(spin_lift(&a).unwrap().commutator(&gx), gax);
        }

        #[test]
        fn unit_one_form_squares_to_minus_one(i in 0usize..7, s in prop::collection::vec(-5i64..6, 8)) {
            let s = Vector(s.into_iter().map(Scalar::int).collect());
            let theta = KForm::basis(7, &[i]);
            let twice = clifford_action(&theta, &clifford_action(&theta, &s).unwrap()).unwrap();
            prop_assert_eq!(twice, -&s);
        }
    }
}
