//! The cone constant: the scalar `a` for which
//! `S_i = T_i - 2a eta_i ^ F_i` agree for `i = 1, 2, 3`.

use std::collections::BTreeMap;

use crate::algebra::{xi, QHAlgebra};
use crate::contact::{build_phi, characteristic_torsion, FormConvention};
use crate::error::Result;
use crate::exterior::{wedge, KForm};
use crate::linalg::LaurentSystem;
use crate::scalar::{rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct ConeCriterion {
    pub torsions: [KForm; 3],
    pub fundamental_forms: [KForm; 3],
    /// `Some(a)` when the coincidence system has exactly one solution.
    pub solution: Option<Scalar>,
    /// `false` if no `a` works.
    pub consistent: bool,
}

impl ConeCriterion {
    /// `S_i(a)`.
    pub fn s(&self, i: usize, a: &Scalar) -> KForm {
        let eta = KForm::basis(self.torsions[0].dim(), &[xi(i)]);
        let w = wedge(&eta, &self.fundamental_forms[i - 1]).expect("same dimension");
        &self.torsions[i - 1] - &w.scale(&a.scale(&rational(2, 1)))
    }

    /// `(S_1 - S_2, S_2 - S_3)` at `a`.
    pub fn residual(&self, a: &Scalar) -> (KForm, KForm) {
        let (s1, s2, s3) = (self.s(1, a), self.s(2, a), self.s(3, a));
        (&s1 - &s2, &s2 - &s3)
    }

    /// The common value of the `S_i` at the solution.
    pub fn common(&self) -> Option<KForm> {
        self.solution.as_ref().map(|a| self.s(1, a))
    }
}

/// Builds the criterion for `p = 1` from the solved characteristic torsions.
pub fn cone_criterion(alg: &QHAlgebra, convention: FormConvention) -> Result<ConeCriterion> {
    let torsions = [characteristic_torsion(alg, 1)?, characteristic_torsion(alg, 2)?, characteristic_torsion(alg, 3)?];
    let fundamental_forms = [
        build_phi(alg, 1)?.fundamental_form(convention),
        build_phi(alg, 2)?.fundamental_form(convention),
        build_phi(alg, 3)?.fundamental_form(convention),
    ];
    let wedges: Vec<KForm> =
        (0..3).map(|i| wedge(&alg.eta(i + 1), &fundamental_forms[i])).collect::<Result<_>>()?;
    let mut system = LaurentSystem::new(1);
    for (i, j) in [(0, 1), (1, 2)] {
        // 2 (w_i - w_j) a = T_i - T_j
        let dw = (&wedges[i] - &wedges[j]).scale(&Scalar::int(2));
        let dt = &torsions[i] - &torsions[j];
        let mut keys: Vec<Vec<usize>> = dw.components().map(|(k, _)| k.to_vec()).collect();
        keys.extend(dt.components().map(|(k, _)| k.to_vec()));
        keys.sort();
        keys.dedup();
        for k in keys {
            let coeffs: BTreeMap<usize, Scalar> = [(0, dw.component(&k))].into_iter().collect();
            system.push(&coeffs, dt.component(&k))?;
        }
    }
    let (solution, consistent) = match system.solve() {
        Some(sol) if sol.nullspace.is_empty() => (Some(sol.particular[0].clone()), true),
        Some(_) => (None, true),
        None => (None, false),
    };
    Ok(ConeCriterion { torsions, fundamental_forms, solution, consistent })
}

/// The unique cone constant for `F(X, Y) = g(X, phi Y)`.
pub fn cone_constant(alg: &QHAlgebra) -> Result<ConeCriterion> {
    cone_criterion(alg, FormConvention::XPhiY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::characteristic_torsion_formula;

    #[test]
    fn cone_constant_is_lambda() {
        let alg = QHAlgebra::build(1).unwrap();
        let c = cone_constant(&alg).unwrap();
        assert_eq!(c.solution, Some(Scalar::lambda()));
        let (r1, r2) = c.residual(&Scalar::lambda());
        assert!(r1.is_zero() && r2.is_zero());
        let (f1, f2) = c.residual(&Scalar::lambda().scale(&rational(2, 1)));
        assert!(!f1.is_zero() || !f2.is_zero());
        for i in 1..=3 {
            assert_eq!(c.torsions[i - 1], characteristic_torsion_formula(&alg, i).unwrap());
        }
        let common = c.common().unwrap();
        assert_eq!(common, c.s(2, &Scalar::lambda()));
        assert_eq!(common, c.s(3, &Scalar::lambda()));
    }

    #[test]
    fn opposite_convention_flips_sign() {
        let alg = QHAlgebra::build(1).unwrap();
        let c = cone_criterion(&alg, FormConvention::PhiXY).unwrap();
        assert_eq!(c.solution, Some(-Scalar::lambda()));
    }

    #[test]
    fn specialized_lambda() {
        let alg = QHAlgebra::with_lambda(1, Scalar::int(3)).unwrap();
        assert_eq!(cone_constant(&alg).unwrap().solution, Some(Scalar::int(3)));
    }
}
