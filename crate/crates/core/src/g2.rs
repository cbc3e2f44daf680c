//! The `p = 1` case: a cocalibrated G2 structure on `n_1`, its
//! characteristic torsion, the parallel spinor and generalized Killing spinors.

use num_traits::{Signed, Zero};

use crate::algebra::{tau, xi, QHAlgebra};
use crate::clifford::{clifford_form, spin_lift, vector_action, SpinEndo, Spinor, SPIN_DIM};
use crate::connection::{levi_civita, Connection};
use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::exterior::{form_inner, hodge_star, interior, wedge_all, KForm, Vector};
use crate::linalg::{definiteness, nullspace};
use crate::scalar::{rational, Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct G2Structure {
    pub omega: KForm,
}

fn require_p1(alg: &QHAlgebra) -> Result<()> {
    if alg.p() == 1 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("G2 structure needs p = 1, got {}", alg.p())))
    }
}

/// `omega = -eta_1 ^ (theta_12 + theta_34) - eta_2 ^ (theta_13 - theta_24)
///          - eta_3 ^ (theta_14 + theta_23) + eta_123`.
pub fn build_omega(alg: &QHAlgebra) -> Result<G2Structure> {
    require_p1(alg)?;
    let mut omega = KForm::zero(7, 3);
    // theta_42 read as -theta_24
    let terms = [(1, 1, 2, -1), (1, 3, 4, -1), (2, 1, 3, -1), (2, 2, 4, 1), (3, 1, 4, -1), (3, 2, 3, -1)];
    for (i, a, b, c) in terms {
        omega.add_component(&[xi(i), tau(a), tau(b)], Scalar::int(c));
    }
    omega.add_component(&[xi(1), xi(2), xi(3)], Scalar::one());
    Ok(G2Structure { omega })
}

/// `B(X, Y) vol = (X ⨼ omega) ^ (Y ⨼ omega) ^ omega`.
pub fn hitchin_form(omega: &KForm) -> Result<Endo> {
    let n = omega.dim();
    if n != 7 || omega.degree() != 3 {
        return Err(Error::RequiresSevenDimensions(n));
    }
    let contractions: Vec<KForm> =
        (0..n).map(|i| interior(&Vector::basis(n, i), omega)).collect::<Result<_>>()?;
    let all: Vec<usize> = (0..n).collect();
    let mut b = Endo::zero(n);
    for i in 0..n {
        for j in i..n {
            let top = wedge_all(&[&contractions[i], &contractions[j], omega])?;
            let c = top.component(&all);
            b.set(i, j, c.clone());
            b.set(j, i, c);
        }
    }
    Ok(b)
}

/// Definite Hitchin form at `l = 1` and `l = 2` (either sign).
pub fn is_generic(alg: &QHAlgebra, omega: &KForm) -> Result<bool> {
    let b = hitchin_form(omega)?;
    for which in [1, 2] {
        let at = alg.sample_point(which);
        let flat = b.eval_flat(&at)?;
        let rows: Vec<Vec<Rational>> = flat.chunks(7).map(<[Rational]>::to_vec).collect();
        if definiteness(&rows).is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `d * omega = 0`.
pub fn cocalibrated_check(alg: &QHAlgebra, omega: &KForm) -> bool {
    alg.d(&hodge_star(omega)).is_zero()
}

/// `T^c = (1/6)(d omega, * omega) omega - * d omega`, together with the pairing.
pub fn characteristic_torsion_g2(alg: &QHAlgebra, omega: &KForm) -> Result<(KForm, Scalar)> {
    if !cocalibrated_check(alg, omega) {
        return Err(Error::InvalidParameter("3-form is not cocalibrated".into()));
    }
    let d_omega = alg.d(omega);
    let pairing = form_inner(&d_omega, &hodge_star(omega))?;
    let t = &omega.scale(&pairing.scale(&rational(1, 6))) - &hodge_star(&d_omega);
    Ok((t, pairing))
}

/// `Sigma = R psi_0 + {X . psi_0 : X in T^v} + {X . psi_0 : X in T^h}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinorSplitting {
    pub psi0: Spinor,
    pub sigma_v: Vec<Spinor>,
    pub sigma_h: Vec<Spinor>,
}

impl SpinorSplitting {
    pub fn dims(&self) -> (usize, usize, usize) {
        (1, self.sigma_v.len(), self.sigma_h.len())
    }

    pub fn all(&self) -> Vec<&Spinor> {
        std::iter::once(&self.psi0).chain(&self.sigma_v).chain(&self.sigma_h).collect()
    }

    /// All listed spinors are nonzero and pairwise orthogonal.
    pub fn is_orthogonal_basis(&self) -> bool {
        let all = self.all();
        all.len() == SPIN_DIM
            && all.iter().enumerate().all(|(a, u)| {
                !u.is_zero() && all.iter().skip(a + 1).all(|v| u.dot(v).is_zero())
            })
    }
}

fn joint_kernel(lifts: &[SpinEndo], at: &Rational) -> Result<Vec<Vec<Rational>>> {
    let mut rows = Vec::new();
    for m in lifts {
        let flat = m.eval_flat(at)?;
        rows.extend(flat.chunks(SPIN_DIM).map(<[Rational]>::to_vec));
    }
    Ok(nullspace(&rows, SPIN_DIM))
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    let root = |x: &num_bigint::BigInt| {
        let r = x.sqrt();
        (&r * &r == *x).then_some(r)
    };
    if q.is_negative() {
        return None;
    }
    Some(Rational::new(root(q.numer())?, root(q.denom())?))
}

/// The spinor killed by every `rho(Omega(X))`, normalized to unit length (when
/// the length is rational) with first nonzero component positive, and the
/// induced splitting.
pub fn parallel_spinor(alg: &QHAlgebra, conn: &Connection) -> Result<SpinorSplitting> {
    require_p1(alg)?;
    let lifts: Vec<SpinEndo> = (0..7).map(|x| spin_lift(conn.omega(x))).collect::<Result<_>>()?;
    let kernel = joint_kernel(&lifts, &alg.sample_point(1))?;
    let again = joint_kernel(&lifts, &alg.sample_point(2))?;
    if kernel.len() != 1 || again.len() != 1 {
        return Err(Error::SpinorKernel(kernel.len().max(again.len())));
    }
    let mut v = kernel.into_iter().next().expect("one vector");
    let lead = v.iter().find(|c| !c.is_zero()).expect("nonzero kernel vector").clone();
    for c in v.iter_mut() {
        *c /= &lead;
    }
    let norm2: Rational = v.iter().map(|c| c * c).sum();
    if let Some(r) = rational_sqrt(&norm2) {
        for c in v.iter_mut() {
            *c /= &r;
        }
    }
    let psi0 = Vector(v.into_iter().map(Scalar::constant).collect());
    if let Some(m) = lifts.iter().position(|m| !m.apply(&psi0).is_zero()) {
        return Err(Error::Inconsistent(format!("spinor not parallel in direction {m} for formal l")));
    }
    let act = |i: usize| vector_action(&alg.basis(i), &psi0);
    Ok(SpinorSplitting {
        sigma_v: alg.vertical().into_iter().map(act).collect::<Result<_>>()?,
        sigma_h: alg.horizontal().into_iter().map(act).collect::<Result<_>>()?,
        psi0,
    })
}

/// `Some(s)` if `m v = s v`.
pub fn eigenvalue(m: &SpinEndo, v: &Spinor) -> Option<Scalar> {
    let mv = m.apply(v);
    let (k, vk) = v.support().next()?;
    let s = mv.0[k].checked_div(vk).ok()?;
    (mv == v.scale(&s)).then_some(s)
}

/// Clifford action of the torsion on the spinor module, in the splitting basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionSpectrum {
    pub psi0: Option<Scalar>,
    pub vertical: Vec<Option<Scalar>>,
    pub horizontal: Vec<Option<Scalar>>,
    /// Eigenvalues with multiplicities, each multiplicity confirmed by a rank
    /// computation at two sample points.
    pub multiplicities: Vec<(Scalar, usize)>,
    pub trace: Scalar,
}

impl TorsionSpectrum {
    pub fn multiplicity(&self, s: &Scalar) -> usize {
        self.multiplicities.iter().find(|(v, _)| v == s).map_or(0, |(_, k)| *k)
    }
}

pub fn torsion_spectrum(alg: &QHAlgebra, t: &KForm, splitting: &SpinorSplitting) -> Result<TorsionSpectrum> {
    let m = clifford_form(t)?;
    let psi0 = eigenvalue(&m, &splitting.psi0);
    let vertical: Vec<Option<Scalar>> = splitting.sigma_v.iter().map(|v| eigenvalue(&m, v)).collect();
    let horizontal: Vec<Option<Scalar>> = splitting.sigma_h.iter().map(|v| eigenvalue(&m, v)).collect();
    let mut multiplicities: Vec<(Scalar, usize)> = Vec::new();
    for s in std::iter::once(&psi0).chain(&vertical).chain(&horizontal).flatten() {
        if multiplicities.iter().any(|(v, _)| v == s) {
            continue;
        }
        let mut dims = Vec::new();
        for which in [1, 2] {
            let at = alg.sample_point(which);
            let shifted = &m - &Endo::identity(SPIN_DIM).scale(s);
            let flat = shifted.eval_flat(&at)?;
            let rows: Vec<Vec<Rational>> = flat.chunks(SPIN_DIM).map(<[Rational]>::to_vec).collect();
            dims.push(nullspace(&rows, SPIN_DIM).len());
        }
        if dims[0] != dims[1] {
            return Err(Error::Inconsistent(format!("eigenspace of {s} changes with l: {dims:?}")));
        }
        multiplicities.push((s.clone(), dims[0]));
    }
    Ok(TorsionSpectrum { psi0, vertical, horizontal, multiplicities, trace: m.trace() })
}

/// `s(X)` with `nabla^g_X psi = s(X) X . psi` for each frame vector, or `None`
/// where no scalar fits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KillingReport {
    pub values: Vec<Option<Scalar>>,
}

impl KillingReport {
    pub fn is_generalized_killing(&self) -> bool {
        self.values.iter().all(Option::is_some)
    }

    pub fn distinct(&self) -> Vec<Scalar> {
        let mut out: Vec<Scalar> = Vec::new();
        for v in self.values.iter().flatten() {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }
}

pub fn generalized_killing_check(alg: &QHAlgebra, psi: &Spinor) -> Result<KillingReport> {
    require_p1(alg)?;
    let lc = levi_civita(alg);
    let values = (0..7)
        .map(|x| {
            let lhs = spin_lift(lc.omega(x))?.apply(psi);
            let xpsi = vector_action(&alg.basis(x), psi)?;
            if lhs.is_zero() {
                return Ok(Some(Scalar::zero()));
            }
            let Some((k, c)) = xpsi.support().next() else { return Ok(None) };
            let Ok(s) = lhs.0[k].checked_div(c) else { return Ok(None) };
            Ok((xpsi.scale(&s) == lhs).then_some(s))
        })
        .collect::<Result<_>>()?;
    Ok(KillingReport { values })
}

/// `psi_i = xi_i . psi_0`.
pub fn psi_i(alg: &QHAlgebra, splitting: &SpinorSplitting, i: usize) -> Result<Spinor> {
    vector_action(&alg.basis(xi(i)), &splitting.psi0)
}

/// Outcome of the two identities used for the `psi_i` equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofIdentities {
    /// The common `c` with `(X ⨼ d eta_i) . psi_0 = c X . xi_i . psi_0` for all
    /// horizontal `X` and all `i`, if there is one.
    pub horizontal_coefficient: Option<Scalar>,
    /// `(X ⨼ d eta_i) = 0` for vertical `X`.
    pub vertical_vanishes: bool,
    /// `nabla^g_X (xi_i . psi_0) = (nabla^g_X xi_i) . psi_0 + xi_i . nabla^g_X psi_0`.
    pub leibniz: bool,
}

impl ProofIdentities {
    /// Both identities with the coefficient `1` of the written argument.
    pub fn holds_as_stated(&self) -> bool {
        self.horizontal_coefficient.as_ref().is_some_and(Scalar::is_one) && self.vertical_vanishes && self.leibniz
    }
}

pub fn proof_identities_check(alg: &QHAlgebra, splitting: &SpinorSplitting) -> Result<ProofIdentities> {
    require_p1(alg)?;
    let lc = levi_civita(alg);
    let psi0 = &splitting.psi0;
    let mut coefficient: Option<Option<Scalar>> = None;
    let mut vertical_vanishes = true;
    let mut leibniz = true;
    for i in 1..=3 {
        let d = alg.d(&alg.eta(i));
        let xi_vec = alg.basis(xi(i));
        for x in 0..7 {
            let ex = alg.basis(x);
            let contraction = interior(&ex, &d)?;
            if alg.vertical().contains(&x) {
                vertical_vanishes &= contraction.is_zero();
            } else {
                let lhs = clifford_form(&contraction)?.apply(psi0);
                let rhs = vector_action(&ex, &vector_action(&xi_vec, psi0)?)?;
                let c = eigen_ratio(&lhs, &rhs);
                coefficient = match coefficient {
                    None => Some(c),
                    Some(prev) if prev == c => Some(prev),
                    Some(_) => Some(None),
                };
            }
            let omega = spin_lift(lc.omega(x))?;
            let direct = omega.apply(&vector_action(&xi_vec, psi0)?);
            let nabla_xi = lc.covariant_derivative(&ex, &xi_vec);
            let split = &vector_action(&nabla_xi, psi0)? + &vector_action(&xi_vec, &omega.apply(psi0))?;
            leibniz &= direct == split;
        }
    }
    Ok(ProofIdentities { horizontal_coefficient: coefficient.flatten(), vertical_vanishes, leibniz })
}

/// `Some(c)` if `a = c b`.
fn eigen_ratio(a: &Vector, b: &Vector) -> Option<Scalar> {
    let Some((k, bk)) = b.support().next() else {
        return a.is_zero().then(Scalar::zero);
    };
    let c = a.0[k].checked_div(bk).ok()?;
    (b.scale(&c) == *a).then_some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::clifford_action;
    use crate::connection::{canonical_connection, canonical_torsion};

    fn l() -> Scalar {
        Scalar::lambda()
    }

    fn setup() -> (QHAlgebra, SpinorSplitting) {
        let alg = QHAlgebra::build(1).unwrap();
        let sp = parallel_spinor(&alg, &canonical_connection(&alg)).unwrap();
        (alg, sp)
    }

    #[test]
    fn omega_components() {
        let alg = QHAlgebra::build(1).unwrap();
        let w = build_omega(&alg).unwrap().omega;
        assert_eq!(w.component(&[xi(1), tau(1), tau(2)]), Scalar::int(-1));
        assert_eq!(w.component(&[xi(2), tau(4), tau(2)]), Scalar::int(-1));
        assert_eq!(w.component(&[xi(1), xi(2), xi(3)]), Scalar::one());
        let five = KForm::basis(7, &[xi(1), xi(2), xi(3)]).scale(&Scalar::int(5));
        assert_eq!((&w - &five).scale(&l()), canonical_torsion(&alg));
        assert!(build_omega(&QHAlgebra::build(2).unwrap()).is_err());
    }

    #[test]
    fn genericity_and_cocalibration() {
        let alg = QHAlgebra::build(1).unwrap();
        let w = build_omega(&alg).unwrap().omega;
        assert!(is_generic(&alg, &w).unwrap());
        assert!(!is_generic(&alg, &KForm::basis(7, &[0, 1, 2])).unwrap());
        assert!(cocalibrated_check(&alg, &w));
        let perturbed = &w + &KForm::basis(7, &[tau(1), tau(2), tau(3)]);
        assert!(!cocalibrated_check(&alg, &perturbed));
        let flat = alg.abelianized();
        assert!(cocalibrated_check(&flat, &perturbed));
    }

    #[test]
    fn characteristic_torsion() {
        let alg = QHAlgebra::build(1).unwrap();
        let w = build_omega(&alg).unwrap().omega;
        let (t, pairing) = characteristic_torsion_g2(&alg, &w).unwrap();
        assert_eq!(pairing, l().scale(&rational(12, 1)));
        assert_eq!(t, canonical_torsion(&alg));
    }

    #[test]
    fn parallel_spinor_is_first_basis_vector() {
        let (alg, sp) = setup();
        assert_eq!(sp.psi0, crate::clifford::spinor_basis(0));
        assert_eq!(sp.dims(), (1, 3, 4));
        assert!(sp.is_orthogonal_basis());
        for h in crate::connection::h_endos(&alg, crate::connection::HVariant::Standard) {
            assert!(spin_lift(&h).unwrap().apply(&sp.psi0).is_zero());
        }
        assert!(matches!(parallel_spinor(&alg, &levi_civita(&alg)), Err(Error::SpinorKernel(0))));
    }

    #[test]
    fn spectrum_computed() {
        let (alg, sp) = setup();
        let t = canonical_torsion(&alg);
        let s = torsion_spectrum(&alg, &t, &sp).unwrap();
        assert_eq!(s.psi0, Some(l().scale(&rational(-2, 1))));
        assert!(s.vertical.iter().all(|v| v == &Some(l().scale(&rational(6, 1)))));
        assert!(s.horizontal.iter().all(|v| v == &Some(l().scale(&rational(-4, 1)))));
        assert_eq!(s.multiplicity(&l().scale(&rational(-2, 1))), 1);
        assert_eq!(s.multiplicity(&l().scale(&rational(6, 1))), 3);
        assert_eq!(s.multiplicity(&l().scale(&rational(-4, 1))), 4);
        assert!(s.trace.is_zero());
    }

    #[test]
    fn killing_numbers() {
        let (alg, sp) = setup();
        let half = l().scale(&rational(1, 2));
        let r0 = generalized_killing_check(&alg, &sp.psi0).unwrap();
        for x in 0..7 {
            let expected = if x < 3 { half.clone() } else { l().scale(&rational(-3, 4)) };
            assert_eq!(r0.values[x], Some(expected));
        }
        for i in 1..=3 {
            let r = generalized_killing_check(&alg, &psi_i(&alg, &sp, i).unwrap()).unwrap();
            for x in 0..7 {
                let expected = match x {
                    _ if x == xi(i) => half.clone(),
                    0..=2 => -half.clone(),
                    _ => l().scale(&rational(1, 4)),
                };
                assert_eq!(r.values[x], Some(expected));
            }
            assert_eq!(r.distinct().len(), 3);
        }
        let random = Vector((0..8).map(|k| Scalar::int([3, -1, 4, 1, -5, 9, 2, -6][k])).collect());
        assert!(!generalized_killing_check(&alg, &random).unwrap().is_generalized_killing());
    }

    #[test]
    fn killing_agrees_with_torsion_route() {
        // nabla^g_X psi0 = -1/4 (X ⨼ T) . psi0
        let (alg, sp) = setup();
        let t = canonical_torsion(&alg);
        let lc = levi_civita(&alg);
        for x in 0..7 {
            let lhs = spin_lift(lc.omega(x)).unwrap().apply(&sp.psi0);
            let c = interior(&alg.basis(x), &t).unwrap().scale(&Scalar::ratio(-1, 4));
            assert_eq!(lhs, clifford_action(&c, &sp.psi0).unwrap());
        }
    }

    #[test]
    fn proof_identities_computed() {
        let (alg, sp) = setup();
        let r = proof_identities_check(&alg, &sp).unwrap();
        assert_eq!(r.horizontal_coefficient, Some(-l()));
        assert!(r.vertical_vanishes);
        assert!(r.leibniz);
        assert!(!r.holds_as_stated());
        let (a, b) = (crate::clifford::gamma(0), crate::clifford::gamma(1));
        assert_eq!(a * b, -&(b * a));
    }
}
