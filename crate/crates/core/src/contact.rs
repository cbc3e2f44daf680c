//! The almost 3-contact metric structure of `n_p`, its characteristic
//! connections and the quaternionic contact structure.

use crate::algebra::{tau, xi, QHAlgebra};
use crate::connection::{levi_civita, solve_parallel_torsion, with_torsion, Connection, TorsionSolutions};
use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::exterior::{wedge, KForm, Vector};
use crate::scalar::{rational, Scalar};
use crate::tensor::Tensor;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlmostContact {
    pub phi: Endo,
    pub xi: Vector,
    pub eta: KForm,
}

/// Choice of `phi_2`. `Alternate` uses the term
/// `-theta_r (x) tau_{3p+r}` in place of `-theta_{p+r} (x) tau_{3p+r}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiVariant {
    Standard,
    Alternate,
}

/// A failed almost-contact axiom, with the first offending basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomFailure {
    PhiSquared(usize),
    EtaOfXi,
    PhiXi,
    EtaPhi(usize),
    Metric(usize, usize),
}

impl AlmostContact {
    pub fn axioms_check(&self) -> std::result::Result<(), AxiomFailure> {
        let n = self.xi.dim();
        let expected = &Endo::outer(&self.eta, &self.xi) - &Endo::identity(n);
        let sq = &self.phi * &self.phi;
        if let Some(j) = (0..n).find(|&j| sq.column(j) != expected.column(j)) {
            return Err(AxiomFailure::PhiSquared(j));
        }
        if !self.eta.evaluate(&[&self.xi]).is_one() {
            return Err(AxiomFailure::EtaOfXi);
        }
        if !self.phi.apply(&self.xi).is_zero() {
            return Err(AxiomFailure::PhiXi);
        }
        for j in 0..n {
            if !self.eta.evaluate(&[&self.phi.column(j)]).is_zero() {
                return Err(AxiomFailure::EtaPhi(j));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let lhs = self.phi.column(a).dot(&self.phi.column(b));
                let ea = self.eta.component(&[a]);
                let eb = self.eta.component(&[b]);
                let delta = if a == b { Scalar::one() } else { Scalar::zero() };
                if lhs != &delta - &(&ea * &eb) {
                    return Err(AxiomFailure::Metric(a, b));
                }
            }
        }
        Ok(())
    }

    /// `N(X, Y) = phi^2 [X, Y] + [phi X, phi Y] - phi [phi X, Y] - phi [X, phi Y] + d eta(X, Y) xi`
    /// on basis vectors; `Ok` if it vanishes, else the first pair.
    pub fn normality_check(&self, alg: &QHAlgebra) -> std::result::Result<(), (usize, usize)> {
        let n = alg.dim();
        let d_eta = alg.d(&self.eta);
        let sq = &self.phi * &self.phi;
        for a in 0..n {
            for b in a + 1..n {
                let (x, y) = (alg.basis(a), alg.basis(b));
                let (px, py) = (self.phi.apply(&x), self.phi.apply(&y));
                let mut v = sq.apply(&alg.bracket(&x, &y));
                v = &v + &alg.bracket(&px, &py);
                v = &v - &self.phi.apply(&alg.bracket(&px, &y));
                v = &v - &self.phi.apply(&alg.bracket(&x, &py));
                v = &v + &self.xi.scale(&d_eta.component(&[a, b]));
                if !v.is_zero() {
                    return Err((a, b));
                }
            }
        }
        Ok(())
    }

    pub fn is_normal(&self, alg: &QHAlgebra) -> bool {
        self.normality_check(alg).is_ok()
    }

    pub fn fundamental_form(&self, convention: FormConvention) -> KForm {
        let n = self.xi.dim();
        let mut f = KForm::zero(n, 2);
        for a in 0..n {
            for b in a + 1..n {
                let c = match convention {
                    FormConvention::XPhiY => self.phi.get(a, b).clone(),
                    FormConvention::PhiXY => self.phi.get(b, a).clone(),
                };
                f.add_component(&[a, b], c);
            }
        }
        f
    }
}

/// Slot convention for the fundamental 2-form: `XPhiY` is `F(X, Y) = g(X, phi Y)`,
/// `PhiXY` is `F(X, Y) = g(phi X, Y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormConvention {
    XPhiY,
    PhiXY,
}

fn check_index(i: usize) -> Result<()> {
    if (1..=3).contains(&i) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("structure index {i} not in 1..=3")))
    }
}

pub fn build_phi(alg: &QHAlgebra, i: usize) -> Result<AlmostContact> {
    build_phi_variant(alg, i, PhiVariant::Standard)
}

pub fn build_phi_variant(alg: &QHAlgebra, i: usize, variant: PhiVariant) -> Result<AlmostContact> {
    check_index(i)?;
    let p = alg.p();
    let n = alg.dim();
    let mut phi = Endo::zero(n);
    // `theta_a (x) v_b` sends frame vector `a` to `b`
    let mut map = |from: usize, to: usize, sign: i64| phi.add_at(to, from, &Scalar::int(sign));
    let (j, k) = (i % 3 + 1, (i + 1) % 3 + 1);
    map(xi(j), xi(k), 1);
    map(xi(k), xi(j), -1);
    for r in 1..=p {
        let [a, b, c, d] = [r, p + r, 2 * p + r, 3 * p + r].map(tau);
        match i {
            1 => {
                map(a, b, 1);
                map(b, a, -1);
                map(c, d, 1);
                map(d, c, -1);
            }
            2 => {
                map(a, c, 1);
                map(c, a, -1);
                map(d, b, 1);
                match variant {
                    PhiVariant::Standard => map(b, d, -1),
                    PhiVariant::Alternate => map(a, d, -1),
                }
            }
            _ => {
                map(a, d, 1);
                map(d, a, -1);
                map(b, c, 1);
                map(c, b, -1);
            }
        }
    }
    Ok(AlmostContact { phi, xi: alg.basis(xi(i)), eta: alg.eta(i) })
}

pub fn build_all(alg: &QHAlgebra, variant: PhiVariant) -> Result<[AlmostContact; 3]> {
    Ok([build_phi(alg, 1)?, build_phi_variant(alg, 2, variant)?, build_phi(alg, 3)?])
}

/// Where a compatibility equation fails: the cyclic triple `(i, j, k)`, which
/// of the two identities, and the first basis vector on which it fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatibilityFailure {
    pub triple: [usize; 3],
    pub identity: usize,
    pub basis_vector: usize,
}

/// `phi_i = phi_j phi_k - eta_k (x) xi_j = -phi_k phi_j + eta_j (x) xi_k` for
/// the cyclic permutations of `(1, 2, 3)`.
pub fn compatibility_check(structures: &[AlmostContact; 3]) -> std::result::Result<(), CompatibilityFailure> {
    for [i, j, k] in [[1, 2, 3], [2, 3, 1], [3, 1, 2]] {
        let (si, sj, sk) = (&structures[i - 1], &structures[j - 1], &structures[k - 1]);
        let first = &(&sj.phi * &sk.phi) - &Endo::outer(&sk.eta, &sj.xi);
        let second = &Endo::outer(&sj.eta, &sk.xi) - &(&sk.phi * &sj.phi);
        for (identity, rhs) in [(1, first), (2, second)] {
            let n = rhs.dim();
            if let Some(v) = (0..n).find(|&c| rhs.column(c) != si.phi.column(c)) {
                return Err(CompatibilityFailure { triple: [i, j, k], identity, basis_vector: v });
            }
        }
    }
    Ok(())
}

/// Normal with closed fundamental form.
pub fn quasi_sasaki_check(alg: &QHAlgebra, s: &AlmostContact) -> bool {
    s.is_normal(alg) && alg.d(&s.fundamental_form(FormConvention::XPhiY)).is_zero()
}

/// `T_i = eta_i ^ d eta_i - sum_{j != i} eta_j ^ d eta_j`.
pub fn characteristic_torsion_formula(alg: &QHAlgebra, i: usize) -> Result<KForm> {
    check_index(i)?;
    let mut t = KForm::zero(alg.dim(), 3);
    for j in 1..=3 {
        let term = wedge(&alg.eta(j), &alg.d(&alg.eta(j)))?;
        t = if j == i { &t + &term } else { &t - &term };
    }
    Ok(t)
}

/// Solves for the skew torsion making `phi_i` and `xi_i` parallel.
pub fn characteristic_solutions(alg: &QHAlgebra, s: &AlmostContact) -> Result<TorsionSolutions> {
    solve_parallel_torsion(alg, &[Tensor::from_endo(&s.phi), Tensor::from_vector(&s.xi)])
}

/// The characteristic connection of `(phi_i, xi_i, eta_i)`, found by solving
/// for its torsion. Only for `p = 1`.
pub fn characteristic_connection(alg: &QHAlgebra, i: usize) -> Result<Connection> {
    with_torsion(alg, &characteristic_torsion(alg, i)?)
}

pub fn characteristic_torsion(alg: &QHAlgebra, i: usize) -> Result<KForm> {
    if alg.p() != 1 {
        return Err(Error::InvalidParameter(format!("characteristic connection needs p = 1, got {}", alg.p())));
    }
    let s = build_phi(alg, i)?;
    let sol = characteristic_solutions(alg, &s)?;
    sol.unique().ok_or_else(|| {
        Error::Inconsistent(format!(
            "characteristic torsion for i = {i}: consistent = {}, nullity = {:?}",
            sol.is_consistent(),
            sol.nullity()
        ))
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QcStructure {
    /// `I_i = phi_i` on `T^h`, extended by zero on `T^v`.
    pub i: [Endo; 3],
    pub eta_tilde: [KForm; 3],
    pub xi_tilde: [Vector; 3],
}

impl QcStructure {
    /// `I_i` as `4p x 4p` blocks on `T^h`.
    pub fn restricted(&self, alg: &QHAlgebra) -> [Endo; 3] {
        let h = alg.horizontal();
        self.i.clone().map(|e| e.block(&h))
    }
}

pub fn build_qc(alg: &QHAlgebra) -> Result<QcStructure> {
    let structures = build_all(alg, PhiVariant::Standard)?;
    let h = alg.horizontal();
    let n = alg.dim();
    let proj = Endo::from_fn(n, |a, b| if a == b && h.contains(&a) { Scalar::one() } else { Scalar::zero() });
    let inv = alg.lambda().inv()?;
    let eta_scale = inv.scale(&rational(-2, 1));
    let xi_scale = alg.lambda().scale(&rational(-1, 2));
    Ok(QcStructure {
        i: structures.clone().map(|s| &s.phi * &proj),
        eta_tilde: [1, 2, 3].map(|k| alg.eta(k).scale(&eta_scale)),
        xi_tilde: [1, 2, 3].map(|k| alg.basis(xi(k)).scale(&xi_scale)),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QcFailure {
    QuaternionRelation,
    ComplexStructure(usize),
    Kernel(usize),
    Differential { j: usize, x: usize, y: usize },
    ReebSymmetry { j: usize, k: usize, x: usize },
}

/// The defining identities of the qc structure.
pub fn qc_invariants(alg: &QHAlgebra, qc: &QcStructure) -> std::result::Result<(), QcFailure> {
    let h = alg.horizontal();
    let blocks = qc.restricted(alg);
    let id = Endo::identity(h.len());
    for (k, b) in blocks.iter().enumerate() {
        if &(b * b) + &id != Endo::zero(h.len()) {
            return Err(QcFailure::ComplexStructure(k + 1));
        }
    }
    if &(&(&blocks[0] * &blocks[1]) * &blocks[2]) + &id != Endo::zero(h.len()) {
        return Err(QcFailure::QuaternionRelation);
    }
    for (k, e) in qc.eta_tilde.iter().enumerate() {
        if h.iter().any(|&l| !e.component(&[l]).is_zero()) {
            return Err(QcFailure::Kernel(k + 1));
        }
    }
    let d: Vec<KForm> = qc.eta_tilde.iter().map(|e| alg.d(e)).collect();
    for j in 0..3 {
        for &x in &h {
            for &y in &h {
                let lhs = d[j].evaluate(&[&alg.basis(x), &alg.basis(y)]);
                let rhs = qc.i[j].apply(&alg.basis(x)).dot(&alg.basis(y)).scale(&rational(2, 1));
                if lhs != rhs {
                    return Err(QcFailure::Differential { j: j + 1, x, y });
                }
            }
        }
    }
    for j in 0..3 {
        for k in 0..3 {
            for &x in &h {
                let ex = alg.basis(x);
                let lhs = d[j].evaluate(&[&qc.xi_tilde[k], &ex]);
                let rhs = -d[k].evaluate(&[&qc.xi_tilde[j], &ex]);
                if lhs != rhs {
                    return Err(QcFailure::ReebSymmetry { j: j + 1, k: k + 1, x });
                }
            }
        }
    }
    Ok(())
}

/// Which qc requirement a connection violates, with the first offending
/// direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QcPreservationFailure {
    Splitting(usize),
    QuaternionicTensor(usize),
    ReebTensor(usize),
}

fn vertical_projection(alg: &QHAlgebra) -> Endo {
    let v = alg.vertical();
    Endo::from_fn(alg.dim(), |a, b| if a == b && v.contains(&a) { Scalar::one() } else { Scalar::zero() })
}

/// `sum_i I_i (x) I_i`.
pub fn quaternionic_tensor(qc: &QcStructure) -> Tensor {
    qc.i.iter().fold(Tensor::zero(qc.i[0].dim(), 4), |acc, e| {
        let t = Tensor::from_endo(e);
        &acc + &t.tensor(&t)
    })
}

/// `sum_i v_i (x) I_i`.
pub fn reeb_tensor(vectors: &[Vector; 3], qc: &QcStructure) -> Tensor {
    vectors
        .iter()
        .zip(&qc.i)
        .fold(Tensor::zero(qc.i[0].dim(), 3), |acc, (v, e)| &acc + &Tensor::from_vector(v).tensor(&Tensor::from_endo(e)))
}

/// Splitting preserved, `nabla(sum I_i (x) I_i) = 0`, `nabla(sum xi~_i (x) I_i) = 0`.
pub fn qc_preservation_check(
    alg: &QHAlgebra,
    conn: &Connection,
) -> std::result::Result<(), QcPreservationFailure> {
    let qc = build_qc(alg).expect("qc structure on n_p");
    conn.preserves(&alg.vertical()).map_err(QcPreservationFailure::Splitting)?;
    conn.is_parallel(&quaternionic_tensor(&qc)).map_err(|(x, _)| QcPreservationFailure::QuaternionicTensor(x))?;
    conn.is_parallel(&reeb_tensor(&qc.xi_tilde, &qc)).map_err(|(x, _)| QcPreservationFailure::ReebTensor(x))?;
    Ok(())
}

/// Result of solving for skew torsions that preserve the qc structure.
#[derive(Clone, Debug)]
pub struct QcUniqueness {
    pub solutions: TorsionSolutions,
    /// The same system without the splitting condition.
    pub relaxed: TorsionSolutions,
}

impl QcUniqueness {
    pub fn span_dim(&self) -> usize {
        self.solutions.span_dim()
    }

    pub fn torsion(&self) -> Option<KForm> {
        self.solutions.unique()
    }
}

/// Solves "`nabla^g + T/2` preserves the qc structure" over all 3-forms `T`.
/// The Reeb tensor is taken with `xi_i` in place of `xi~_i = -(l/2) xi_i`;
/// the constant factor does not change parallelism.
pub fn qc_unique_skew(alg: &QHAlgebra) -> Result<QcUniqueness> {
    if alg.p() > 2 {
        return Err(Error::InvalidParameter(format!("qc uniqueness solve limited to p <= 2, got {}", alg.p())));
    }
    let qc = build_qc(alg)?;
    let xis = [1, 2, 3].map(|k| alg.basis(xi(k)));
    let split = Tensor::from_endo(&vertical_projection(alg));
    let quat = quaternionic_tensor(&qc);
    let reeb = reeb_tensor(&xis, &qc);
    Ok(QcUniqueness {
        solutions: solve_parallel_torsion(alg, &[split, quat.clone(), reeb.clone()])?,
        relaxed: solve_parallel_torsion(alg, &[quat, reeb])?,
    })
}

/// The Levi-Civita connection, exposed here for the negative control.
pub fn levi_civita_fails_qc(alg: &QHAlgebra) -> std::result::Result<(), QcPreservationFailure> {
    qc_preservation_check(alg, &levi_civita(alg))
}
