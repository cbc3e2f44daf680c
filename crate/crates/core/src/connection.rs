//! Left-invariant metric connections on `n_p`.
//!
//! A connection is stored as its connection map `Omega: n -> so(n)`, with
//! `nabla_X Y = Omega(X) Y` on left-invariant fields. Curvature is
//! `R(X, Y) = [Omega(X), Omega(Y)] - Omega([X, Y])`.

use std::collections::BTreeMap;

use crate::algebra::{xi, QHAlgebra};
use crate::endo::{two_form_endo, Endo};
use crate::error::{Error, Result};
use crate::exterior::{interior, wedge, KForm, Vector};
use crate::linalg::{LaurentSolution, LaurentSystem, Span};
use crate::scalar::{Rational, Scalar};
use crate::tensor::Tensor;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    omega: Vec<Endo>,
}

impl Connection {
    pub fn from_omega(omega: Vec<Endo>) -> Result<Self> {
        let n = omega.len();
        for o in &omega {
            if o.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: o.dim() });
            }
            if !o.is_skew() {
                return Err(Error::NotSkew);
            }
        }
        Ok(Self { omega })
    }

    pub fn dim(&self) -> usize {
        self.omega.len()
    }

    /// `Omega(e_i)`.
    pub fn omega(&self, i: usize) -> &Endo {
        &self.omega[i]
    }

    pub fn omega_at(&self, x: &Vector) -> Endo {
        let mut out = Endo::zero(self.dim());
        for (k, c) in x.support() {
            out = &out + &self.omega[k].scale(c);
        }
        out
    }

    pub fn covariant_derivative(&self, x: &Vector, y: &Vector) -> Vector {
        self.omega_at(x).apply(y)
    }

    /// `T(X, Y, Z) = g(nabla_X Y - nabla_Y X - [X, Y], Z)` on frame vectors.
    pub fn torsion_tensor(&self, alg: &QHAlgebra) -> Tensor {
        let n = self.dim();
        let mut t = Tensor::zero(n, 3);
        for x in 0..n {
            for y in 0..n {
                if x == y {
                    continue;
                }
                let v = &(&self.omega[x].column(y) - &self.omega[y].column(x)) - &alg.bracket_basis(x, y);
                for (z, c) in v.support() {
                    t.add_at(vec![x, y, z], c.clone());
                }
            }
        }
        t
    }

    /// The torsion as a 3-form, or the first index triple where it fails to be
    /// totally skew.
    pub fn torsion_form(&self, alg: &QHAlgebra) -> std::result::Result<KForm, [usize; 3]> {
        let t = self.torsion_tensor(alg);
        let n = self.dim();
        let mut f = KForm::zero(n, 3);
        for (idx, c) in t.components() {
            let (x, y, z) = (idx[0], idx[1], idx[2]);
            let skew = x != z && y != z && t.get(&[y, z, x]) == *c && t.get(&[x, z, y]) == -c;
            if !skew {
                return Err([x, y, z]);
            }
            if x < y && y < z {
                f.add_component(&[x, y, z], c.clone());
            }
        }
        Ok(f)
    }

    pub fn curvature(&self, alg: &QHAlgebra) -> CurvatureTensor {
        let n = self.dim();
        let mut values = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                let br = alg.bracket_basis(i, j);
                let r = &self.omega[i].commutator(&self.omega[j]) - &self.omega_at(&br);
                values.insert((i, j), r);
            }
        }
        CurvatureTensor { n, values }
    }

    /// `nabla_{e_x} t` for every frame vector.
    pub fn nabla_tensor(&self, t: &Tensor) -> Vec<Tensor> {
        self.omega.iter().map(|o| t.act(o)).collect()
    }

    /// `Ok` if `t` is parallel; otherwise the first direction and `nabla_X t`.
    pub fn is_parallel(&self, t: &Tensor) -> std::result::Result<(), (usize, Tensor)> {
        for (x, o) in self.omega.iter().enumerate() {
            let d = t.act(o);
            if !d.is_zero() {
                return Err((x, d));
            }
        }
        Ok(())
    }

    /// `Ok` if every `Omega(X)` maps the span of `idx` into itself.
    pub fn preserves(&self, idx: &[usize]) -> std::result::Result<(), usize> {
        match self.omega.iter().position(|o| !o.preserves(idx)) {
            Some(x) => Err(x),
            None => Ok(()),
        }
    }
}

/// `R(e_i, e_j)` for `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurvatureTensor {
    n: usize,
    values: BTreeMap<(usize, usize), Endo>,
}

impl CurvatureTensor {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Endo {
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.values[&(i, j)].clone(),
            std::cmp::Ordering::Greater => -&self.values[&(j, i)],
            std::cmp::Ordering::Equal => Endo::zero(self.n),
        }
    }

    pub fn values(&self) -> impl Iterator<Item = ((usize, usize), &Endo)> {
        self.values.iter().map(|(k, v)| (*k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(Endo::is_zero)
    }

    /// `R(a, b, c, d) = g(R(e_a, e_b) e_c, e_d)`.
    pub fn to_tensor(&self) -> Tensor {
        let mut t = Tensor::zero(self.n, 4);
        for (&(a, b), r) in &self.values {
            for c in 0..self.n {
                for d in 0..self.n {
                    let v = r.get(d, c);
                    if !v.is_zero() {
                        t.add_at(vec![a, b, c, d], v.clone());
                        t.add_at(vec![b, a, c, d], -v.clone());
                    }
                }
            }
        }
        t
    }

    /// `Ric(X, Y) = sum_i g(R(e_i, X) Y, e_i)`.
    pub fn ricci(&self) -> Endo {
        let n = self.n;
        Endo::from_fn(n, |x, y| (0..n).map(|i| self.get(i, x).get(i, y).clone()).sum())
    }

    pub fn scalar_curvature(&self) -> Scalar {
        self.ricci().trace()
    }
}

/// Levi-Civita connection from the Koszul formula for left-invariant fields,
/// `2 g(nabla_X Y, Z) = g([X,Y],Z) - g([Y,Z],X) + g([Z,X],Y)`.
pub fn levi_civita(alg: &QHAlgebra) -> Connection {
    let n = alg.dim();
    let half = Scalar::ratio(1, 2);
    let c = |a: usize, b: usize, k: usize| alg.bracket_basis(a, b).0[k].clone();
    let omega = (0..n)
        .map(|x| {
            Endo::from_fn(n, |z, y| {
                let s = &(&c(x, y, z) - &c(y, z, x)) + &c(z, x, y);
                &s * &half
            })
        })
        .collect();
    Connection { omega }
}

/// The metric connection `nabla^g + T/2` with skew torsion `T`.
pub fn with_torsion(alg: &QHAlgebra, t: &KForm) -> Result<Connection> {
    if t.degree() != 3 {
        return Err(Error::WrongDegree { expected: 3, got: t.degree() });
    }
    if t.dim() != alg.dim() {
        return Err(Error::DimensionMismatch { expected: alg.dim(), got: t.dim() });
    }
    let lc = levi_civita(alg);
    let half = Scalar::ratio(1, 2);
    let omega = (0..alg.dim())
        .map(|x| {
            let contraction = interior(&alg.basis(x), t)?;
            Ok(lc.omega(x) + &two_form_endo(&contraction)?.scale(&half))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Connection { omega })
}

/// `T = eta_1 ^ d eta_1 + eta_2 ^ d eta_2 + eta_3 ^ d eta_3 - 4 l eta_123`.
pub fn canonical_torsion(alg: &QHAlgebra) -> KForm {
    let n = alg.dim();
    let mut t = KForm::zero(n, 3);
    for i in 1..=3 {
        t = &t + &wedge(&alg.eta(i), &alg.d(&alg.eta(i))).expect("same algebra");
    }
    t.add_component(&[xi(1), xi(2), xi(3)], alg.lambda().scale(&Rational::from_integer((-4).into())));
    t
}

pub fn canonical_connection(alg: &QHAlgebra) -> Connection {
    with_torsion(alg, &canonical_torsion(alg)).expect("3-form on this algebra")
}

/// The flat connection `Omega = 0`.
pub fn biquard(alg: &QHAlgebra) -> Connection {
    Connection { omega: vec![Endo::zero(alg.dim()); alg.dim()] }
}

/// Which `d eta` enters `H_3`. `Alternate` uses `d eta_1`;
/// it serves as a negative control.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HVariant {
    Standard,
    Alternate,
}

/// The 2-forms `H_1 = -(1/l) d eta_1 + 2 eta_23`, `H_2 = -(1/l) d eta_2 - 2 eta_13`,
/// `H_3 = -(1/l) d eta_3 + 2 eta_12`.
pub fn h_forms(alg: &QHAlgebra, variant: HVariant) -> [KForm; 3] {
    let n = alg.dim();
    let inv = -alg.lambda().inv().expect("monomial");
    let d = |i: usize| alg.d(&alg.eta(i)).scale(&inv);
    let h3_source = match variant {
        HVariant::Standard => 3,
        HVariant::Alternate => 1,
    };
    [
        &d(1) + &KForm::basis(n, &[xi(2), xi(3)]).scale(&Scalar::int(2)),
        &d(2) + &KForm::basis(n, &[xi(1), xi(3)]).scale(&Scalar::int(-2)),
        &d(h3_source) + &KForm::basis(n, &[xi(1), xi(2)]).scale(&Scalar::int(2)),
    ]
}

pub fn h_endos(alg: &QHAlgebra, variant: HVariant) -> [Endo; 3] {
    h_forms(alg, variant).map(|h| two_form_endo(&h).expect("2-form"))
}

/// `[H_1, H_2] = 2 H_3`, `[H_3, H_1] = 2 H_2`, `[H_2, H_3] = 2 H_1`.
pub fn su2_relations(h: &[Endo; 3]) -> bool {
    let two = Scalar::int(2);
    h[0].commutator(&h[1]) == h[2].scale(&two)
        && h[2].commutator(&h[0]) == h[1].scale(&two)
        && h[1].commutator(&h[2]) == h[0].scale(&two)
}

/// `R(X, Y) = l^2 sum_i H_i(X, Y) H_i`.
pub fn curvature_closed_form(alg: &QHAlgebra) -> CurvatureTensor {
    let n = alg.dim();
    let hf = h_forms(alg, HVariant::Standard);
    let he = h_endos(alg, HVariant::Standard);
    let l2 = alg.lambda().pow(2);
    let mut values = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut r = Endo::zero(n);
            for k in 0..3 {
                let c = hf[k].component(&[i, j]);
                if !c.is_zero() {
                    r = &r + &he[k].scale(&(&c * &l2));
                }
            }
            values.insert((i, j), r);
        }
    }
    CurvatureTensor { n, values }
}

/// `sigma_T(X, Y, Z, W) = cyclic_{XYZ} g(T(X, Y), T(Z, W))`.
pub fn sigma_t(t: &KForm) -> Tensor {
    let n = t.dim();
    let tt = Tensor::from_form(t);
    // T(X, Y) as a vector: components t[x][y][k]
    let mut out = Tensor::zero(n, 4);
    let comps: Vec<(Vec<usize>, Scalar)> = tt.components().map(|(k, v)| (k.to_vec(), v.clone())).collect();
    for (a, va) in &comps {
        for (b, vb) in &comps {
            // g(T(a0, a1), T(b0, b1)) = sum_k T(a0, a1, k) T(b0, b1, k)
            if a[2] != b[2] {
                continue;
            }
            let prod = va * vb;
            let (x, y, z, w) = (a[0], a[1], b[0], b[1]);
            // contributes to the cyclic sums indexed (x,y,z,w), (z,x,y,w) and (y,z,x,w)
            out.add_at(vec![x, y, z, w], prod.clone());
            out.add_at(vec![z, x, y, w], prod.clone());
            out.add_at(vec![y, z, x, w], prod);
        }
    }
    out
}

/// Cyclic sum over the first three slots of a rank-4 tensor.
pub fn cyclic_sum(r: &Tensor) -> Tensor {
    let mut out = Tensor::zero(r.dim(), 4);
    for (idx, v) in r.components() {
        let (x, y, z, w) = (idx[0], idx[1], idx[2], idx[3]);
        out.add_at(vec![x, y, z, w], v.clone());
        out.add_at(vec![z, x, y, w], v.clone());
        out.add_at(vec![y, z, x, w], v.clone());
    }
    out
}

/// Ricci-based scalar curvatures of a connection and of the Levi-Civita
/// connection, computed independently.
pub fn scalars(alg: &QHAlgebra, conn: &Connection) -> (Scalar, Scalar) {
    let s_nabla = conn.curvature(alg).scalar_curvature();
    let s_g = levi_civita(alg).curvature(alg).scalar_curvature();
    (s_nabla, s_g)
}

pub fn ricci(alg: &QHAlgebra, conn: &Connection) -> Endo {
    conn.curvature(alg).ricci()
}

/// The holonomy algebra as a list of linearly independent skew endomorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Holonomy {
    pub basis: Vec<Endo>,
}

impl Holonomy {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `true` if `e` lies in the span, tested at `l = at`.
    pub fn contains(&self, e: &Endo, at: &Rational) -> Result<bool> {
        let width = e.dim() * e.dim();
        let mut span = Span::new(width);
        for b in &self.basis {
            span.insert(&b.eval_flat(at)?);
        }
        Ok(span.contains(&e.eval_flat(at)?))
    }

    /// Every frame subspace in `blocks` is mapped into itself.
    pub fn preserves(&self, idx: &[usize]) -> bool {
        self.basis.iter().all(|b| b.preserves(idx))
    }

    /// Dimension of the associative algebra generated by the identity and the
    /// restrictions to `idx`; equal to `|idx|^2` iff the action is absolutely
    /// irreducible.
    pub fn generated_algebra_dim(&self, idx: &[usize], at: &Rational) -> Result<usize> {
        let k = idx.len();
        let gens: Vec<Endo> = self.basis.iter().map(|b| b.block(idx)).collect();
        let mut span = Span::new(k * k);
        let mut elems = vec![Endo::identity(k)];
        span.insert(&elems[0].eval_flat(at)?);
        let mut frontier = elems.clone();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for a in &frontier {
                for g in &gens {
                    let prod = a * g;
                    if span.insert(&prod.eval_flat(at)?) {
                        next.push(prod);
                    }
                }
            }
            elems.extend(next.iter().cloned());
            frontier = next;
        }
        Ok(span.dim())
    }
}

/// Ambrose–Singer closure: the smallest Lie algebra containing every `R(X, Y)`
/// and closed under `[Omega(X), -]`. Spans are computed at `l = 1` and the
/// dimension is re-checked at `l = 2`.
pub fn holonomy(alg: &QHAlgebra, conn: &Connection) -> Result<Holonomy> {
    let hol = holonomy_at(alg, conn, &alg.sample_point(1))?;
    let again = holonomy_at(alg, conn, &alg.sample_point(2))?;
    if hol.dim() != again.dim() {
        return Err(Error::Inconsistent(format!(
            "holonomy dimension depends on the sample point: {} vs {}",
            hol.dim(),
            again.dim()
        )));
    }
    Ok(hol)
}

fn holonomy_at(alg: &QHAlgebra, conn: &Connection, at: &Rational) -> Result<Holonomy> {
    let n = alg.dim();
    let limit = n * (n - 1) / 2;
    let curv = conn.curvature(alg);
    let mut span = Span::new(n * n);
    let mut basis: Vec<Endo> = Vec::new();
    let mut frontier: Vec<Endo> = Vec::new();
    for (_, r) in curv.values() {
        if span.insert(&r.eval_flat(at)?) {
            basis.push(r.clone());
            frontier.push(r.clone());
        }
    }
    while !frontier.is_empty() {
        if basis.len() > limit {
            return Err(Error::HolonomyOverflow(limit));
        }
        let mut next = Vec::new();
        for a in &frontier {
            let mut candidates: Vec<Endo> = conn.omega.iter().map(|o| o.commutator(a)).collect();
            candidates.extend(basis.iter().map(|b| b.commutator(a)));
            for c in candidates {
                if span.insert(&c.eval_flat(at)?) {
                    basis.push(c.clone());
                    next.push(c);
                }
            }
        }
        frontier = next;
    }
    Ok(Holonomy { basis })
}

/// Why the transvection algebra could not be built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransvectionFailure {
    TorsionNotSkew([usize; 3]),
    TorsionNotParallel(usize),
    CurvatureNotParallel(usize),
    Jacobi([usize; 3]),
    ReductiveCondition([usize; 3]),
}

/// An element `A + X` of `hol + m`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct TransvectionElement {
    hol: Endo,
    m: Vector,
}

/// Builds `hol + m` with `[A, B] = AB - BA`, `[A, X] = A X` and
/// `[X, Y] = -T(X, Y) - R(X, Y)`, then checks the Jacobi identity and
/// `<[X, Y]_m, Z> + <Y, [X, Z]_m> = 0` on a basis.
pub fn transvection_check(alg: &QHAlgebra, conn: &Connection) -> std::result::Result<(), TransvectionFailure> {
    let n = alg.dim();
    let t = conn.torsion_form(alg).map_err(TransvectionFailure::TorsionNotSkew)?;
    let curv = conn.curvature(alg);
    if let Err((x, _)) = conn.is_parallel(&Tensor::from_form(&t)) {
        return Err(TransvectionFailure::TorsionNotParallel(x));
    }
    if let Err((x, _)) = conn.is_parallel(&curv.to_tensor()) {
        return Err(TransvectionFailure::CurvatureNotParallel(x));
    }
    let hol = holonomy(alg, conn).expect("holonomy closure");

    let torsion_vec = |x: &Vector, y: &Vector| -> Vector {
        let ty = interior(y, &interior(x, &t).expect("degree 3")).expect("degree 2");
        let mut v = Vector::zero(n);
        for (idx, c) in ty.components() {
            v.0[idx[0]] = c.clone();
        }
        v
    };
    let curvature_at = |x: &Vector, y: &Vector| -> Endo {
        let mut out = Endo::zero(n);
        for (a, ca) in x.support() {
            for (b, cb) in y.support() {
                if a != b {
                    out = &out + &curv.get(a, b).scale(&(ca * cb));
                }
            }
        }
        out
    };
    let bracket = |u: &TransvectionElement, v: &TransvectionElement| -> TransvectionElement {
        let hol_part = &u.hol.commutator(&v.hol) - &curvature_at(&u.m, &v.m);
        let m_part = &(&u.hol.apply(&v.m) - &v.hol.apply(&u.m)) - &torsion_vec(&u.m, &v.m);
        TransvectionElement { hol: hol_part, m: m_part }
    };

    let mut elems: Vec<TransvectionElement> =
        hol.basis.iter().map(|h| TransvectionElement { hol: h.clone(), m: Vector::zero(n) }).collect();
    elems.extend((0..n).map(|i| TransvectionElement { hol: Endo::zero(n), m: alg.basis(i) }));
    let k = elems.len();
    for a in 0..k {
        for b in a + 1..k {
            let ab = bracket(&elems[a], &elems[b]);
            for c in b + 1..k {
                let j1 = bracket(&ab, &elems[c]);
                let j2 = bracket(&bracket(&elems[b], &elems[c]), &elems[a]);
                let j3 = bracket(&bracket(&elems[c], &elems[a]), &elems[b]);
                let hol_sum = &(&j1.hol + &j2.hol) + &j3.hol;
                let m_sum = &(&j1.m + &j2.m) + &j3.m;
                if !hol_sum.is_zero() || !m_sum.is_zero() {
                    return Err(TransvectionFailure::Jacobi([a, b, c]));
                }
            }
        }
    }

    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let (ey, ez) = (alg.basis(y), alg.basis(z));
                let xy = bracket(&elems[hol.dim() + x], &elems[hol.dim() + y]).m;
                let xz = bracket(&elems[hol.dim() + x], &elems[hol.dim() + z]).m;
                if !(&xy.dot(&ez) + &ey.dot(&xz)).is_zero() {
                    return Err(TransvectionFailure::ReductiveCondition([x, y, z]));
                }
            }
        }
    }
    Ok(())
}

/// Solutions `T'` of "every tensor in the list is parallel for
/// `nabla^g + T'/2`", with `T'` ranging over all 3-forms.
#[derive(Clone, Debug)]
pub struct TorsionSolutions {
    n: usize,
    basis: Vec<[usize; 3]>,
    solution: Option<LaurentSolution>,
}

impl TorsionSolutions {
    pub fn is_consistent(&self) -> bool {
        self.solution.is_some()
    }

    /// Dimension of the homogeneous solution space.
    pub fn nullity(&self) -> Option<usize> {
        self.solution.as_ref().map(|s| s.nullspace.len())
    }

    /// Dimension of the linear span of the solution set: `0` if inconsistent,
    /// otherwise the nullity plus one when the particular solution is nonzero.
    pub fn span_dim(&self) -> usize {
        match &self.solution {
            None => 0,
            Some(s) => s.nullspace.len() + usize::from(s.particular.iter().any(|c| !c.is_zero())),
        }
    }

    pub fn particular(&self) -> Option<KForm> {
        let s = self.solution.as_ref()?;
        let mut f = KForm::zero(self.n, 3);
        for (triple, c) in self.basis.iter().zip(&s.particular) {
            f.add_component(triple, c.clone());
        }
        Some(f)
    }

    /// The solution when it is unique.
    pub fn unique(&self) -> Option<KForm> {
        (self.nullity()? == 0).then(|| self.particular()).flatten()
    }
}

/// Solves for skew torsions whose connection `nabla^g + T/2` leaves every
/// tensor in `tensors` parallel.
pub fn solve_parallel_torsion(alg: &QHAlgebra, tensors: &[Tensor]) -> Result<TorsionSolutions> {
    let n = alg.dim();
    let basis: Vec<[usize; 3]> =
        (0..n).flat_map(|a| (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| [a, b, c]))).collect();
    let lc = levi_civita(alg);
    let half = Scalar::ratio(1, 2);
    type Row = (BTreeMap<usize, Scalar>, Scalar);
    let mut rows: BTreeMap<(usize, usize, Vec<usize>), Row> = BTreeMap::new();
    for (ti, t) in tensors.iter().enumerate() {
        for x in 0..n {
            for (idx, v) in t.act(lc.omega(x)).components() {
                rows.entry((ti, x, idx.to_vec())).or_default().1 -= v.clone();
            }
            let ex = alg.basis(x);
            for (col, triple) in basis.iter().enumerate().filter(|(_, t)| t.contains(&x)) {
                let contraction = interior(&ex, &KForm::basis(n, triple))?;
                let e = two_form_endo(&contraction)?.scale(&half);
                for (idx, v) in t.act(&e).components() {
                    *rows.entry((ti, x, idx.to_vec())).or_default().0.entry(col).or_default() += v.clone();
                }
            }
        }
    }
    let mut system = LaurentSystem::new(basis.len());
    for (coeffs, rhs) in rows.into_values() {
        let (coeffs, rhs) = normalize_row(coeffs, rhs);
        system.push(&coeffs, rhs)?;
    }
    Ok(TorsionSolutions { n, basis, solution: system.solve() })
}

/// Divides a row by `l^k` when every coefficient is a multiple of `l^k`.
fn normalize_row(coeffs: BTreeMap<usize, Scalar>, rhs: Scalar) -> (BTreeMap<usize, Scalar>, Scalar) {
    let powers: Vec<i32> =
        coeffs.values().filter(|c| !c.is_zero()).filter_map(|c| c.as_monomial().map(|(_, k)| k)).collect();
    let nonzero = coeffs.values().filter(|c| !c.is_zero()).count();
    match powers.first() {
        Some(&k) if k != 0 && powers.len() == nonzero && powers.iter().all(|&q| q == k) => {
            let inv = Scalar::monomial(Rational::from_integer(1.into()), -k);
            (coeffs.into_iter().map(|(c, v)| (c, &v * &inv)).collect(), &rhs * &inv)
        }
        _ => (coeffs, rhs),
    }
}

/// The 4-form `theta_r ^ theta_{p+r} ^ theta_{2p+r} ^ theta_{3p+r}`.
pub fn block_volume(alg: &QHAlgebra, r: usize) -> KForm {
    KForm::basis(alg.dim(), &alg.quaternionic_block(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::tau;
    use crate::exterior::form_inner;
    use crate::scalar::rational;

    fn l() -> Scalar {
        Scalar::lambda()
    }

    /// Direct Koszul evaluation, independent of `levi_civita`.
    fn koszul(alg: &QHAlgebra, x: usize, y: usize) -> Vector {
        let n = alg.dim();
        let g = |a: &Vector, b: &Vector| a.dot(b);
        let (ex, ey) = (alg.basis(x), alg.basis(y));
        Vector(
            (0..n)
                .map(|z| {
                    let ez = alg.basis(z);
                    let s = &(&g(&alg.bracket(&ex, &ey), &ez) - &g(&alg.bracket(&ey, &ez), &ex))
                        + &g(&alg.bracket(&ez, &ex), &ey);
                    s.scale(&rational(1, 2))
                })
                .collect(),
        )
    }

    #[test]
    fn levi_civita_values() {
        let alg = QHAlgebra::build(1).unwrap();
        let lc = levi_civita(&alg);
        let half_l = l().scale(&rational(1, 2));
        assert_eq!(lc.covariant_derivative(&alg.basis(tau(1)), &alg.basis(tau(2))), alg.basis(xi(1)).scale(&half_l));
        assert_eq!(lc.covariant_derivative(&alg.basis(xi(1)), &alg.basis(tau(1))), alg.basis(tau(2)).scale(&-half_l));
        for x in 0..alg.dim() {
            for y in 0..alg.dim() {
                assert_eq!(lc.omega(x).column(y), koszul(&alg, x, y));
            }
        }
        // torsion-free
        assert!(lc.torsion_tensor(&alg).is_zero());
    }

    #[test]
    fn killing_one_forms() {
        // nabla^g_X eta_i = 1/2 X ⨼ d eta_i, with the dual vector of nabla^g_X xi_i
        for p in 1..=2 {
            let alg = QHAlgebra::build(p).unwrap();
            let lc = levi_civita(&alg);
            for i in 1..=3 {
                let d = alg.d(&alg.eta(i));
                for x in 0..alg.dim() {
                    let lhs = KForm::from_vector(&lc.covariant_derivative(&alg.basis(x), &alg.basis(xi(i))));
                    let rhs = interior(&alg.basis(x), &d).unwrap().scale(&Scalar::ratio(1, 2));
                    assert_eq!(lhs, rhs, "p={p} i={i} x={x}");
                }
            }
        }
    }

    #[test]
    fn canonical_connection_map() {
        for p in 1..=3 {
            let alg = QHAlgebra::build(p).unwrap();
            let conn = canonical_connection(&alg);
            let h = h_endos(&alg, HVariant::Standard);
            for l_ in 1..=4 * p {
                assert!(conn.omega(tau(l_)).is_zero());
            }
            for i in 1..=3 {
                assert_eq!(conn.omega(xi(i)), &h[i - 1].scale(&-l()));
            }
            assert_eq!(conn.torsion_form(&alg), Ok(canonical_torsion(&alg)));
        }
    }

    #[test]
    fn torsion_components() {
        let alg = QHAlgebra::build(1).unwrap();
        let t = canonical_torsion(&alg);
        assert_eq!(t.component(&[xi(1), tau(1), tau(2)]), -l());
        assert_eq!(t.component(&[xi(1), xi(2), xi(3)]), l().scale(&rational(-4, 1)));
        assert!(with_torsion(&alg, &alg.eta(1)).is_err());
        assert_eq!(with_torsion(&alg, &KForm::zero(7, 3)).unwrap(), levi_civita(&alg));
    }

    #[test]
    fn norm_of_torsion_matches_brute_force() {
        // oracle: count components of the defining expression by hand
        for p in 1..=3 {
            let alg = QHAlgebra::build(p).unwrap();
            let t = canonical_torsion(&alg);
            // each eta_i ^ d eta_i has 2p components of size l; eta_123 has 4l
            let mut brute = Scalar::zero();
            for i in 1..=3 {
                let w = wedge(&alg.eta(i), &alg.d(&alg.eta(i))).unwrap();
                for (_, c) in w.components() {
                    brute += c * c;
                }
            }
            brute += l().pow(2).scale(&rational(16, 1));
            let expected = l().pow(2).scale(&rational(6 * p as i64 + 16, 1));
            assert_eq!(brute, expected);
            assert_eq!(form_inner(&t, &t).unwrap(), expected);
        }
    }

    #[test]
    fn h_brackets() {
        let alg = QHAlgebra::build(1).unwrap();
        let h = h_endos(&alg, HVariant::Standard);
        assert!(su2_relations(&h));
        assert_eq!(h[0].apply(&alg.basis(xi(2))), alg.basis(xi(3)).scale(&Scalar::int(2)));
        let alternate = h_endos(&alg, HVariant::Alternate);
        assert!(!su2_relations(&alternate));
    }

    #[test]
    fn curvature_values() {
        let alg = QHAlgebra::build(1).unwrap();
        let curv = canonical_connection(&alg).curvature(&alg);
        let h = h_endos(&alg, HVariant::Standard);
        let l2 = l().pow(2);
        assert_eq!(curv.get(tau(1), tau(2)), h[0].scale(&l2));
        assert_eq!(curv.get(xi(1), xi(2)), h[2].scale(&(&l2 * &Scalar::int(2))));
        assert_eq!(curv, curvature_closed_form(&alg));

        let flat = alg.abelianized();
        assert!(levi_civita(&flat).curvature(&flat).is_zero());
    }

    #[test]
    fn curvature_sign_is_pinned() {
        // the opposite sign convention would produce -l^2 sum H_i (x) H_i
        let alg = QHAlgebra::build(1).unwrap();
        let curv = canonical_connection(&alg).curvature(&alg);
        let closed = curvature_closed_form(&alg);
        let flipped: Vec<Endo> = closed.values().map(|(_, e)| -e).collect();
        let ours: Vec<Endo> = curv.values().map(|(_, e)| e.clone()).collect();
        assert_ne!(ours, flipped);
    }

    #[test]
    fn first_bianchi_with_parallel_torsion() {
        let alg = QHAlgebra::build(1).unwrap();
        let conn = canonical_connection(&alg);
        let r = conn.curvature(&alg).to_tensor();
        assert_eq!(cyclic_sum(&r), sigma_t(&canonical_torsion(&alg)));
    }

    #[test]
    fn ricci_and_scalars() {
        for p in 1..=3usize {
            let alg = QHAlgebra::build(p).unwrap();
            let conn = canonical_connection(&alg);
            let ric = ricci(&alg, &conn);
            let l2 = l().pow(2);
            let expected = Endo::from_fn(alg.dim(), |i, j| {
                if i != j {
                    Scalar::zero()
                } else if i < 3 {
                    l2.scale(&rational(-8, 1))
                } else {
                    l2.scale(&rational(-3, 1))
                }
            });
            assert_eq!(ric, expected);
            let (s_nabla, s_g) = scalars(&alg, &conn);
            assert_eq!(s_nabla, l2.scale(&rational(-12 * (p as i64 + 2), 1)));
            assert_eq!(s_g, l2.scale(&rational(-3 * p as i64, 1)));
            let t = canonical_torsion(&alg);
            assert_eq!(&s_g - &s_nabla, form_inner(&t, &t).unwrap().scale(&rational(3, 2)));
        }
    }

    #[test]
    fn parallel_objects() {
        for p in 1..=3 {
            let alg = QHAlgebra::build(p).unwrap();
            let conn = canonical_connection(&alg);
            assert!(conn.is_parallel(&Tensor::from_form(&canonical_torsion(&alg))).is_ok());
            assert!(conn.is_parallel(&conn.curvature(&alg).to_tensor()).is_ok());
            assert!(conn.is_parallel(&Tensor::from_form(&KForm::basis(alg.dim(), &[0, 1, 2]))).is_ok());
            for r in 1..=p {
                assert!(conn.is_parallel(&Tensor::from_form(&block_volume(&alg, r))).is_ok());
            }
        }
    }

    #[test]
    fn holonomy_is_su2() {
        for p in 1..=2 {
            let alg = QHAlgebra::build(p).unwrap();
            let conn = canonical_connection(&alg);
            let hol = holonomy(&alg, &conn).unwrap();
            assert_eq!(hol.dim(), 3);
            let one = rational(1, 1);
            for h in h_endos(&alg, HVariant::Standard) {
                assert!(hol.contains(&h, &one).unwrap());
            }
            assert!(hol.preserves(&alg.vertical()));
            assert_eq!(hol.generated_algebra_dim(&alg.vertical(), &one).unwrap(), 9);
            for r in 1..=p {
                assert!(hol.preserves(&alg.quaternionic_block(r)));
            }
            if p == 2 {
                let mixed = [tau(1), tau(2), tau(3), tau(4)];
                assert!(!hol.preserves(&mixed));
            }
        }
        let alg = QHAlgebra::build(1).unwrap();
        assert_eq!(holonomy(&alg, &biquard(&alg)).unwrap().dim(), 0);
    }

    #[test]
    fn transvection_algebra() {
        for p in 1..=2 {
            let alg = QHAlgebra::build(p).unwrap();
            assert_eq!(transvection_check(&alg, &canonical_connection(&alg)), Ok(()));
        }
    }

    #[test]
    fn perturbed_torsion_is_rejected() {
        let alg = QHAlgebra::build(2).unwrap();
        let t = &canonical_torsion(&alg) + &KForm::basis(alg.dim(), &[tau(4), tau(5), tau(6)]).scale(&l());
        let conn = with_torsion(&alg, &t).unwrap();
        assert!(conn.is_parallel(&Tensor::from_form(&t)).is_err());
        assert!(matches!(transvection_check(&alg, &conn), Err(TransvectionFailure::TorsionNotParallel(_))));
    }

    #[test]
    fn solver_recovers_canonical_torsion() {
        let alg = QHAlgebra::build(1).unwrap();
        let t = canonical_torsion(&alg);
        let sol = solve_parallel_torsion(&alg, &[Tensor::from_form(&t)]).unwrap();
        assert!(sol.is_consistent());
        // the canonical torsion solves its own parallelism condition
        let particular = sol.particular().unwrap();
        let again = with_torsion(&alg, &particular).unwrap();
        assert!(again.is_parallel(&Tensor::from_form(&t)).is_ok());
        let none = solve_parallel_torsion(&alg, &[]).unwrap();
        assert_eq!(none.nullity(), Some(35));
        assert_eq!(none.span_dim(), 35);
    }

    #[test]
    fn biquard_properties() {
        let alg = QHAlgebra::build(1).unwrap();
        let b = biquard(&alg);
        assert!(b.curvature(&alg).is_zero());
        assert!(b.torsion_form(&alg).is_err());
    }
}
