//! Verification suites and the report they produce.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::algebra::{tau, xi, QHAlgebra};
use crate::clifford::{build_gamma, clifford_action, spin_lift, volume_element};
use crate::cone::{cone_constant, cone_criterion};
use crate::connection::{
    biquard, block_volume, canonical_connection, canonical_torsion, curvature_closed_form, cyclic_sum, h_endos,
    h_forms, holonomy, levi_civita, ricci, scalars, sigma_t, su2_relations, transvection_check, with_torsion,
    HVariant,
};
use crate::contact::{
    build_all, build_phi, build_qc, characteristic_connection, characteristic_torsion_formula, compatibility_check,
    qc_invariants, qc_preservation_check, qc_unique_skew, quasi_sasaki_check, FormConvention, PhiVariant,
};
use crate::endo::{endo_two_form, two_form_endo, Endo};
use crate::error::{Error, Result};
use crate::exterior::{form_inner, hodge_star, interior, wedge, KForm, Vector};
use crate::g2::{
    build_omega, characteristic_torsion_g2, cocalibrated_check, generalized_killing_check, is_generic,
    parallel_spinor, proof_identities_check, psi_i, torsion_spectrum,
};
use crate::scalar::{parse_rational, rational, Rational, Scalar};
use crate::tensor::Tensor;

/// Every operation the `all` suite is expected to exercise.
pub const OPERATIONS: &[&str] = &[
    "wedge",
    "interior",
    "hodge_star",
    "form_inner",
    "two_form_endo",
    "endo_two_form",
    "ce_differential",
    "build_gamma",
    "clifford_action",
    "spin_lift",
    "build",
    "bracket",
    "jacobi_check",
    "levi_civita",
    "with_torsion",
    "canonical_torsion",
    "curvature",
    "nabla_tensor",
    "is_parallel",
    "ricci",
    "scalars",
    "holonomy",
    "transvection_check",
    "build_phi",
    "compatibility_check",
    "normality_check",
    "quasi_sasaki_check",
    "characteristic_connection",
    "build_qc",
    "qc_preservation_check",
    "qc_unique_skew",
    "build_omega",
    "cocalibrated_check",
    "characteristic_torsion_g2",
    "parallel_spinor",
    "torsion_spectrum",
    "generalized_killing_check",
    "proof_identities_check",
    "cone_constant",
    "run",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Algebra,
    Connection,
    Contact,
    Qc,
    G2,
    Spinors,
    Cone,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Algebra, Suite::Connection, Suite::Contact, Suite::Qc, Suite::G2, Suite::Spinors, Suite::Cone];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Connection => "connection",
            Suite::Contact => "contact",
            Suite::Qc => "qc",
            Suite::G2 => "g2",
            Suite::Spinors => "spinors",
            Suite::Cone => "cone",
        }
    }

    pub fn requires_p1(self) -> bool {
        matches!(self, Suite::G2 | Suite::Spinors | Suite::Cone)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lambda {
    Formal,
    Value(Rational),
}

impl Lambda {
    pub fn parse(s: &str) -> Result<Self> {
        if s.trim() == "formal" {
            return Ok(Lambda::Formal);
        }
        let q = parse_rational(s.trim()).ok_or_else(|| Error::InvalidParameter(format!("invalid lambda literal {s:?}")))?;
        if q <= Rational::from_integer(0.into()) {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {s}")));
        }
        Ok(Lambda::Value(q))
    }

    pub fn scalar(&self) -> Scalar {
        match self {
            Lambda::Formal => Scalar::lambda(),
            Lambda::Value(q) => Scalar::constant(q.clone()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Lambda::Formal => "formal".into(),
            Lambda::Value(q) => q.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportConfig {
    pub p: usize,
    pub lambda: Lambda,
    /// Suites to run, in canonical order.
    pub suites: Vec<Suite>,
    pub skipped_suites: Vec<Suite>,
    pub format: Format,
}

impl ReportConfig {
    /// Validates raw command-line values. Suites `g2`, `spinors` and `cone`
    /// need `p = 1`; under `all` they are skipped for other `p`, named
    /// explicitly they are an error.
    pub fn new(p: usize, lambda: &str, suites: &[String], format: &str) -> Result<Self> {
        if p < 1 {
            return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
        }
        let lambda = Lambda::parse(lambda)?;
        let format = match format {
            "json" => Format::Json,
            "text" => Format::Text,
            other => return Err(Error::InvalidParameter(format!("unknown format {other:?}"))),
        };
        let names: Vec<&str> = if suites.is_empty() { vec!["all"] } else { suites.iter().map(String::as_str).collect() };
        let mut chosen = BTreeSet::new();
        let mut skipped = BTreeSet::new();
        for name in names {
            if name == "all" {
                for s in Suite::ALL {
                    if s.requires_p1() && p != 1 {
                        skipped.insert(s);
                    } else {
                        chosen.insert(s);
                    }
                }
                continue;
            }
            let s = Suite::ALL
                .into_iter()
                .find(|s| s.name() == name)
                .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {name:?}")))?;
            if s.requires_p1() && p != 1 {
                return Err(Error::InvalidParameter(format!("suite {name} requires p = 1, got p = {p}")));
            }
            chosen.insert(s);
        }
        skipped.retain(|s| !chosen.contains(s));
        Ok(Self {
            p,
            lambda,
            suites: chosen.into_iter().collect(),
            skipped_suites: skipped.into_iter().collect(),
            format,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: Suite,
    pub name: String,
    pub anchor: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
    pub values: BTreeMap<String, String>,
    pub covers: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigRecord {
    pub p: usize,
    pub lambda: String,
    pub suites: Vec<Suite>,
    pub skipped_suites: Vec<Suite>,
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: ConfigRecord,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn exit_code(&self) -> i32 {
        if self.summary.failed == 0 {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let width = self.checks.iter().map(|c| c.anchor.len()).max().unwrap_or(6).max(6);
        let mut out = String::new();
        let _ = writeln!(out, "p = {}, lambda = {}", self.config.p, self.config.lambda);
        let _ = writeln!(out, "{:<width$}  {:<8}  {:<10}  detail", "anchor", "status", "suite");
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skipped",
            };
            let mut detail: Vec<String> = c.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
            if let Some(w) = &c.witness {
                detail.insert(0, format!("witness: {w}"));
            }
            let _ = writeln!(out, "{:<width$}  {:<8}  {:<10}  {}", c.anchor, status, c.suite.name(), detail.join("; "));
        }
        let s = &self.summary;
        let _ = writeln!(out, "{} checks: {} passed, {} failed, {} skipped", s.total, s.passed, s.failed, s.skipped);
        out
    }

    /// Operations named in [`OPERATIONS`] that no check exercised.
    pub fn uncovered(&self) -> Vec<&'static str> {
        let covered: BTreeSet<&str> = self
            .checks
            .iter()
            .filter(|c| c.status != Status::Skipped)
            .flat_map(|c| c.covers.iter().map(String::as_str))
            .chain(std::iter::once("run"))
            .collect();
        OPERATIONS.iter().copied().filter(|op| !covered.contains(op)).collect()
    }

    pub fn check(&self, anchor: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.anchor == anchor)
    }
}

type Outcome<'a> = (bool, Option<String>, Vec<(&'a str, String)>);

struct Builder {
    suite: Suite,
    checks: Vec<CheckRecord>,
}

impl Builder {
    fn record(
        &mut self,
        anchor: &str,
        name: &str,
        covers: &[&str],
        outcome: Result<Outcome>,
    ) {
        let (status, witness, values) = match outcome {
            Ok((ok, witness, values)) => (if ok { Status::Pass } else { Status::Fail }, witness, values),
            Err(e) => (Status::Fail, Some(format!("error: {e}")), Vec::new()),
        };
        self.checks.push(CheckRecord {
            suite: self.suite,
            name: name.into(),
            anchor: anchor.into(),
            status,
            witness,
            values: values.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            covers: covers.iter().map(|s| s.to_string()).collect(),
        });
    }

    fn skip(&mut self, anchor: &str, name: &str, reason: &str) {
        self.checks.push(CheckRecord {
            suite: self.suite,
            name: name.into(),
            anchor: anchor.into(),
            status: Status::Skipped,
            witness: Some(reason.into()),
            values: BTreeMap::new(),
            covers: Vec::new(),
        });
    }
}

fn frame_name(i: usize) -> String {
    if i < 3 {
        format!("xi{}", i + 1)
    } else {
        format!("tau{}", i - 2)
    }
}

fn show_opt(s: &Option<Scalar>) -> String {
    s.as_ref().map_or_else(|| "none".into(), Scalar::to_string)
}

fn list(values: impl IntoIterator<Item = String>) -> String {
    format!("[{}]", values.into_iter().collect::<Vec<_>>().join(", "))
}

pub fn run(config: &ReportConfig) -> Result<VerificationReport> {
    let alg = QHAlgebra::with_lambda(config.p, config.lambda.scalar())?;
    let mut checks = Vec::new();
    for suite in Suite::ALL {
        let mut b = Builder { suite, checks: Vec::new() };
        if config.suites.contains(&suite) {
            match suite {
                Suite::Algebra => algebra_suite(&alg, &mut b),
                Suite::Connection => connection_suite(&alg, &mut b),
                Suite::Contact => contact_suite(&alg, &mut b),
                Suite::Qc => qc_suite(&alg, &mut b),
                Suite::G2 => g2_suite(&alg, &mut b),
                Suite::Spinors => spinor_suite(&alg, &mut b),
                Suite::Cone => cone_suite(&alg, &mut b),
            }
        } else if config.skipped_suites.contains(&suite) {
            b.skip(suite.name(), &format!("{} suite", suite.name()), "requires p = 1");
        }
        checks.extend(b.checks);
    }
    let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
    let (passed, failed, skipped) = (count(Status::Pass), count(Status::Fail), count(Status::Skipped));
    let summary = Summary {
        total: checks.len(),
        passed,
        failed,
        skipped,
        status: if failed == 0 { Status::Pass } else { Status::Fail },
    };
    Ok(VerificationReport {
        config: ConfigRecord {
            p: config.p,
            lambda: config.lambda.label(),
            suites: config.suites.clone(),
            skipped_suites: config.skipped_suites.clone(),
            format: config.format,
        },
        checks,
        summary,
    })
}

/// `d eta_i = -l sum_r [theta_{r, ip+r} + theta_{(i+1)p+r, (i+2)p+r}]`, indices mod 3.
pub fn d_eta_formula(alg: &QHAlgebra, i: usize) -> KForm {
    let p = alg.p();
    let n = alg.dim();
    let block = |k: usize| (k - 1) % 3 + 1;
    let mut f = KForm::zero(n, 2);
    for r in 1..=p {
        let a = tau(block(i) * p + r);
        let b = tau(block(i + 1) * p + r);
        let c = tau(block(i + 2) * p + r);
        f.add_component(&[tau(r), a], -alg.lambda().clone());
        f.add_component(&[b, c], -alg.lambda().clone());
    }
    f
}

fn algebra_suite(alg: &QHAlgebra, b: &mut Builder) {
    let p = alg.p();
    let l = alg.lambda().clone();
    b.record("commutator-table", "bracket table of n_p", &["build", "bracket"], {
        let mut bad = None;
        for r in 1..=p {
            let table = [
                (tau(r), tau(p + r), 1),
                (tau(r), tau(2 * p + r), 2),
                (tau(r), tau(3 * p + r), 3),
                (tau(2 * p + r), tau(3 * p + r), 1),
                (tau(3 * p + r), tau(p + r), 2),
                (tau(p + r), tau(2 * p + r), 3),
            ];
            for (x, y, c) in table {
                if alg.bracket(&alg.basis(x), &alg.basis(y)) != alg.basis(xi(c)).scale(&l) {
                    bad.get_or_insert(format!("[{}, {}]", frame_name(x), frame_name(y)));
                }
            }
        }
        let count = alg.nonzero_brackets().count();
        let ok = bad.is_none() && count == 6 * p && alg.center_dim() == 3 && alg.derived_dim() == 3;
        Ok((
            ok,
            bad,
            vec![
                ("dim", alg.dim().to_string()),
                ("nonzero_brackets", count.to_string()),
                ("center_dim", alg.center_dim().to_string()),
                ("derived_dim", alg.derived_dim().to_string()),
            ],
        ))
    });
    b.record("jacobi", "Jacobi identity and 2-step nilpotency", &["jacobi_check"], {
        let j = alg.jacobi_check();
        let ok = j.is_ok() && alg.is_two_step_nilpotent();
        Ok((ok, j.err().map(|t| format!("{t:?}")), vec![]))
    });
    b.record("type-h", "brackets from quaternion multiplication", &["bracket"], {
        let r = alg.type_h_check();
        Ok((r.is_ok(), r.err().map(|t| format!("{t:?}")), vec![]))
    });
    b.record("structure-equations", "d eta_i and d theta_l", &["ce_differential"], {
        let mut witness = None;
        let mut values = Vec::new();
        for i in 1..=3 {
            let d = alg.d(&alg.eta(i));
            if d != d_eta_formula(alg, i) {
                witness.get_or_insert(format!("d eta{i} = {d}"));
            }
            if p == 1 {
                values.push((["d_eta1", "d_eta2", "d_eta3"][i - 1], d.to_string()));
            }
        }
        for l_ in 1..=4 * p {
            if !alg.d(&alg.theta(l_)).is_zero() {
                witness.get_or_insert(format!("d theta{l_} != 0"));
            }
        }
        Ok((witness.is_none(), witness, values))
    });
    b.record("d-squared", "d^2 = 0 on basis 1- and 2-forms", &["ce_differential", "wedge"], (|| {
        let n = alg.dim();
        for a in 0..n {
            if !alg.d(&alg.d(&KForm::basis(n, &[a]))).is_zero() {
                return Ok((false, Some(format!("d d e{a}")), vec![]));
            }
            for c in a + 1..n {
                let f = wedge(&KForm::basis(n, &[a]), &KForm::basis(n, &[c]))?;
                if !alg.d(&alg.d(&f)).is_zero() {
                    return Ok((false, Some(format!("d d e{a}{c}")), vec![]));
                }
            }
        }
        Ok((true, None, vec![]))
    })());
    b.record("exterior-kernel", "interior, Hodge star, inner product, 2-forms as endomorphisms", &[
        "wedge",
        "interior",
        "hodge_star",
        "form_inner",
        "two_form_endo",
        "endo_two_form",
    ], (|| {
        let t12 = wedge(&alg.theta(1), &alg.theta(2))?;
        let mut ok = interior(&alg.basis(tau(1)), &t12)? == alg.theta(2);
        ok &= interior(&alg.basis(xi(1)), &t12)?.is_zero();
        ok &= form_inner(&t12, &t12)?.is_one();
        ok &= hodge_star(&hodge_star(&t12)) == t12;
        ok &= form_inner(&hodge_star(&t12), &hodge_star(&t12))?.is_one();
        let d1 = alg.d(&alg.eta(1));
        ok &= endo_two_form(&two_form_endo(&d1)?)? == d1;
        let h1 = two_form_endo(&h_forms(alg, HVariant::Standard)[0])?;
        ok &= h1.apply(&alg.basis(xi(2))) == alg.basis(xi(3)).scale(&Scalar::int(2));
        ok &= interior(&alg.basis(tau(1)), &d1)?.component(&[tau(p + 1)]) == -alg.lambda().clone();
        Ok((ok, None, vec![]))
    })());
    b.record("negative-control-jacobi", "mutated structure constants violate Jacobi", &["jacobi_check"], {
        let value = &alg.basis(xi(1)).scale(&l) + &alg.basis(tau(3)).scale(&l);
        let mutated = alg.with_bracket(tau(1), tau(2), value);
        let r = mutated.jacobi_check();
        Ok((r.is_err(), None, vec![("witness_triple", format!("{:?}", r.err()))]))
    });
}

fn connection_suite(alg: &QHAlgebra, b: &mut Builder) {
    let p = alg.p();
    let n = alg.dim();
    let l = alg.lambda().clone();
    let t = canonical_torsion(alg);
    let conn = canonical_connection(alg);
    let lc = levi_civita(alg);

    b.record("levi-civita", "Koszul formula and Killing one-forms", &["levi_civita", "interior"], (|| {
        let half = l.scale(&rational(1, 2));
        let mut ok = lc.torsion_tensor(alg).is_zero();
        ok &= lc.covariant_derivative(&alg.basis(tau(1)), &alg.basis(tau(p + 1))) == alg.basis(xi(1)).scale(&half);
        ok &= lc.covariant_derivative(&alg.basis(xi(1)), &alg.basis(tau(1))) == alg.basis(tau(p + 1)).scale(&-half);
        for i in 1..=3 {
            let d = alg.d(&alg.eta(i));
            for x in 0..n {
                let lhs = KForm::from_vector(&lc.covariant_derivative(&alg.basis(x), &alg.basis(xi(i))));
                ok &= lhs == interior(&alg.basis(x), &d)?.scale(&Scalar::ratio(1, 2));
            }
        }
        Ok((ok, None, vec![]))
    })());
    b.record("canonical-connection", "Omega(tau) = 0 and Omega(xi_i) = -l H_i", &[
        "with_torsion",
        "canonical_torsion",
        "two_form_endo",
    ], {
        let h = h_endos(alg, HVariant::Standard);
        let mut witness = None;
        for x in 0..n {
            let expected = if x < 3 { h[x].scale(&-l.clone()) } else { Endo::zero(n) };
            if conn.omega(x) != &expected {
                witness.get_or_insert(format!("Omega({})", frame_name(x)));
            }
        }
        if conn.torsion_form(alg).as_ref() != Ok(&t) {
            witness.get_or_insert("torsion round trip".into());
        }
        Ok((witness.is_none(), witness, vec![("torsion_eta123", t.component(&[0, 1, 2]).to_string())]))
    });
    b.record("parallel-torsion-curvature", "nabla T = 0, nabla R = 0 and parallel forms", &[
        "nabla_tensor",
        "is_parallel",
        "curvature",
    ], {
        let curv = conn.curvature(alg).to_tensor();
        let mut items: Vec<(String, Tensor)> = vec![
            ("T".into(), Tensor::from_form(&t)),
            ("R".into(), curv),
            ("eta123".into(), Tensor::from_form(&KForm::basis(n, &[0, 1, 2]))),
        ];
        for r in 1..=p {
            items.push((format!("block{r}"), Tensor::from_form(&block_volume(alg, r))));
        }
        let witness = items
            .iter()
            .find(|(_, tensor)| conn.nabla_tensor(tensor).iter().any(|d| !d.is_zero()))
            .map(|(name, tensor)| {
                let dir = conn.is_parallel(tensor).err().map(|(x, _)| frame_name(x)).unwrap_or_default();
                format!("nabla_{dir} {name} != 0")
            });
        Ok((witness.is_none(), witness, vec![]))
    });
    b.record("curvature-closed-form", "R = l^2 sum H_i (x) H_i", &["curvature"], {
        let ok = conn.curvature(alg) == curvature_closed_form(alg);
        Ok((ok, None, vec![]))
    });
    b.record("first-bianchi", "cyclic sum of R equals sigma_T", &["curvature"], {
        let ok = cyclic_sum(&conn.curvature(alg).to_tensor()) == sigma_t(&t);
        Ok((ok, None, vec![]))
    });
    b.record("ricci-diagonal", "Ricci tensor of the canonical connection", &["ricci"], {
        let ric = ricci(alg, &conn);
        let l2 = l.pow(2);
        let expected = Endo::from_fn(n, |i, j| match (i == j, i < 3) {
            (false, _) => Scalar::zero(),
            (true, true) => l2.scale(&rational(-8, 1)),
            (true, false) => l2.scale(&rational(-3, 1)),
        });
        let diag = list((0..n).map(|i| ric.get(i, i).to_string()));
        Ok((ric == expected, None, vec![("ricci_diagonal", diag)]))
    });
    b.record("scalar-curvatures", "s_nabla, s_g and |T|^2", &["scalars", "form_inner"], (|| {
        let (s_nabla, s_g) = scalars(alg, &conn);
        let norm = form_inner(&t, &t)?;
        let l2 = l.pow(2);
        let pi = p as i64;
        let ok = s_nabla == l2.scale(&rational(-12 * (pi + 2), 1))
            && s_g == l2.scale(&rational(-3 * pi, 1))
            && norm == l2.scale(&rational(6 * pi + 16, 1))
            && &s_g - &s_nabla == norm.scale(&rational(3, 2))
            && ricci(alg, &conn).trace() == s_nabla;
        Ok((
            ok,
            None,
            vec![("s_nabla", s_nabla.to_string()), ("s_g", s_g.to_string()), ("torsion_norm_sq", norm.to_string())],
        ))
    })());
    b.record("holonomy", "holonomy algebra su(2) and invariant subspaces", &["holonomy"], (|| {
        let hol = holonomy(alg, &conn)?;
        let one = alg.sample_point(1);
        let h = h_endos(alg, HVariant::Standard);
        let mut ok = hol.dim() == 3 && su2_relations(&h);
        for e in &h {
            ok &= hol.contains(e, &one)?;
        }
        ok &= hol.preserves(&alg.vertical());
        let irreducible = hol.generated_algebra_dim(&alg.vertical(), &one)? == 9;
        ok &= irreducible;
        for r in 1..=p {
            ok &= hol.preserves(&alg.quaternionic_block(r));
        }
        Ok((
            ok,
            None,
            vec![("holonomy_dim", hol.dim().to_string()), ("vertical_irreducible", irreducible.to_string())],
        ))
    })());
    if p <= 5 {
        b.record("natural-reductivity", "transvection algebra: Jacobi and reductive condition", &[
            "transvection_check",
        ], {
            let r = transvection_check(alg, &conn);
            Ok((r.is_ok(), r.err().map(|f| format!("{f:?}")), vec![]))
        });
    } else {
        b.skip("natural-reductivity", "transvection algebra", "run for p <= 5");
    }
    b.record("negative-control-h3", "H3 built from d eta1 breaks su(2)", &["two_form_endo"], {
        Ok((!su2_relations(&h_endos(alg, HVariant::Alternate)), None, vec![]))
    });
    b.record("negative-control-perturbed-torsion", "perturbed torsion is not parallel", &[
        "with_torsion",
        "is_parallel",
        "transvection_check",
    ], (|| {
        let extra = if p >= 2 { [tau(4), tau(5), tau(6)] } else { [tau(1), tau(2), tau(3)] };
        let perturbed = &t + &KForm::basis(n, &extra).scale(&l);
        let c = with_torsion(alg, &perturbed)?;
        let not_parallel = c.is_parallel(&Tensor::from_form(&perturbed)).is_err();
        let rejected = transvection_check(alg, &c).is_err();
        Ok((not_parallel && rejected, None, vec![]))
    })());
}

fn contact_suite(alg: &QHAlgebra, b: &mut Builder) {
    let p = alg.p();
    b.record("almost-contact-axioms", "phi_i, xi_i, eta_i axioms and metric compatibility", &["build_phi"], (|| {
        let mut witness = None;
        for i in 1..=3 {
            if let Err(f) = build_phi(alg, i)?.axioms_check() {
                witness.get_or_insert(format!("phi{i}: {f:?}"));
            }
        }
        let phi1 = build_phi(alg, 1)?;
        let ok = witness.is_none()
            && phi1.phi.apply(&alg.basis(tau(1))) == alg.basis(tau(p + 1))
            && phi1.phi.apply(&alg.basis(xi(2))) == alg.basis(xi(3));
        Ok((ok, witness, vec![]))
    })());
    b.record("compatibility", "phi_i = phi_j phi_k - eta_k (x) xi_j = -phi_k phi_j + eta_j (x) xi_k", &[
        "compatibility_check",
    ], {
        let r = build_all(alg, PhiVariant::Standard).map(|all| compatibility_check(&all));
        r.map(|c| (c.is_ok(), c.err().map(|f| format!("{f:?}")), vec![]))
    });
    b.record("phi2-discriminator", "alternate phi_2 fails the compatibility equations", &["compatibility_check"], {
        let r = build_all(alg, PhiVariant::Alternate).map(|all| compatibility_check(&all));
        r.map(|c| {
            let w = c.as_ref().err().map(|f| format!("{f:?}")).unwrap_or_default();
            (c.is_err(), None, vec![("alternate_witness", w)])
        })
    });
    b.record("normality", "vanishing Nijenhuis tensor", &["normality_check"], (|| {
        let mut witness = None;
        for i in 1..=3 {
            if let Err((a, c)) = build_phi(alg, i)?.normality_check(alg) {
                witness.get_or_insert(format!("phi{i} at ({}, {})", frame_name(a), frame_name(c)));
            }
        }
        let mut perturbed = build_phi(alg, 1)?;
        perturbed.phi.set(xi(3), xi(2), Scalar::zero());
        let control = !perturbed.is_normal(alg);
        Ok((witness.is_none() && control, witness, vec![]))
    })());
    b.record("not-quasi-sasaki", "no phi_i is quasi-Sasaki", &["quasi_sasaki_check"], (|| {
        let mut ok = true;
        for i in 1..=3 {
            ok &= !quasi_sasaki_check(alg, &build_phi(alg, i)?);
        }
        Ok((ok, None, vec![]))
    })());
    if p == 1 {
        b.record("characteristic-connections", "characteristic connections of the three structures", &[
            "characteristic_connection",
        ], (|| {
            let mut ok = true;
            let mut values = Vec::new();
            for i in 1..=3 {
                let c = characteristic_connection(alg, i)?;
                let s = build_phi(alg, i)?;
                let ti = c.torsion_form(alg).map_err(|t| Error::Inconsistent(format!("{t:?}")))?;
                ok &= ti == characteristic_torsion_formula(alg, i)?;
                ok &= c.is_parallel(&Tensor::from_endo(&s.phi)).is_ok();
                ok &= c.is_parallel(&Tensor::from_vector(&s.xi)).is_ok();
                ok &= c.is_parallel(&Tensor::from_form(&s.eta)).is_ok();
                values.push((["T1", "T2", "T3"][i - 1], ti.to_string()));
            }
            let c1 = characteristic_connection(alg, 1)?;
            ok &= c1.is_parallel(&Tensor::from_endo(&build_phi(alg, 2)?.phi)).is_err();
            Ok((ok, None, values))
        })());
    } else {
        b.skip("characteristic-connections", "characteristic connections", "requires p = 1");
    }
}

fn qc_suite(alg: &QHAlgebra, b: &mut Builder) {
    let p = alg.p();
    b.record("qc-structure", "I_i, eta~_i, xi~_i satisfy the qc identities", &["build_qc"], {
        build_qc(alg).map(|qc| {
            let r = qc_invariants(alg, &qc);
            (r.is_ok(), r.err().map(|f| format!("{f:?}")), vec![])
        })
    });
    b.record("qc-canonical", "canonical connection preserves the qc structure", &["qc_preservation_check"], {
        let r = qc_preservation_check(alg, &canonical_connection(alg));
        Ok((r.is_ok(), r.err().map(|f| format!("{f:?}")), vec![]))
    });
    b.record("qc-levi-civita", "Levi-Civita connection does not preserve the qc structure", &[
        "qc_preservation_check",
        "levi_civita",
    ], {
        let r = qc_preservation_check(alg, &levi_civita(alg));
        Ok((r.is_err(), None, vec![("failure", format!("{:?}", r.err()))]))
    });
    b.record("biquard", "Biquard connection: flat, trivial holonomy, non-skew torsion", &[
        "holonomy",
        "curvature",
        "qc_preservation_check",
    ], (|| {
        let c = biquard(alg);
        let ok = c.curvature(alg).is_zero()
            && holonomy(alg, &c)?.dim() == 0
            && c.torsion_form(alg).is_err()
            && qc_preservation_check(alg, &c).is_ok();
        Ok((ok, None, vec![]))
    })());
    if p <= 2 {
        b.record("qc-uniqueness", "unique skew-torsion connection preserving the qc structure", &[
            "qc_unique_skew",
        ], {
            qc_unique_skew(alg).map(|u| {
                let ok = u.span_dim() == 1 && u.torsion() == Some(canonical_torsion(alg));
                (
                    ok,
                    None,
                    vec![
                        ("solution_span_dim", u.span_dim().to_string()),
                        ("relaxed_span_dim", u.relaxed.span_dim().to_string()),
                    ],
                )
            })
        });
    } else {
        b.skip("qc-uniqueness", "unique qc connection", "linear solve run for p <= 2");
    }
}

fn g2_suite(alg: &QHAlgebra, b: &mut Builder) {
    let omega = match build_omega(alg) {
        Ok(g) => g.omega,
        Err(e) => {
            b.record("g2-omega", "G2 3-form", &["build_omega"], Err(e));
            return;
        }
    };
    b.record("g2-omega", "omega is generic and T = l(omega - 5 eta123)", &["build_omega"], (|| {
        let five = KForm::basis(7, &[0, 1, 2]).scale(&Scalar::int(5));
        let ok = (&omega - &five).scale(alg.lambda()) == canonical_torsion(alg) && is_generic(alg, &omega)?;
        Ok((ok, None, vec![("omega", omega.to_string())]))
    })());
    b.record("cocalibrated", "d * omega = 0", &["cocalibrated_check", "hodge_star"], {
        let perturbed = &omega + &KForm::basis(7, &[tau(1), tau(2), tau(3)]);
        let ok = cocalibrated_check(alg, &omega) && !cocalibrated_check(alg, &perturbed);
        Ok((ok, None, vec![]))
    });
    b.record("g2-characteristic-torsion", "T^c = (1/6)(d omega, * omega) omega - * d omega equals T", &[
        "characteristic_torsion_g2",
    ], {
        characteristic_torsion_g2(alg, &omega).map(|(tc, pairing)| {
            (tc == canonical_torsion(alg), None, vec![("pairing", pairing.to_string())])
        })
    });
}

fn spinor_suite(alg: &QHAlgebra, b: &mut Builder) {
    let l = alg.lambda().clone();
    let scaled = |num: i64, den: i64| l.scale(&rational(num, den));
    b.record("clifford-relations", "gamma_i gamma_j + gamma_j gamma_i = -2 delta_ij", &["build_gamma"], {
        let g = build_gamma();
        let mut ok = true;
        for i in 0..7 {
            for j in 0..7 {
                let ac = &(&g[i] * &g[j]) + &(&g[j] * &g[i]);
                let expected = if i == j { Endo::identity(8).scale(&Scalar::int(-2)) } else { Endo::zero(8) };
                ok &= ac == expected;
            }
        }
        let vol = volume_element();
        let sign = if vol == Endo::identity(8) { "+1" } else { "-1" };
        Ok((ok, None, vec![("volume_element", sign.into())]))
    });
    b.record("spin-lift", "spin lift is a Lie algebra homomorphism", &["spin_lift"], (|| {
        let h = h_endos(alg, HVariant::Standard);
        let rho: Vec<Endo> = h.iter().map(spin_lift).collect::<Result<_>>()?;
        let two_h3 = rho[2].scale(&Scalar::int(2));
        let ok = spin_lift(&h[0].commutator(&h[1]))? == two_h3 && rho[0].commutator(&rho[1]) == two_h3;
        Ok((ok, None, vec![]))
    })());
    let conn = canonical_connection(alg);
    let splitting = match parallel_spinor(alg, &conn) {
        Ok(s) => s,
        Err(e) => {
            b.record("parallel-spinor", "nabla-parallel spinor", &["parallel_spinor"], Err(e));
            return;
        }
    };
    b.record("parallel-spinor", "joint kernel of rho(Omega) and the splitting 1 + 3 + 4", &["parallel_spinor"], {
        let ok = splitting.dims() == (1, 3, 4) && splitting.is_orthogonal_basis();
        Ok((ok, None, vec![("psi0", list(splitting.psi0.0.iter().map(Scalar::to_string)))]))
    });
    b.record("torsion-spectrum", "T psi0 = -2l psi0, 6l on T^h, -4l on T^v", &[
        "torsion_spectrum",
        "clifford_action",
    ], (|| {
        let t = canonical_torsion(alg);
        let s = torsion_spectrum(alg, &t, &splitting)?;
        let direct = clifford_action(&t, &splitting.psi0)?;
        let mut ok = direct == splitting.psi0.scale(&scaled(-2, 1));
        ok &= s.psi0 == Some(scaled(-2, 1));
        ok &= s.horizontal.iter().all(|v| v == &Some(scaled(6, 1)));
        ok &= s.vertical.iter().all(|v| v == &Some(scaled(-4, 1)));
        ok &= s.multiplicity(&scaled(-4, 1)) == 3 && s.multiplicity(&scaled(6, 1)) == 4;
        let (witness, values) = (
            (!ok).then(|| {
                format!(
                    "computed {} on T^v and {} on T^h",
                    show_opt(&s.vertical[0]),
                    show_opt(&s.horizontal[0])
                )
            }),
            vec![
                ("psi0", show_opt(&s.psi0)),
                ("vertical", list(s.vertical.iter().map(show_opt))),
                ("horizontal", list(s.horizontal.iter().map(show_opt))),
                ("multiplicities", list(s.multiplicities.iter().map(|(v, k)| format!("{v} x{k}")))),
                ("trace", s.trace.to_string()),
            ],
        );
        Ok((ok, witness, values))
    })());
    b.record("killing-psi0", "psi0: s = l/2 on T^v, -3l/4 on T^h", &["generalized_killing_check"], {
        generalized_killing_check(alg, &splitting.psi0).map(|r| {
            let ok = (0..7).all(|x| r.values[x] == Some(if x < 3 { scaled(1, 2) } else { scaled(-3, 4) }));
            (ok, None, vec![("s", list(r.values.iter().map(show_opt)))])
        })
    });
    b.record("killing-psi-i", "psi_i: s = l/2, -l/2, 5l/4 with three distinct values", &[
        "generalized_killing_check",
    ], (|| {
        let mut ok = true;
        let mut values = Vec::new();
        let mut witness = None;
        for i in 1..=3 {
            let r = generalized_killing_check(alg, &psi_i(alg, &splitting, i)?)?;
            for x in 0..7 {
                let expected = match x {
                    _ if x == xi(i) => scaled(1, 2),
                    0..=2 => scaled(-1, 2),
                    _ => scaled(5, 4),
                };
                if r.values[x] != Some(expected.clone()) {
                    ok = false;
                    witness.get_or_insert(format!(
                        "psi{i} at {}: computed {}, expected {expected}",
                        frame_name(x),
                        show_opt(&r.values[x])
                    ));
                }
            }
            ok &= r.distinct().len() == 3;
            values.push((["s_psi1", "s_psi2", "s_psi3"][i - 1], list(r.values.iter().map(show_opt))));
            if i == 1 {
                values.push(("distinct_psi1", r.distinct().len().to_string()));
            }
        }
        Ok((ok, witness, values))
    })());
    b.record("killing-control", "a generic spinor is not generalized Killing", &["generalized_killing_check"], {
        let random = Vector([3, -1, 4, 1, -5, 9, 2, -6].into_iter().map(Scalar::int).collect());
        generalized_killing_check(alg, &random).map(|r| (!r.is_generalized_killing(), None, vec![]))
    });
    b.record("proof-identities", "(X ⨼ d eta_i) psi0 = X xi_i psi0 on T^h, vanishing on T^v, Leibniz rule", &[
        "proof_identities_check",
    ], {
        proof_identities_check(alg, &splitting).map(|r| {
            let witness = (!r.holds_as_stated()).then(|| {
                format!("horizontal coefficient is {}", show_opt(&r.horizontal_coefficient))
            });
            (
                r.holds_as_stated(),
                witness,
                vec![
                    ("horizontal_coefficient", show_opt(&r.horizontal_coefficient)),
                    ("vertical_vanishes", r.vertical_vanishes.to_string()),
                    ("leibniz", r.leibniz.to_string()),
                ],
            )
        })
    });
}

fn cone_suite(alg: &QHAlgebra, b: &mut Builder) {
    let l = alg.lambda().clone();
    b.record("cone-constant", "unique a with S_1 = S_2 = S_3 equals l", &["cone_constant", "characteristic_connection"], {
        cone_constant(alg).map(|c| {
            let ok = c.solution.as_ref() == Some(&l)
                && (1..=3).all(|i| characteristic_torsion_formula(alg, i).as_ref() == Ok(&c.torsions[i - 1]));
            let common = c.common().map_or_else(|| "none".into(), |s| s.to_string());
            (ok, None, vec![("a", show_opt(&c.solution)), ("common_S", common)])
        })
    });
    b.record("cone-forced", "a = 2l leaves a nonzero residual", &["cone_constant"], {
        cone_constant(alg).map(|c| {
            let (r1, r2) = c.residual(&l.scale(&rational(2, 1)));
            (!(r1.is_zero() && r2.is_zero()), None, vec![("residual_12", r1.to_string())])
        })
    });
    b.record("cone-convention", "F(X, Y) = g(phi X, Y) gives a = -l", &["cone_constant"], {
        cone_criterion(alg, FormConvention::PhiXY).map(|c| {
            (c.solution == Some(-l.clone()), None, vec![("a_opposite", show_opt(&c.solution))])
        })
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: usize, lambda: &str, suites: &[&str]) -> Result<ReportConfig> {
        let s: Vec<String> = suites.iter().map(|s| s.to_string()).collect();
        ReportConfig::new(p, lambda, &s, "json")
    }

    #[test]
    fn config_validation() {
        assert!(cfg(1, "formal", &["all"]).is_ok());
        assert!(cfg(1, "3/2", &["connection"]).is_ok());
        assert!(cfg(1, "abc", &["connection"]).is_err());
        assert!(cfg(1, "-1", &["connection"]).is_err());
        assert!(cfg(1, "0", &["connection"]).is_err());
        assert!(cfg(2, "formal", &["g2"]).is_err());
        assert!(cfg(1, "formal", &["bogus"]).is_err());
        assert!(cfg(0, "formal", &["algebra"]).is_err());
        let c = cfg(2, "formal", &["all"]).unwrap();
        assert_eq!(c.skipped_suites, vec![Suite::G2, Suite::Spinors, Suite::Cone]);
        let c = cfg(1, "formal", &[]).unwrap();
        assert_eq!(c.suites.len(), 7);
    }

    #[test]
    fn d_eta_formula_matches_p1_display() {
        let alg = QHAlgebra::build(1).unwrap();
        let l = Scalar::lambda();
        let mut d2 = KForm::zero(7, 2);
        d2.add_component(&[tau(1), tau(3)], -l.clone());
        d2.add_component(&[tau(2), tau(4)], l.clone());
        assert_eq!(d_eta_formula(&alg, 2), d2);
    }

    #[test]
    fn specialized_connection_values() {
        let r = run(&cfg(3, "2", &["connection"]).unwrap()).unwrap();
        let s = r.check("scalar-curvatures").unwrap();
        assert_eq!(s.values["s_nabla"], "-240");
        assert_eq!(s.values["s_g"], "-36");
        assert_eq!(s.status, Status::Pass);
    }
}
