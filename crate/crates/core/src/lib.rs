//! Exact verification engine for the quaternionic Heisenberg groups `N_p`:
//! the canonical skew-torsion connection, its curvature and holonomy, the
//! almost 3-contact and quaternionic contact structures, and in dimension 7
//! the cocalibrated G2 structure with its spinors.
//!
//! All arithmetic is over Laurent polynomials in the metric parameter with
//! rational coefficients, so every check is an exact identity.

pub mod algebra;
pub mod clifford;
pub mod cone;
pub mod connection;
pub mod contact;
pub mod endo;
pub mod error;
pub mod exterior;
pub mod g2;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod tensor;

pub use algebra::{tau, xi, QHAlgebra};
pub use endo::{endo_two_form, two_form_endo, Endo};
pub use error::{Error, Result};
pub use exterior::{ce_differential, form_inner, hodge_star, interior, wedge, KForm, Vector};
pub use scalar::{Rational, Scalar};
pub use tensor::Tensor;
pub use report::{run, ReportConfig, VerificationReport};
