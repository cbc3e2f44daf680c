use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qhg_core::connection::{canonical_connection, canonical_torsion, holonomy, ricci, scalars};
use qhg_core::report::{run, Lambda, ReportConfig};
use qhg_core::{Error, KForm};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A differential form on the algebra, with exact coefficients.
#[pyclass(name = "Form", frozen)]
struct PyForm {
    inner: KForm,
}

#[pymethods]
impl PyForm {
    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    /// Nonzero components as `(indices, coefficient)` with 0-based frame indices.
    fn components(&self) -> Vec<(Vec<usize>, String)> {
        self.inner.components().map(|(k, v)| (k.to_vec(), v.to_string())).collect()
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    fn __eq__(&self, other: &PyForm) -> bool {
        self.inner == other.inner
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Form({})", self.inner)
    }
}

/// The quaternionic Heisenberg algebra of dimension `4p + 3`.
#[pyclass(name = "QHAlgebra", frozen)]
struct PyAlgebra {
    inner: qhg_core::QHAlgebra,
}

#[pymethods]
impl PyAlgebra {
    #[new]
    #[pyo3(signature = (p, lam = "formal"))]
    fn new(p: usize, lam: &str) -> PyResult<Self> {
        let lambda = Lambda::parse(lam).map_err(err)?;
        let inner = qhg_core::QHAlgebra::with_lambda(p, lambda.scalar()).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn p(&self) -> usize {
        self.inner.p()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    /// `[e_i, e_j]` as a list of exact coefficient strings.
    fn bracket(&self, i: usize, j: usize) -> PyResult<Vec<String>> {
        let n = self.inner.dim();
        if i >= n || j >= n {
            return Err(PyValueError::new_err(format!("index out of range for dimension {n}")));
        }
        let v = self.inner.bracket(&self.inner.basis(i), &self.inner.basis(j));
        Ok(v.0.iter().map(ToString::to_string).collect())
    }

    fn jacobi_holds(&self) -> bool {
        self.inner.jacobi_check().is_ok()
    }

    fn eta(&self, i: usize) -> PyResult<PyForm> {
        if !(1..=3).contains(&i) {
            return Err(PyValueError::new_err("i must be 1, 2 or 3"));
        }
        Ok(PyForm { inner: self.inner.eta(i) })
    }

    fn d(&self, form: &PyForm) -> PyForm {
        PyForm { inner: self.inner.d(&form.inner) }
    }

    fn canonical_torsion(&self) -> PyForm {
        PyForm { inner: canonical_torsion(&self.inner) }
    }

    /// Diagonal of the Ricci tensor of the canonical connection.
    fn ricci_diagonal(&self) -> Vec<String> {
        let ric = ricci(&self.inner, &canonical_connection(&self.inner));
        (0..self.inner.dim()).map(|i| ric.get(i, i).to_string()).collect()
    }

    /// `(s_nabla, s_g)`.
    fn scalar_curvatures(&self) -> (String, String) {
        let (sn, sg) = scalars(&self.inner, &canonical_connection(&self.inner));
        (sn.to_string(), sg.to_string())
    }

    fn holonomy_dim(&self) -> PyResult<usize> {
        Ok(holonomy(&self.inner, &canonical_connection(&self.inner)).map_err(err)?.dim())
    }

    fn __repr__(&self) -> String {
        format!("QHAlgebra(p={}, lambda={})", self.inner.p(), self.inner.lambda())
    }
}

/// Runs verification suites and returns `(exit_code, json_report)`.
#[pyfunction]
#[pyo3(signature = (p = 1, lam = "formal", suites = vec!["all".to_string()]))]
fn verify(p: usize, lam: &str, suites: Vec<String>) -> PyResult<(i32, String)> {
    let config = ReportConfig::new(p, lam, &suites, "json").map_err(err)?;
    let report = run(&config).map_err(err)?;
    Ok((report.exit_code(), report.to_json()))
}

#[pymodule]
fn qhg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAlgebra>()?;
    m.add_class::<PyForm>()?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
