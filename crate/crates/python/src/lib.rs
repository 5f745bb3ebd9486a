//! Python bindings. Structured results cross the boundary as JSON strings
//! in the same schema the CLI writes.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use tubelab::cli_report::document::CertificateDocument;
use tubelab::cli_report::spec_file;
use tubelab::geometry::ValidationOptions;
use tubelab::kobayashi::{self, HyperbolicityConfig, ScanOptions};
use tubelab::predicates::{self, SearchLimits, ToleranceSchedule};
use tubelab::{DomainSpec, Point2, WitnessFamily};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(value_err)
}

/// A validated base domain `D`.
#[pyclass(name = "Domain", frozen)]
struct PyDomain {
    inner: DomainSpec,
    validation: ValidationOptions,
}

#[pymethods]
impl PyDomain {
    /// `"fig1"`, `"fig2"` or `"strip"`.
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        let inner = spec_file::preset(name).ok_or_else(|| value_err(format!("unknown preset `{name}`")))?;
        Ok(PyDomain { inner, validation: ValidationOptions::default() })
    }

    /// Parses a TOML spec document.
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        let parsed = spec_file::parse_spec_str(text).map_err(value_err)?;
        Ok(PyDomain { inner: parsed.build().map_err(value_err)?, validation: parsed.validation })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[getter]
    fn strip(&self) -> (f64, f64, f64) {
        let s = self.inner.strip;
        (s.y_lo, s.y_hi, s.mid)
    }

    fn contains(&self, x1: f64, x2: f64) -> bool {
        self.inner.contains(Point2::new(x1, x2))
    }

    fn to_toml(&self) -> String {
        spec_file::to_spec_toml(&self.inner)
    }

    fn to_json(&self) -> PyResult<String> {
        to_json(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Domain(name={:?}, obstacles={})", self.inner.name, self.inner.obstacles.len())
    }
}

/// The harmonic maps `f_n` and their holomorphic lifts `g_n`.
#[pyclass(name = "Family", frozen)]
struct PyFamily {
    inner: WitnessFamily,
}

#[pymethods]
impl PyFamily {
    #[new]
    #[pyo3(signature = (n, mid = 2.0))]
    fn new(n: u32, mid: f64) -> PyResult<Self> {
        Ok(PyFamily { inner: WitnessFamily::new(n, mid).map_err(value_err)? })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n
    }

    fn eval_f(&self, z: Complex64) -> (f64, f64) {
        let p = self.inner.eval_f(z);
        (p.x1, p.x2)
    }

    fn eval_g(&self, z: Complex64) -> (Complex64, Complex64) {
        self.inner.eval_g(z)
    }

    /// Rows of the Jacobian; columns are `d/dx`, `d/dy`.
    fn jac_f(&self, z: Complex64) -> [[f64; 2]; 2] {
        let m = self.inner.jac_f(z);
        [[m.a11, m.a12], [m.a21, m.a22]]
    }

    fn op_norm(&self, z: Complex64) -> f64 {
        self.inner.jac_f(z).op_norm()
    }

    fn image_band(&self, x1: f64) -> PyResult<(f64, f64)> {
        let b = self.inner.image_band(x1).map_err(value_err)?;
        Ok((b.lo, b.hi))
    }

    /// Containment certificate for `f_n(disc) ⊂ D` as JSON.
    fn verify_containment(&self, domain: &PyDomain) -> PyResult<String> {
        to_json(&self.inner.verify_containment(&domain.inner))
    }

    fn is_contained(&self, domain: &PyDomain) -> bool {
        self.inner.verify_containment(&domain.inner).is_contained()
    }
}

/// Property report for `"L"`, `"JPaff"` or `"JP"` as JSON.
#[pyfunction]
#[pyo3(signature = (domain, kind, a = (0.0, 2.0), max_k = 20))]
fn check_property(domain: &PyDomain, kind: &str, a: (f64, f64), max_k: u32) -> PyResult<String> {
    let (d, a, limits) = (&domain.inner, Point2::new(a.0, a.1), SearchLimits::default());
    let report = match kind {
        "L" => predicates::check_property_l(d, a, max_k, ToleranceSchedule::Reciprocal, &limits),
        "JPaff" => predicates::check_property_jpaff(d, a, max_k, &limits),
        "JP" => predicates::check_property_jp(d, a, max_k, &limits),
        other => return Err(value_err(format!("unknown property `{other}` (expected L, JPaff or JP)"))),
    }
    .map_err(value_err)?;
    to_json(&report)
}

#[pyfunction]
#[pyo3(signature = (domain, a = (0.0, 2.0), max_n = 50))]
fn obstruction_scan(domain: &PyDomain, a: (f64, f64), max_n: u32) -> PyResult<String> {
    let cert = kobayashi::obstruction_scan(&domain.inner, Point2::new(a.0, a.1), max_n, &ScanOptions::default())
        .map_err(value_err)?;
    to_json(&cert)
}

/// Metric of the strip `{0 < Re w < h}` at `w` in direction `v`.
#[pyfunction]
fn strip_metric(h: f64, w: Complex64, v: Complex64) -> PyResult<f64> {
    kobayashi::strip_metric(h, w, v).map_err(value_err)
}

/// Full analysis; returns the canonical certificate document.
#[pyfunction]
#[pyo3(signature = (domain, a = (0.0, 2.0), max_k = 20, max_n = 50))]
fn analyze(py: Python<'_>, domain: &PyDomain, a: (f64, f64), max_k: u32, max_n: u32) -> PyResult<String> {
    let config = HyperbolicityConfig { max_k, max_n, ..HyperbolicityConfig::default() };
    let a = Point2::new(a.0, a.1);
    let report = py
        .detach(|| kobayashi::hyperbolicity_report(&domain.inner, a, &config))
        .map_err(value_err)?;
    Ok(CertificateDocument::new(domain.inner.clone(), report, config, domain.validation).to_canonical_json())
}

/// Re-verifies a certificate document; raises `ValueError` naming the
/// first failing item.
#[pyfunction]
fn verify(text: &str) -> PyResult<()> {
    let doc = CertificateDocument::parse(text).map_err(value_err)?;
    doc.verify(Some(text)).map_err(value_err)
}

#[pymodule]
#[pyo3(name = "tubelab")]
fn tubelab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDomain>()?;
    m.add_class::<PyFamily>()?;
    m.add_function(wrap_pyfunction!(check_property, m)?)?;
    m.add_function(wrap_pyfunction!(obstruction_scan, m)?)?;
    m.add_function(wrap_pyfunction!(strip_metric, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
