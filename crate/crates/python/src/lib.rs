//! Python bindings: spaces, elements, certificates, verification and surveys.

use std::collections::BTreeMap;

use gufactor::factor::factor_det_refined_with;
use gufactor::field::prime_power;
use gufactor::forms::DEFAULT_BUDGET;
use gufactor::wire::{self, CertificateDoc, Instance, MatrixDoc};
use gufactor::{
    factor_with, verify_certificate, Elem, Error, Ext, FactorOptions, FactorizationCertificate,
    GroupElement, HermitianSpace, Kind, SurveyMode, Tower, VerifyReport,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(gufactor, InvariantError, PyRuntimeError);

fn err(e: Error) -> PyErr {
    match e {
        Error::Invariant { .. } | Error::SurveyFailed(_) | Error::SearchFailed(_) => {
            InvariantError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn elem(f: &Tower, coords: &[u32]) -> PyResult<Elem> {
    f.decode(coords).map_err(err)
}

#[pyclass(name = "Space", module = "gufactor", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpace {
    inner: HermitianSpace,
}

#[pymethods]
impl PySpace {
    /// Standard space of kind `sp`, `go-plus`, `go-minus` or `u` over F_q (F_{q^2} for `u`).
    #[staticmethod]
    fn standard(kind: &str, n: usize, q: u64) -> PyResult<Self> {
        let kind = Kind::parse(kind).map_err(err)?;
        let (p, k) = prime_power(q)
            .ok_or_else(|| PyValueError::new_err(format!("q = {q} is not a prime power")))?;
        let ext = if kind == Kind::Hermitian {
            Ext::Quadratic
        } else {
            Ext::Trivial
        };
        let f = Tower::new(p as u64, k, ext, None).map_err(err)?;
        Ok(PySpace {
            inner: HermitianSpace::standard(&f, n, kind).map_err(err)?,
        })
    }

    /// Parse an instance document; returns `(space, element, seed)`.
    #[staticmethod]
    fn from_instance_json(text: &str) -> PyResult<(PySpace, PyElement, u64)> {
        let inst = wire::parse_instance(text).map_err(err)?;
        let space = PySpace {
            inner: inst.space.clone(),
        };
        Ok((
            space,
            PyElement {
                space: inst.space,
                inner: inst.element,
            },
            inst.seed,
        ))
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn epsilon(&self) -> i8 {
        self.inner.epsilon()
    }

    #[getter]
    fn kind(&self) -> Option<&'static str> {
        self.inner.kind().map(Kind::name)
    }

    #[getter]
    fn gram(&self) -> MatrixDoc {
        wire::encode_matrix(self.inner.tower(), self.inner.gram())
    }

    /// Wrap a matrix (rows of coordinate lists) as a group element.
    fn element(&self, rows: MatrixDoc) -> PyResult<PyElement> {
        let g = wire::decode_matrix(self.inner.tower(), &rows).map_err(err)?;
        let inner = GroupElement::new(&self.inner, g).map_err(err)?;
        Ok(PyElement {
            space: self.inner.clone(),
            inner,
        })
    }

    #[pyo3(signature = (count, seed, beta = vec![1]))]
    fn sample(&self, count: usize, seed: u64, beta: Vec<u32>) -> PyResult<Vec<PyElement>> {
        let b = elem(self.inner.tower(), &beta)?;
        let all = self.inner.group_sample(b, count, seed).map_err(err)?;
        Ok(self.wrap(all))
    }

    #[pyo3(signature = (beta = vec![1], budget = DEFAULT_BUDGET))]
    fn enumerate(&self, beta: Vec<u32>, budget: u64) -> PyResult<Vec<PyElement>> {
        let b = elem(self.inner.tower(), &beta)?;
        let all = self.inner.group_enumerate(b, budget).map_err(err)?;
        Ok(self.wrap(all))
    }

    fn __repr__(&self) -> String {
        let f = self.inner.tower();
        format!(
            "Space(kind={}, n={}, p={}, quadratic={})",
            self.inner.kind().map_or("custom", Kind::name),
            self.inner.n(),
            f.p(),
            f.is_quadratic()
        )
    }
}

impl PySpace {
    fn wrap(&self, all: Vec<GroupElement>) -> Vec<PyElement> {
        all.into_iter()
            .map(|inner| PyElement {
                space: self.inner.clone(),
                inner,
            })
            .collect()
    }
}

#[pyclass(name = "Element", module = "gufactor", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyElement {
    space: HermitianSpace,
    inner: GroupElement,
}

#[pymethods]
impl PyElement {
    #[getter]
    fn matrix(&self) -> MatrixDoc {
        wire::encode_matrix(self.space.tower(), &self.inner.g)
    }

    #[getter]
    fn beta(&self) -> Vec<u32> {
        wire::encode_elem(self.space.tower(), self.inner.beta)
    }

    #[pyo3(signature = (seed = 0))]
    fn to_instance_json(&self, seed: u64) -> String {
        wire::to_json(
            &Instance {
                space: self.space.clone(),
                element: self.inner.clone(),
                seed,
            }
            .to_doc(),
        )
    }

    fn __repr__(&self) -> String {
        format!("Element({:?})", self.matrix())
    }
}

#[pyclass(name = "Certificate", module = "gufactor", frozen)]
struct PyCertificate {
    tower: Tower,
    inner: FactorizationCertificate,
}

#[pymethods]
impl PyCertificate {
    #[getter]
    fn h1(&self) -> MatrixDoc {
        wire::encode_matrix(&self.tower, &self.inner.h1.mat)
    }

    #[getter]
    fn h2(&self) -> MatrixDoc {
        wire::encode_matrix(&self.tower, &self.inner.h2.mat)
    }

    /// `True` when h1 and h2 are linear (orthogonal and symplectic spaces).
    #[getter]
    fn linear(&self) -> bool {
        self.inner.h1.is_linear()
    }

    #[getter]
    fn beta(&self) -> Vec<u32> {
        wire::encode_elem(&self.tower, self.inner.beta)
    }

    #[getter]
    fn refined(&self) -> bool {
        self.inner.refined
    }

    #[getter]
    fn transcript(&self) -> Vec<&'static str> {
        self.inner.labels()
    }

    #[getter]
    fn det_h1(&self) -> Option<Vec<u32>> {
        if !self.inner.h1.is_linear() {
            return None;
        }
        let d = self.inner.h1.mat.det(&self.tower).ok()?;
        Some(wire::encode_elem(&self.tower, d))
    }

    fn to_json(&self) -> String {
        wire::to_json(&CertificateDoc::from_certificate(&self.tower, &self.inner))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc: CertificateDoc = wire::from_json(text).map_err(err)?;
        let (tower, inner) = doc.to_certificate().map_err(err)?;
        Ok(PyCertificate { tower, inner })
    }

    fn __repr__(&self) -> String {
        format!(
            "Certificate(transcript={:?}, refined={})",
            self.transcript(),
            self.inner.refined
        )
    }
}

#[pyclass(name = "VerifyReport", module = "gufactor", frozen)]
struct PyVerifyReport {
    inner: VerifyReport,
}

#[pymethods]
impl PyVerifyReport {
    #[getter]
    fn passed(&self) -> bool {
        self.inner.passed
    }

    /// `(name, passed, witness)` per check.
    #[getter]
    fn checks(&self) -> Vec<(String, bool, Option<String>)> {
        self.inner
            .checks
            .iter()
            .map(|c| (c.name.clone(), c.passed, c.witness.clone()))
            .collect()
    }

    fn to_json(&self) -> String {
        wire::report_json(&self.inner)
    }

    fn __bool__(&self) -> bool {
        self.inner.passed
    }
}

#[pyclass(name = "SurveySummary", module = "gufactor", frozen, get_all)]
struct PySurveySummary {
    total: usize,
    passed: usize,
    failures: usize,
    cases: BTreeMap<String, usize>,
    determinants: BTreeMap<String, usize>,
    seconds: f64,
}

/// Factor `element` as h1 h2; `refined` asks for det(h1) = (-1)^m on orthogonal spaces.
#[pyfunction]
#[pyo3(signature = (element, refined = false, seed = 0))]
fn factor(
    py: Python<'_>,
    element: &PyElement,
    refined: bool,
    seed: u64,
) -> PyResult<PyCertificate> {
    let opts = FactorOptions { seed };
    let inner = py
        .detach(|| {
            if refined {
                factor_det_refined_with(&element.space, &element.inner, &opts)
            } else {
                factor_with(&element.space, &element.inner, &opts)
            }
        })
        .map_err(err)?;
    Ok(PyCertificate {
        tower: element.space.tower().clone(),
        inner,
    })
}

#[pyfunction]
#[pyo3(signature = (element, certificate, refined = false))]
fn verify(
    element: &PyElement,
    certificate: &PyCertificate,
    refined: bool,
) -> PyResult<PyVerifyReport> {
    if &certificate.tower != element.space.tower() {
        return Err(PyValueError::new_err(
            "certificate and element live over different fields",
        ));
    }
    let refined = refined || certificate.inner.refined;
    Ok(PyVerifyReport {
        inner: verify_certificate(&element.space, &element.inner, &certificate.inner, refined),
    })
}

/// Factor and verify every element of multiplier `beta`, or `sample` seeded elements.
#[pyfunction]
#[pyo3(signature = (space, beta = vec![1], sample = None, seed = None, budget = DEFAULT_BUDGET, refined = false))]
fn survey(
    py: Python<'_>,
    space: &PySpace,
    beta: Vec<u32>,
    sample: Option<usize>,
    seed: Option<u64>,
    budget: u64,
    refined: bool,
) -> PyResult<PySurveySummary> {
    let b = elem(space.inner.tower(), &beta)?;
    let mode = match (sample, seed) {
        (Some(count), Some(seed)) => SurveyMode::Sample { count, seed },
        (Some(_), None) => return Err(PyValueError::new_err("sampling needs a seed")),
        (None, _) => SurveyMode::Exhaustive { budget },
    };
    let s = py
        .detach(|| gufactor::survey(&space.inner, b, mode, refined))
        .map_err(err)?;
    Ok(PySurveySummary {
        total: s.total,
        passed: s.passed,
        failures: s.failures,
        cases: s.cases,
        determinants: s.determinants,
        seconds: s.elapsed.as_secs_f64(),
    })
}

#[pymodule]
#[pyo3(name = "gufactor")]
fn gufactor_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpace>()?;
    m.add_class::<PyElement>()?;
    m.add_class::<PyCertificate>()?;
    m.add_class::<PyVerifyReport>()?;
    m.add_class::<PySurveySummary>()?;
    m.add_function(wrap_pyfunction!(factor, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(survey, m)?)?;
    m.add("InvariantError", m.py().get_type::<InvariantError>())?;
    Ok(())
}
