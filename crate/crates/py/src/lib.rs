//! Python bindings for `circ_core`. Scalars cross the boundary as strings
//! such as `"-3/4"`; reports come back as dictionaries.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use circ_core::algebra::Scalar;
use circ_core::circuit::{self, Circuit};
use circ_core::cost::cost;
use circ_core::family;
use circ_core::lowerbound::{self, PointStrategy};
use circ_core::semantics::{eval_outputs, expand_symbolic};
use circ_core::transforms::{self, JoinSpec, Oracle};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn scalars(v: &[String]) -> PyResult<Vec<Scalar>> {
    v.iter().map(|s| s.trim().parse::<Scalar>().map_err(err)).collect()
}

fn strings(v: &[Scalar]) -> Vec<String> {
    v.iter().map(Scalar::to_string).collect()
}

fn to_dict<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A parameterized arithmetic circuit.
#[pyclass(name = "Circuit", module = "circ_py", frozen)]
pub struct PyCircuit {
    inner: Circuit,
}

#[pymethods]
impl PyCircuit {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: circuit::parse(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        circuit::serialize(&self.inner)
    }

    #[getter]
    fn params(&self) -> usize {
        self.inner.params()
    }

    #[getter]
    fn inputs(&self) -> usize {
        self.inner.inputs()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Circuit(params={}, inputs={}, nodes={})", self.inner.params(), self.inner.inputs(), self.inner.len())
    }

    fn eval(&self, params: Vec<String>, inputs: Vec<String>) -> PyResult<Vec<String>> {
        let out = eval_outputs(&self.inner, &scalars(&params)?, &scalars(&inputs)?).map_err(err)?;
        Ok(strings(&out))
    }

    /// Outputs as rational functions in `U1.. , X1..`.
    #[pyo3(signature = (budget = 100_000))]
    fn expand(&self, budget: usize) -> PyResult<Vec<String>> {
        let e = expand_symbolic(&self.inner, budget).map_err(err)?;
        Ok(e.outputs.iter().map(|f| f.to_string()).collect())
    }

    fn cost<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &cost(&self.inner))
    }

    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &self.inner.validate())
    }

    fn gc(&self) -> Self {
        Self { inner: transforms::garbage_collect(&self.inner) }
    }

    #[pyo3(signature = (seed = 0, samples = 16))]
    fn reduce(&self, seed: u64, samples: usize) -> PyResult<Self> {
        let r = transforms::reduce(&self.inner, Oracle::Fingerprint { seed, samples }).map_err(err)?;
        Ok(Self { inner: r.circuit })
    }

    /// Feeds the outputs of `self` into the inputs of `other`.
    fn join(&self, other: &PyCircuit) -> PyResult<Self> {
        let spec = JoinSpec::identity(other.inner.inputs());
        Ok(Self { inner: transforms::join(&self.inner, &other.inner, &spec).map_err(err)? })
    }
}

#[pyfunction]
fn build_h(n: usize) -> PyCircuit {
    PyCircuit { inner: family::build_h(n) }
}

#[pyfunction]
fn build_beta(n: usize) -> PyCircuit {
    PyCircuit { inner: family::build_beta_n(n) }
}

/// Coefficients of `F(t, u, Y)`, constant term first.
#[pyfunction]
fn eval_f(n: usize, t: String, u: Vec<String>) -> PyResult<Vec<String>> {
    let t: Scalar = t.parse().map_err(err)?;
    let f = family::eval_f(n, &t, &scalars(&u)?).map_err(err)?;
    Ok(strings(&f.to_dense_univariate().map_err(err)?))
}

#[pyfunction]
fn verify_identity(n: usize, t: String, u: Vec<String>) -> PyResult<bool> {
    let t: Scalar = t.parse().map_err(err)?;
    family::verify_elimination_identity(n, &t, &scalars(&u)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, seed = 0))]
fn identification_points(n: usize, seed: u64) -> Vec<Vec<String>> {
    family::identification_points(n, seed).iter().map(|p| strings(p)).collect()
}

#[pyfunction]
#[pyo3(signature = (n, seed = None, ceiling = lowerbound::DEFAULT_CEILING))]
fn rank_certificate<'py>(py: Python<'py>, n: usize, seed: Option<u64>, ceiling: usize) -> PyResult<Bound<'py, PyAny>> {
    let strategy = seed.map_or(PointStrategy::Primes, |seed| PointStrategy::Random { seed });
    let cert = py.detach(|| lowerbound::rank_certificate(n, &strategy, ceiling)).map_err(err)?;
    to_dict(py, &cert)
}

/// The interpolating evaluator for `F` reading the identification points.
#[pyfunction]
#[pyo3(signature = (n, points_seed = 0))]
fn naive_evaluator(n: usize, points_seed: u64) -> PyResult<PyCircuit> {
    let pts = family::identification_points(n, points_seed);
    Ok(PyCircuit { inner: lowerbound::naive_evaluator(n, &pts).map_err(err)?.circuit })
}

#[pyfunction]
#[pyo3(signature = (candidate, n, trials = 10, seed = 0, points_seed = 0))]
fn audit<'py>(
    py: Python<'py>,
    candidate: &PyCircuit,
    n: usize,
    trials: usize,
    seed: u64,
    points_seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let pts = family::identification_points(n, points_seed);
    let rep = lowerbound::audit_candidate(&candidate.inner, n, &pts, trials, seed);
    to_dict(py, &rep)
}

#[pymodule]
fn circ_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCircuit>()?;
    m.add_function(wrap_pyfunction!(build_h, m)?)?;
    m.add_function(wrap_pyfunction!(build_beta, m)?)?;
    m.add_function(wrap_pyfunction!(eval_f, m)?)?;
    m.add_function(wrap_pyfunction!(verify_identity, m)?)?;
    m.add_function(wrap_pyfunction!(identification_points, m)?)?;
    m.add_function(wrap_pyfunction!(rank_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(naive_evaluator, m)?)?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    Ok(())
}
