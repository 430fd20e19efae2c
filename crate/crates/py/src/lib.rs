//! Python bindings: protocols, cheat reports, tradeoff and robustness
//! curves, the qutrit oracle, and a few state-discrimination primitives.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

use weakot::catalog::WCFPrimitive;
use weakot::protocol::ProtocolSpec;
use weakot::qcore::{CMat, DensityOp};

fn err(e: weakot::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let items = a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn ser<'py, T: serde::Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(x).map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_py(py, &v)
}

fn density(rows: Vec<Vec<Complex64>>) -> PyResult<DensityOp> {
    let n = rows.len();
    let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
    let m = CMat::from_row_major(n, n, flat).map_err(err)?;
    DensityOp::new(m).map_err(err)
}

/// A validated honest protocol.
#[pyclass(name = "Protocol", frozen)]
struct PyProtocol {
    spec: ProtocolSpec,
}

#[pymethods]
impl PyProtocol {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyProtocol { spec: weakot::protocol::parse_protocol(text).map_err(err)? })
    }

    #[getter]
    fn name(&self) -> String {
        self.spec.name().to_string()
    }

    fn to_json(&self) -> String {
        self.spec.to_json()
    }

    /// Δ, F, both cheating bounds and the simulated attacks, as a dict.
    fn cheat_report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let rep = weakot::attacks::cheat_report(&self.spec).map_err(err)?;
        ser(py, &rep)
    }

    fn completeness<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        ser(py, &weakot::protocol::validate_completeness(&self.spec))
    }

    fn bob_purified_attack(&self, s: u8) -> PyResult<f64> {
        weakot::attacks::bob_purified_attack(&self.spec, s).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Protocol({:?})", self.spec.name())
    }
}

#[pyfunction]
fn build_cks() -> PyProtocol {
    PyProtocol { spec: weakot::catalog::build_cks() }
}

#[pyfunction]
fn build_trivial() -> PyProtocol {
    PyProtocol { spec: weakot::catalog::build_trivial() }
}

#[pyfunction]
fn random_complete_protocol(seed: u64) -> PyProtocol {
    PyProtocol { spec: weakot::catalog::random_complete_protocol(seed) }
}

#[pyfunction]
#[pyo3(signature = (lam, epsilon = 0.0, dyadic_bits = 52))]
fn combined_bounds(py: Python<'_>, lam: f64, epsilon: f64, dyadic_bits: u32) -> PyResult<Bound<'_, PyAny>> {
    let w = WCFPrimitive::new(lam, epsilon, dyadic_bits).map_err(err)?;
    ser(py, &weakot::catalog::combined_bounds(&w).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (epsilon, points, dyadic_bits = 20))]
fn curve(py: Python<'_>, epsilon: f64, points: usize, dyadic_bits: u32) -> PyResult<Bound<'_, PyAny>> {
    ser(py, &weakot::tradeoff::curve(epsilon, points, dyadic_bits).map_err(err)?)
}

#[pyfunction]
fn prop3_bound(delta: f64) -> PyResult<f64> {
    weakot::tradeoff::prop3_bound(delta).map_err(err)
}

#[pyfunction]
fn delta_star() -> f64 {
    weakot::tradeoff::delta_star()
}

#[pyfunction]
#[pyo3(signature = (delta, epsilon = 0.0))]
fn tune_lambda(py: Python<'_>, delta: f64, epsilon: f64) -> PyResult<Bound<'_, PyAny>> {
    ser(py, &weakot::tradeoff::tune_lambda(delta, epsilon).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (delta, grid = 100))]
fn cks_alice_oracle(py: Python<'_>, delta: f64, grid: usize) -> PyResult<Bound<'_, PyAny>> {
    let est = py.detach(|| weakot::oracle::cks_alice_oracle(delta, grid)).map_err(err)?;
    ser(py, &est)
}

#[pyfunction]
fn guess_prob(rho: Vec<Vec<Complex64>>, xi: Vec<Vec<Complex64>>) -> PyResult<f64> {
    weakot::qcore::guess_prob(&density(rho)?, &density(xi)?).map_err(err)
}

#[pyfunction]
fn fidelity(rho: Vec<Vec<Complex64>>, xi: Vec<Vec<Complex64>>) -> PyResult<f64> {
    weakot::qcore::fidelity(&density(rho)?, &density(xi)?).map_err(err)
}

/// Runs the invariant suite; returns `(all_passed, report_text)`.
#[pyfunction]
#[pyo3(signature = (seed = 0))]
fn verify(py: Python<'_>, seed: u64) -> (bool, String) {
    let rep = py.detach(|| weakot::verify::run_all(seed));
    (rep.all_passed(), rep.render())
}

#[pymodule]
fn weakot_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProtocol>()?;
    m.add_function(wrap_pyfunction!(build_cks, m)?)?;
    m.add_function(wrap_pyfunction!(build_trivial, m)?)?;
    m.add_function(wrap_pyfunction!(random_complete_protocol, m)?)?;
    m.add_function(wrap_pyfunction!(combined_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(curve, m)?)?;
    m.add_function(wrap_pyfunction!(prop3_bound, m)?)?;
    m.add_function(wrap_pyfunction!(delta_star, m)?)?;
    m.add_function(wrap_pyfunction!(tune_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(cks_alice_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(guess_prob, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
