//! Python bindings: catalog access, point analysis, verification runs and
//! branch classification, mirroring the command-line interface.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use moebiuslab::catalog;
use moebiuslab::classifier::{classify as classify_rs, SampleConfig};
use moebiuslab::invariants::analyze_point as analyze_point_rs;
use moebiuslab::report::verify_entry;

fn err(e: moebiuslab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<PyObject> {
    Ok(match v {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => b.into_py(py),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py(py)
            } else {
                n.as_f64().unwrap().into_py(py)
            }
        }
        serde_json::Value::String(s) => s.into_py(py),
        serde_json::Value::Array(items) => {
            let list = PyList::empty_bound(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_py(py)
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new_bound(py);
            for (k, val) in map {
                dict.set_item(k, json_to_py(py, val)?)?;
            }
            dict.into_py(py)
        }
    })
}

fn to_py<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<PyObject> {
    let v = serde_json::to_value(value)
        .map_err(|e| PyValueError::new_err(format!("serialization failed: {e}")))?;
    json_to_py(py, &v)
}

fn config(samples: usize, seed: u64) -> SampleConfig {
    SampleConfig {
        point_count: samples,
        seed,
        ..Default::default()
    }
}

/// List the built-in catalog entries with parameter schemas and branches.
#[pyfunction]
fn catalog_entries(py: Python<'_>) -> PyResult<PyObject> {
    let list = PyList::empty_bound(py);
    for e in catalog::entries() {
        let d = PyDict::new_bound(py);
        d.set_item("name", e.name)?;
        d.set_item("description", e.description)?;
        let params = PyDict::new_bound(py);
        for (k, v) in e.params {
            params.set_item(k, v)?;
        }
        d.set_item("params", params)?;
        d.set_item("branch", e.branch)?;
        list.append(d)?;
    }
    Ok(list.into_py(py))
}

/// Compute the Moebius invariants at a chart point of a catalog entry or
/// JSON spec-file path.
#[pyfunction]
fn analyze_point(py: Python<'_>, target: &str, x: Vec<f64>) -> PyResult<PyObject> {
    let spec = catalog::resolve(target).map_err(err)?;
    let pd = analyze_point_rs(&spec, &x).map_err(err)?;
    let d = PyDict::new_bound(py);
    d.set_item("x", pd.x)?;
    d.set_item("rho", pd.moebius.rho)?;
    d.set_item("mean_curvature", pd.moebius.mean)?;
    d.set_item("lambda_bar", pd.moebius.lambda_bar.clone())?;
    d.set_item("theta", pd.moebius.theta.clone())?;
    d.set_item("s_star", pd.moebius.s_star)?;
    d.set_item("omega_norm", pd.moebius.omega_norm)?;
    let res = PyDict::new_bound(py);
    res.set_item("gauss", pd.residuals.gauss)?;
    res.set_item("codazzi_b", pd.residuals.codazzi_b)?;
    res.set_item("codazzi_psi", pd.residuals.codazzi_psi)?;
    res.set_item("ricci", pd.residuals.ricci)?;
    res.set_item("bianchi", pd.residuals.bianchi)?;
    d.set_item("residuals", res)?;
    Ok(d.into_py(py))
}

/// Run the identity and structure-equation verification suite.
#[pyfunction]
#[pyo3(signature = (target, samples=32, seed=0, structure_tol=None))]
fn verify(
    py: Python<'_>,
    target: &str,
    samples: usize,
    seed: u64,
    structure_tol: Option<f64>,
) -> PyResult<PyObject> {
    let spec = catalog::resolve(target).map_err(err)?;
    let integrated = spec.metadata.get("construction").map(String::as_str)
        == Some("curve-cylinder-integrated");
    let tol = structure_tol.unwrap_or(if integrated { 1e-4 } else { 1e-6 });
    let report = verify_entry(&spec, &config(samples, seed), tol).map_err(err)?;
    to_py(py, &report)
}

/// Classify a hypersurface against the known branch structure.
#[pyfunction]
#[pyo3(signature = (target, samples=16, seed=0))]
fn classify(py: Python<'_>, target: &str, samples: usize, seed: u64) -> PyResult<PyObject> {
    let spec = catalog::resolve(target).map_err(err)?;
    let report = classify_rs(&spec, &config(samples, seed)).map_err(err)?;
    to_py(py, &report)
}

#[pymodule]
fn moebiuslab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(catalog_entries, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_point, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    Ok(())
}
