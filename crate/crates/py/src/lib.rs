//! Python bindings. Structured results (enumerations, summaries, reports,
//! audits) are returned as plain dicts and lists.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use rqbc_core::adversary::{self, Strategy, ViewHorizon};
use rqbc_core::harness::{self, to_sorted_json, RunConfig};
use rqbc_core::quantum::{self, BellLabel};
use rqbc_core::spacetime::{self, Topology};
use rqbc_core::{Error, Scheme, SchemeParams, ValidationMode};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "BellLabel", module = "rqbc", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct PyBellLabel(BellLabel);

#[pymethods]
impl PyBellLabel {
    #[new]
    fn new(i: u8, j: u8) -> PyResult<Self> {
        BellLabel::new(i, j).map(PyBellLabel).map_err(err)
    }

    /// Parses `"01"`, `"zeta+"`, `"eta-"` and similar.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        text.parse().map(PyBellLabel).map_err(err)
    }

    #[staticmethod]
    fn all() -> Vec<Self> {
        BellLabel::ALL.iter().map(|&l| PyBellLabel(l)).collect()
    }

    #[getter]
    fn i(&self) -> u8 {
        self.0.i()
    }

    #[getter]
    fn j(&self) -> u8 {
        self.0.j()
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.0.name()
    }

    #[getter]
    fn committed_bit(&self) -> u8 {
        rqbc_core::committed_bit(self.0)
    }

    fn __xor__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PyBellLabel(self.0 ^ label(other)?))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("BellLabel({}, {})", self.0.i(), self.0.j())
    }
}

/// Accepts a `BellLabel` or a string such as `"10"`.
fn label(obj: &Bound<'_, PyAny>) -> PyResult<BellLabel> {
    if let Ok(l) = obj.cast::<PyBellLabel>() {
        return Ok(l.get().0);
    }
    let text: String = obj.extract()?;
    text.parse().map_err(err)
}

fn parse<T: std::str::FromStr<Err = Error>>(text: &str) -> PyResult<T> {
    text.parse().map_err(err)
}

fn to_python<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = to_sorted_json(value).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Builds a run configuration from keyword arguments named like the CLI flags.
fn config(py: Python<'_>, kwargs: Option<&Bound<'_, PyDict>>) -> PyResult<RunConfig> {
    match kwargs {
        None => Ok(RunConfig::default()),
        Some(k) => {
            let text: String = py.import("json")?.call_method1("dumps", (k,))?.extract()?;
            RunConfig::from_json(&text).map_err(err)
        }
    }
}

fn params(scheme: &str, phi: Option<&str>, n_pairs: usize) -> PyResult<SchemeParams> {
    let scheme: Scheme = parse(scheme)?;
    let phi = phi.map(parse).transpose()?;
    let p = adversary::scan_params(scheme, phi, n_pairs);
    p.validate().map_err(err)?;
    Ok(p)
}

#[pyfunction]
fn make_bell(label_: &Bound<'_, PyAny>) -> PyResult<Vec<(f64, f64)>> {
    let state = quantum::make_bell(label(label_)?);
    Ok(state.amplitudes().iter().map(|a| (a.re, a.im)).collect())
}

#[pyfunction]
fn swapped_label(a: &Bound<'_, PyAny>, b: &Bound<'_, PyAny>, outcome: &Bound<'_, PyAny>) -> PyResult<PyBellLabel> {
    Ok(PyBellLabel(quantum::swapped_label(label(a)?, label(b)?, label(outcome)?)))
}

/// Pauli that relates the teleported qubit to the input, as `I`, `X`, `Z` or `ZX`.
#[pyfunction]
fn teleport_correction(shared: &Bound<'_, PyAny>, outcome: &Bound<'_, PyAny>) -> PyResult<String> {
    Ok(format!("{:?}", quantum::teleport_correction(label(shared)?, label(outcome)?)))
}

#[pyfunction]
fn committed_bit(label_: &Bound<'_, PyAny>) -> PyResult<u8> {
    Ok(rqbc_core::committed_bit(label(label_)?))
}

/// Exact branch list of one execution. Keyword arguments as for the CLI.
#[pyfunction]
#[pyo3(signature = (**kwargs))]
fn enumerate<'py>(py: Python<'py>, kwargs: Option<&Bound<'py, PyDict>>) -> PyResult<Bound<'py, PyAny>> {
    let e = harness::enumerate(&config(py, kwargs)?).map_err(err)?;
    to_python(py, &e)
}

/// Sampled, validated transcripts: one dict per pair per trial.
#[pyfunction]
#[pyo3(signature = (**kwargs))]
fn run<'py>(py: Python<'py>, kwargs: Option<&Bound<'py, PyDict>>) -> PyResult<Bound<'py, PyAny>> {
    let ts = harness::sample_transcripts(&config(py, kwargs)?).map_err(err)?;
    to_python(py, &ts)
}

#[pyfunction]
#[pyo3(signature = (**kwargs))]
fn monte_carlo<'py>(py: Python<'py>, kwargs: Option<&Bound<'py, PyDict>>) -> PyResult<Bound<'py, PyAny>> {
    let s = harness::monte_carlo(&config(py, kwargs)?).map_err(err)?;
    to_python(py, &s)
}

#[pyfunction]
#[pyo3(signature = (scheme, strategy, mode = "R2", phi = None, n_pairs = 1))]
fn detection_probability(scheme: &str, strategy: &str, mode: &str, phi: Option<&str>, n_pairs: usize) -> PyResult<f64> {
    let s: Strategy = parse(strategy)?;
    let m: ValidationMode = parse(mode)?;
    adversary::detection_probability(&params(scheme, phi, n_pairs)?, &s, m).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, deltas, mode = "R2"))]
fn string_cheat_acceptance(n: usize, deltas: &Bound<'_, PyList>, mode: &str) -> PyResult<f64> {
    let deltas = deltas.iter().map(|d| label(&d)).collect::<PyResult<Vec<_>>>()?;
    adversary::string_cheat_acceptance(n, &deltas, parse(mode)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (scheme, upto = "storage", phi = None, n_pairs = 1))]
fn concealment_tv(scheme: &str, upto: &str, phi: Option<&str>, n_pairs: usize) -> PyResult<f64> {
    let horizon = match upto {
        "confirmation" => ViewHorizon::Confirmation,
        "storage" => ViewHorizon::Storage,
        other => return Err(PyValueError::new_err(format!("unknown horizon `{other}`"))),
    };
    adversary::concealment_tv(&params(scheme, phi, n_pairs)?, horizon).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (strategy, scheme = "single"))]
fn extraction_guess_probability(strategy: &str, scheme: &str) -> PyResult<f64> {
    adversary::extraction_guess_probability(&parse(strategy)?, &params(scheme, None, 1)?).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (scheme = "single", mode = "R2", phi = None, n_pairs = 1))]
fn attack_scan<'py>(
    py: Python<'py>,
    scheme: &str,
    mode: &str,
    phi: Option<&str>,
    n_pairs: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let report = adversary::build_report(
        &params(scheme, phi, n_pairs)?,
        &adversary::default_strategy_menu(),
        parse(mode)?,
    )
    .map_err(err)?;
    to_python(py, &report)
}

/// Light-cone audit of the standard schedule; `T` below `2x/c` is audited, not rejected.
#[pyfunction]
#[pyo3(signature = (x = 1.0, c = 1.0, T = None, scheme = "single"))]
#[allow(non_snake_case)]
fn audit<'py>(py: Python<'py>, x: f64, c: f64, T: Option<f64>, scheme: &str) -> PyResult<Bound<'py, PyAny>> {
    let scheme: Scheme = parse(scheme)?;
    let t = T.unwrap_or(10.0 * x / c);
    let schedule = spacetime::unchecked_schedule(x, c, t, scheme).map_err(err)?;
    let report = spacetime::audit(&schedule, &Topology::standard(scheme, x, c).map_err(err)?).map_err(err)?;
    to_python(py, &report)
}

#[pymodule]
fn rqbc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBellLabel>()?;
    m.add_function(wrap_pyfunction!(make_bell, m)?)?;
    m.add_function(wrap_pyfunction!(swapped_label, m)?)?;
    m.add_function(wrap_pyfunction!(teleport_correction, m)?)?;
    m.add_function(wrap_pyfunction!(committed_bit, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(monte_carlo, m)?)?;
    m.add_function(wrap_pyfunction!(detection_probability, m)?)?;
    m.add_function(wrap_pyfunction!(string_cheat_acceptance, m)?)?;
    m.add_function(wrap_pyfunction!(concealment_tv, m)?)?;
    m.add_function(wrap_pyfunction!(extraction_guess_probability, m)?)?;
    m.add_function(wrap_pyfunction!(attack_scan, m)?)?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    Ok(())
}
