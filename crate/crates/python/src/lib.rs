//! Python bindings. Structured results cross the boundary as plain dicts and
//! lists decoded from the library's JSON serialization.

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use vocabsize::corpus;
use vocabsize::fitting::{self, FitResult, ModelKind};
use vocabsize::solver::{self, Normalization, SearchMode, Weights};
use vocabsize::sweep;
use vocabsize::tokenizer::{self, TokenizerModel};
use vocabsize::{Error, ErrorKind};

fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e.kind() {
        ErrorKind::Io => PyIOError::new_err(msg),
        ErrorKind::Parse | ErrorKind::Precondition => PyValueError::new_err(msg),
        ErrorKind::Solver => PyRuntimeError::new_err(msg),
    }
}

fn to_object<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn parse_model(name: &str) -> PyResult<ModelKind> {
    match name {
        "quad" => Ok(ModelKind::Quad),
        "quadexp" | "quad_exp" | "quad-exp" => Ok(ModelKind::QuadExp),
        other => Err(PyValueError::new_err(format!("unknown model {other:?}; expected 'quad' or 'quadexp'"))),
    }
}

fn weights(alpha: (f64, f64, f64)) -> PyResult<Weights> {
    let w = Weights::new(alpha.0, alpha.1, alpha.2);
    w.validate().map_err(to_py)?;
    Ok(w)
}

/// Corpus statistics of `text` as a dict.
#[pyfunction]
fn compute_stats(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    let stats = corpus::compute_stats(text).map_err(to_py)?;
    to_object(py, &corpus::StatsReport::from(stats))
}

/// Rows of a Δ/Θ sweep over `[n_min, n_max]`.
#[pyfunction]
#[pyo3(signature = (text, n_min, n_max, step=None))]
fn run_sweep(py: Python<'_>, text: &str, n_min: usize, n_max: usize, step: Option<usize>) -> PyResult<Py<PyAny>> {
    let step = step.unwrap_or_else(|| sweep::default_step(n_min, n_max));
    let table = py.detach(|| sweep::run_sweep(text, n_min, n_max, step)).map_err(to_py)?;
    to_object(py, &table.points)
}

#[pyclass(name = "Tokenizer", frozen)]
struct PyTokenizer {
    model: TokenizerModel,
}

#[pymethods]
impl PyTokenizer {
    #[staticmethod]
    fn train(py: Python<'_>, text: &str, n: usize) -> PyResult<Self> {
        let model = py.detach(|| tokenizer::train(text, n)).map_err(to_py)?;
        Ok(PyTokenizer { model })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let file = std::fs::File::open(path).map_err(|e| to_py(e.into()))?;
        let model = TokenizerModel::read_from(std::io::BufReader::new(file)).map_err(to_py)?;
        Ok(PyTokenizer { model })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        let file = std::fs::File::create(path).map_err(|e| to_py(e.into()))?;
        self.model.write_to(std::io::BufWriter::new(file)).map_err(to_py)
    }

    #[getter]
    fn size(&self) -> usize {
        self.model.size()
    }

    #[getter]
    fn exhausted(&self) -> bool {
        self.model.exhausted()
    }

    #[getter]
    fn pieces(&self) -> Vec<String> {
        self.model.pieces().to_vec()
    }

    #[getter]
    fn merges(&self) -> Vec<(String, String)> {
        self.model.merge_pairs().map(|(l, r)| (l.to_owned(), r.to_owned())).collect()
    }

    /// Token counts over `text`, keyed by piece.
    fn segment(&self, py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
        let hist = self.model.segment(text).map_err(to_py)?;
        to_object(py, &hist.by_piece(&self.model))
    }

    fn __len__(&self) -> usize {
        self.model.size()
    }

    fn __repr__(&self) -> String {
        format!("Tokenizer(size={})", self.model.size())
    }
}

#[pyclass(name = "Fit", frozen)]
struct PyFit {
    inner: FitResult,
}

#[pymethods]
impl PyFit {
    #[new]
    fn new(model: &str, coeffs: Vec<f64>) -> PyResult<Self> {
        let inner = FitResult::with_coeffs(parse_model(model)?, coeffs).map_err(to_py)?;
        Ok(PyFit { inner })
    }

    /// Least-squares fit of `(n, y)` points.
    #[staticmethod]
    fn fit(points: Vec<(f64, f64)>, model: &str) -> PyResult<Self> {
        let inner = fitting::fit(&points, parse_model(model)?).map_err(to_py)?;
        Ok(PyFit { inner })
    }

    #[getter]
    fn model(&self) -> String {
        self.inner.model.to_string()
    }

    #[getter]
    fn coeffs(&self) -> Vec<f64> {
        self.inner.coeffs.clone()
    }

    #[getter]
    fn r_squared(&self) -> Option<f64> {
        self.inner.r_squared
    }

    fn evaluate(&self, n: f64) -> PyResult<f64> {
        self.inner.evaluate(n).map_err(to_py)
    }

    fn derivatives(&self, n: f64) -> PyResult<(f64, f64)> {
        self.inner.derivatives(n).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Fit(model={:?}, coeffs={:?})", self.inner.model.to_string(), self.inner.coeffs)
    }
}

#[pyclass(name = "CostSpec", frozen)]
struct PyCostSpec {
    inner: solver::CostSpec,
}

#[pymethods]
impl PyCostSpec {
    /// `normalization` is `(unique_chars, unique_words, delta_scale, theta_scale)`.
    #[new]
    #[pyo3(signature = (delta, theta, normalization=None))]
    fn new(delta: PyRef<'_, PyFit>, theta: PyRef<'_, PyFit>, normalization: Option<(f64, f64, f64, f64)>) -> PyResult<Self> {
        let normalization = normalization.map(|(c, w, d, t)| Normalization {
            unique_chars: c,
            unique_words: w,
            delta_scale: d,
            theta_scale: t,
        });
        let inner = solver::CostSpec::new(delta.inner.clone(), theta.inner.clone(), normalization).map_err(to_py)?;
        Ok(PyCostSpec { inner })
    }

    /// Parse the fits JSON written by `vocabsize fit`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner: solver::CostSpec =
            serde_json::from_str(text).map_err(|e| to_py(e.into()))?;
        inner.validate().map_err(to_py)?;
        Ok(PyCostSpec { inner })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.inner).map_err(|e| to_py(e.into()))
    }

    #[getter]
    fn model(&self) -> String {
        self.inner.model().to_string()
    }

    fn cost(&self, alpha: (f64, f64, f64), n: f64) -> PyResult<f64> {
        self.inner.cost(&weights(alpha)?, n).map_err(to_py)
    }

    /// Stationary point for weights `alpha`; the bracket applies to
    /// quadexp fits only.
    #[pyo3(signature = (alpha, bracket=(1.0, 500.0)))]
    fn solve(&self, py: Python<'_>, alpha: (f64, f64, f64), bracket: (f64, f64)) -> PyResult<Py<PyAny>> {
        let outcome = solver::solve(&self.inner, &weights(alpha)?, bracket).map_err(to_py)?;
        to_object(py, &outcome)
    }

    /// Random-restart search; returns `{"outcomes": [...], "summary": {...}}`.
    #[pyo3(signature = (restarts=25000, seed=0, n_bound=500.0, mode="root"))]
    fn search(&self, py: Python<'_>, restarts: usize, seed: u64, n_bound: f64, mode: &str) -> PyResult<Py<PyAny>> {
        let mode = match mode {
            "root" => SearchMode::Root,
            "min-abs" | "min_abs" => SearchMode::MinAbs,
            other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
        };
        if restarts == 0 {
            return Err(PyValueError::new_err("restarts must be at least 1"));
        }
        let outcomes = py
            .detach(|| solver::search_alpha(&self.inner, restarts, seed, n_bound, mode))
            .map_err(to_py)?;
        let summary = solver::summarize(&outcomes, restarts);
        to_object(py, &serde_json::json!({ "outcomes": outcomes, "summary": summary }))
    }

    /// Weights whose quadratic optimum lands on `n_target`.
    #[pyo3(signature = (n_target, seed=0, attempts=10))]
    fn reverse(&self, py: Python<'_>, n_target: f64, seed: u64, attempts: usize) -> PyResult<Py<PyAny>> {
        let solutions = solver::reverse_solve(&self.inner, n_target, seed, attempts).map_err(to_py)?;
        to_object(py, &solutions)
    }
}

#[pymodule]
fn pyvocabsize(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(compute_stats, m)?)?;
    m.add_function(wrap_pyfunction!(run_sweep, m)?)?;
    m.add_class::<PyTokenizer>()?;
    m.add_class::<PyFit>()?;
    m.add_class::<PyCostSpec>()?;
    Ok(())
}
