//! Python bindings: `TableBrace`, `Brace` (any construction, evaluated by
//! formula), `Solution`, and a few module-level helpers.

use bracekit::brace::verify_brace_axioms;
use bracekit::cycle::CycleSpec;
use bracekit::filters::order_filter as filter_order;
use bracekit::ideals::{ideal_closure, is_ideal, is_left_ideal, is_simple, socle};
use bracekit::matched::{action_graph, decompose_and_rebuild, graph_verdict, CycleMode};
use bracekit::spec::{build, BuildSpec};
use bracekit::ybe::{canonical_solution, permutation_group, verify_solution, SetSolution};
use bracekit::{Element, LeftBrace, SharedBrace, VerifyConfig};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyString;
use serde_json::Value;

create_exception!(bracekit, BraceError, PyValueError, "Invalid input or a cap exceeded.");

fn err(e: impl std::fmt::Display) -> PyErr {
    BraceError::new_err(e.to_string())
}

fn cfg(seed: Option<u64>, samples: Option<u64>, cap: Option<usize>) -> VerifyConfig {
    let d = VerifyConfig::default();
    VerifyConfig { seed: seed.unwrap_or(d.seed), samples: samples.unwrap_or(d.samples), cap: cap.unwrap_or(d.cap), ..d }
}

/// A JSON value as plain Python objects.
fn to_py<'py>(py: Python<'py>, v: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Accepts a JSON string or any object `json.dumps` understands.
fn json_text(obj: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(s) = obj.cast::<PyString>() {
        return Ok(s.to_str()?.to_owned());
    }
    obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()
}

fn parse_mode(mode: &str) -> PyResult<CycleMode> {
    match mode {
        "walk-cycle" => Ok(CycleMode::WalkCycle),
        "strict-cycle" => Ok(CycleMode::StrictCycle),
        other => Err(err(format!("mode must be walk-cycle or strict-cycle, got {other:?}"))),
    }
}

#[pyclass(module = "bracekit", name = "TableBrace", frozen)]
struct PyTableBrace {
    inner: bracekit::TableBrace,
}

impl PyTableBrace {
    fn idx(&self, a: usize) -> PyResult<u32> {
        if a < self.inner.order() {
            Ok(a as u32)
        } else {
            Err(err(format!("index {a} out of range for order {}", self.inner.order())))
        }
    }

    fn set(&self, xs: Vec<usize>) -> PyResult<Vec<u32>> {
        let mut out = xs.into_iter().map(|a| self.idx(a)).collect::<PyResult<Vec<u32>>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

#[pymethods]
impl PyTableBrace {
    /// The trivial brace `λ_a = id` on `Z/m₁ × ⋯ × Z/m_k`.
    #[staticmethod]
    fn trivial(shape: Vec<u64>) -> PyResult<Self> {
        let s = bracekit::AdditiveShape::new(shape).map_err(err)?;
        let t = bracekit::TableBrace::tabulate(&bracekit::TrivialBrace::new(s), &VerifyConfig::default()).map_err(err)?;
        Ok(Self { inner: t })
    }

    /// From a table file (string or dict with `shape`, `lambda`, `provenance`).
    #[staticmethod]
    fn from_json(data: &Bound<'_, PyAny>) -> PyResult<Self> {
        let file = serde_json::from_str(&json_text(data)?).map_err(err)?;
        Ok(Self { inner: bracekit::TableBrace::from_file(file).map_err(err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.to_file()).map_err(err)
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn shape(&self) -> Vec<u64> {
        self.inner.shape().moduli().to_vec()
    }

    fn element(&self, i: usize) -> PyResult<Element> {
        Ok(self.inner.element(self.idx(i)?))
    }

    fn index(&self, x: Element) -> PyResult<u32> {
        self.inner.shape().check(&x).map_err(err)?;
        Ok(self.inner.index(&x))
    }

    /// `λ_a(b)` on indices.
    fn lam(&self, a: usize, b: usize) -> PyResult<u32> {
        Ok(self.inner.lambda_idx(self.idx(a)?, self.idx(b)?))
    }

    fn add(&self, a: usize, b: usize) -> PyResult<u32> {
        Ok(self.inner.add_idx(self.idx(a)?, self.idx(b)?))
    }

    fn mul(&self, a: usize, b: usize) -> PyResult<u32> {
        Ok(self.inner.mul_idx(self.idx(a)?, self.idx(b)?))
    }

    fn inv(&self, a: usize) -> PyResult<u32> {
        Ok(self.inner.inv_idx(self.idx(a)?))
    }

    #[pyo3(signature = (seed=None, samples=None))]
    fn verify_axioms<'py>(&self, py: Python<'py>, seed: Option<u64>, samples: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.verify_axioms(&cfg(seed, samples, None)))
    }

    /// `{"simple": bool, "ideal": [...]}`.
    fn is_simple<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &is_simple(&self.inner))
    }

    fn socle(&self) -> Vec<u32> {
        socle(&self.inner)
    }

    fn is_ideal(&self, xs: Vec<usize>) -> PyResult<bool> {
        Ok(is_ideal(&self.inner, &self.set(xs)?))
    }

    fn is_left_ideal(&self, xs: Vec<usize>) -> PyResult<bool> {
        Ok(is_left_ideal(&self.inner, &self.set(xs)?))
    }

    fn ideal_closure(&self, seeds: Vec<usize>) -> PyResult<Vec<u32>> {
        Ok(ideal_closure(&self.inner, &self.set(seeds)?))
    }

    fn decompose<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let d = decompose_and_rebuild(&self.inner, &VerifyConfig::default()).map_err(err)?;
        let components: Vec<Value> = d
            .components
            .iter()
            .map(|c| serde_json::json!({ "prime": c.prime, "shape": c.brace.shape(), "order": c.brace.order() }))
            .collect();
        to_py(py, &serde_json::json!({ "components": components, "eta_check": d.eta_check, "validation": d.validation }))
    }

    fn canonical_solution(&self) -> PyResult<PySolution> {
        Ok(PySolution { inner: canonical_solution(&self.inner, &VerifyConfig::default()).map_err(err)? })
    }

    fn __len__(&self) -> usize {
        self.inner.order()
    }

    fn __repr__(&self) -> String {
        format!("TableBrace(order={}, shape={})", self.inner.order(), self.inner.shape())
    }
}

/// Any construction, evaluated by formula; tabulate it for table-only checks.
#[pyclass(module = "bracekit", name = "Brace", frozen)]
struct PyBrace {
    inner: SharedBrace,
    certificate: bracekit::Report,
    actions: Option<bracekit::matched::IteratedActionsSpec>,
}

impl PyBrace {
    fn elem(&self, x: Element) -> PyResult<Element> {
        self.inner.shape().check(&x).map_err(err)?;
        Ok(x)
    }
}

#[pymethods]
impl PyBrace {
    /// From a build spec: a JSON string or dict tagged with `kind`.
    #[staticmethod]
    #[pyo3(signature = (spec, seed=None, samples=None))]
    fn from_spec(spec: &Bound<'_, PyAny>, seed: Option<u64>, samples: Option<u64>) -> PyResult<Self> {
        let value: Value = serde_json::from_str(&json_text(spec)?).map_err(err)?;
        let spec = BuildSpec::from_value(value).map_err(err)?;
        let built = build(&spec, &cfg(seed, samples, None)).map_err(err)?;
        Ok(Self { inner: built.brace, certificate: built.certificate, actions: built.actions })
    }

    #[getter]
    fn order<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        py.import("builtins")?.getattr("int")?.call1((self.inner.shape().order_big().to_string(),))
    }

    #[getter]
    fn shape(&self) -> Vec<u64> {
        self.inner.shape().moduli().to_vec()
    }

    /// Validation of the construction's hypotheses.
    #[getter]
    fn certificate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.certificate)
    }

    fn provenance<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.provenance())
    }

    /// `λ_a(b)` on elements.
    fn lam(&self, a: Element, b: Element) -> PyResult<Element> {
        Ok(self.inner.lambda(&self.elem(a)?, &self.elem(b)?))
    }

    fn mul(&self, a: Element, b: Element) -> PyResult<Element> {
        Ok(self.inner.mul(&self.elem(a)?, &self.elem(b)?))
    }

    fn inv(&self, a: Element) -> PyResult<Element> {
        Ok(self.inner.inv(&self.elem(a)?))
    }

    /// Exhaustive within the cap, seeded samples beyond it.
    #[pyo3(signature = (seed=None, samples=None, cap=None))]
    fn verify_axioms<'py>(
        &self,
        py: Python<'py>,
        seed: Option<u64>,
        samples: Option<u64>,
        cap: Option<usize>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let report = py.detach(|| verify_brace_axioms(&self.inner, &cfg(seed, samples, cap)));
        to_py(py, &report)
    }

    #[pyo3(signature = (cap=None))]
    fn tabulate(&self, py: Python<'_>, cap: Option<usize>) -> PyResult<PyTableBrace> {
        let t = py.detach(|| bracekit::TableBrace::tabulate(&self.inner, &cfg(None, None, cap))).map_err(err)?;
        Ok(PyTableBrace { inner: t })
    }

    /// Simplicity from the graph of actions of a product construction.
    #[pyo3(signature = (mode="walk-cycle"))]
    fn graph_verdict<'py>(&self, py: Python<'py>, mode: &str) -> PyResult<Bound<'py, PyAny>> {
        let mode = parse_mode(mode)?;
        let actions = self.actions.as_ref().ok_or_else(|| err("not a product construction"))?;
        let c = VerifyConfig::default();
        let factor_simple: Vec<Option<bool>> = actions
            .braces()
            .iter()
            .map(|b| match b.order() {
                Some(o) if o <= c.cap => bracekit::TableBrace::tabulate_unverified(b, &c).ok().map(|t| is_simple(&t).simple),
                _ => None,
            })
            .collect();
        let verdict = graph_verdict(actions, &factor_simple, mode, &c);
        to_py(py, &serde_json::json!({ "graph": action_graph(actions, &c), "verdict": verdict }))
    }

    fn __repr__(&self) -> String {
        format!("Brace(order={}, shape={})", self.inner.shape().order_big(), self.inner.shape())
    }
}

#[pyclass(module = "bracekit", name = "Solution", frozen)]
struct PySolution {
    inner: SetSolution,
}

impl PySolution {
    fn point(&self, x: usize) -> PyResult<u32> {
        if x < self.inner.len() {
            Ok(x as u32)
        } else {
            Err(err(format!("point {x} out of range for a set of size {}", self.inner.len())))
        }
    }
}

#[pymethods]
impl PySolution {
    #[staticmethod]
    fn from_json(data: &Bound<'_, PyAny>) -> PyResult<Self> {
        let file = serde_json::from_str(&json_text(data)?).map_err(err)?;
        Ok(Self { inner: SetSolution::from_file(file).map_err(err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.to_file()).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.len()
    }

    /// `r(x, y) = (f_x(y), g_y(x))`.
    fn r(&self, x: usize, y: usize) -> PyResult<(u32, u32)> {
        Ok(self.inner.r(self.point(x)?, self.point(y)?))
    }

    #[pyo3(signature = (seed=None, samples=None))]
    fn verify<'py>(&self, py: Python<'py>, seed: Option<u64>, samples: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &verify_solution(&self.inner, &cfg(seed, samples, None)))
    }

    /// Order of the group generated by the maps `f_x`.
    #[pyo3(signature = (limit=1 << 20))]
    fn group_order(&self, limit: usize) -> PyResult<usize> {
        Ok(permutation_group(&self.inner, limit).map_err(err)?.order)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// The cycle construction from `(p, r, r')` triples.
#[pyfunction]
fn cycle_brace(primes: Vec<(u64, u32, u32)>) -> PyResult<PyBrace> {
    let spec = CycleSpec::new(&primes).map_err(err)?;
    let built = build(&BuildSpec::Cycle(spec), &VerifyConfig::default()).map_err(err)?;
    Ok(PyBrace { inner: built.brace, certificate: built.certificate, actions: built.actions })
}

/// `{"verdict": "possible"}` or `{"verdict": "impossible", "reason": ...}`.
#[pyfunction]
fn order_filter(py: Python<'_>, n: u64) -> PyResult<Bound<'_, PyAny>> {
    to_py(py, &filter_order(n).map_err(err)?)
}

#[pymodule]
#[pyo3(name = "bracekit")]
fn bracekit_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FORMAT", bracekit::FORMAT)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("BraceError", m.py().get_type::<BraceError>())?;
    m.add_class::<PyTableBrace>()?;
    m.add_class::<PyBrace>()?;
    m.add_class::<PySolution>()?;
    m.add_function(wrap_pyfunction!(cycle_brace, m)?)?;
    m.add_function(wrap_pyfunction!(order_filter, m)?)?;
    Ok(())
}
