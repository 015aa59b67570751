//! Python bindings. Structured results cross the boundary as JSON-derived
//! dicts and lists.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;
use tuz_core::coder::{self, recursive_coding, CoderError, CodingState};
use tuz_core::gf::{FieldConfig, FieldMatrix};
use tuz_core::io::{parse_network, CodeReport, NetworkDoc};
use tuz_core::netgraph::{EdgeSet, RandomDagParams};
use tuz_core::reduction::{self, ReductionSequence};
use tuz_core::rng::SplitRng;

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn coder_err(e: CoderError) -> PyErr {
    match e {
        CoderError::RetryExhausted { .. } => PyRuntimeError::new_err(e.to_string()),
        other => value_err(other),
    }
}

fn field(p: u64) -> PyResult<FieldConfig> {
    FieldConfig::new(p).map_err(value_err)
}

fn matrix(p: u64, rows: Vec<Vec<u64>>, cols: usize) -> PyResult<FieldMatrix> {
    let f = field(p)?;
    if rows.is_empty() {
        return Ok(FieldMatrix::zeros(f, 0, cols));
    }
    let reduced: Vec<Vec<u64>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(|x| x % p).collect())
        .collect();
    FieldMatrix::from_rows(f, &reduced).map_err(value_err)
}

/// A two-unicast-Z network.
#[pyclass(name = "Network", module = "tuz", frozen)]
struct PyNetwork {
    inner: tuz_core::netgraph::Network,
}

#[pymethods]
impl PyNetwork {
    #[staticmethod]
    #[pyo3(signature = (text, strict = false))]
    fn from_json(text: &str, strict: bool) -> PyResult<Self> {
        let parsed = parse_network(text, strict).map_err(value_err)?;
        Ok(Self { inner: parsed.network })
    }

    #[staticmethod]
    fn fig5() -> Self {
        Self {
            inner: tuz_core::netgraph::Network::fig5(),
        }
    }

    #[staticmethod]
    #[pyo3(signature = (vertices, seed, max_in_degree = 3))]
    fn random(vertices: usize, seed: u64, max_in_degree: usize) -> PyResult<Self> {
        let params = RandomDagParams {
            n_vertices: vertices,
            max_in_degree,
            seed,
            ..RandomDagParams::default()
        };
        let inner = tuz_core::netgraph::Network::random_dag(&params).map_err(value_err)?;
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&NetworkDoc::from_network(&self.inner)).expect("document serializes")
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    /// Edge ids in topological order.
    fn edge_names(&self) -> Vec<String> {
        self.inner.edges().iter().map(|e| e.name.clone()).collect()
    }

    fn min_cut(&self, source: &str, dests: Vec<String>) -> PyResult<usize> {
        let net = &self.inner;
        let s = net
            .vertex_id(source)
            .ok_or_else(|| value_err(format!("unknown vertex {source:?}")))?;
        let mut set = EdgeSet::new();
        for d in &dests {
            set.insert(net.edge_id(d).ok_or_else(|| value_err(format!("unknown edge {d:?}")))?);
        }
        Ok(net.min_cut(s, &set))
    }

    fn gns(&self) -> PyResult<usize> {
        self.inner.gns_bound().map_err(value_err)
    }

    fn cut_report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.cut_report())
    }

    fn __repr__(&self) -> String {
        format!(
            "Network(vertices={}, edges={})",
            self.inner.vertex_count(),
            self.inner.edge_count()
        )
    }
}

/// Stages of destination reduction.
#[pyclass(name = "ReductionSequence", module = "tuz", frozen)]
struct PyReduction {
    inner: ReductionSequence,
}

#[pymethods]
impl PyReduction {
    fn stages<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.trace())
    }

    fn __len__(&self) -> usize {
        self.inner.stages().len()
    }
}

/// A coded network.
#[pyclass(name = "Code", module = "tuz", frozen)]
struct PyCode {
    seq: ReductionSequence,
    state: CodingState,
    seed: u64,
}

#[pymethods]
impl PyCode {
    fn rates<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.state.rate_report().map_err(coder_err)?)
    }

    #[pyo3(signature = (trace = false))]
    fn report<'py>(&self, py: Python<'py>, trace: bool) -> PyResult<Bound<'py, PyAny>> {
        let rates = self.state.rate_report().map_err(coder_err)?;
        let rep = CodeReport::new(
            &self.seq,
            &self.state,
            &rates,
            self.seed,
            env!("CARGO_PKG_VERSION"),
            trace,
        );
        to_py(py, &rep)
    }

    /// Transfer blocks `H1, H2, G1, G2` as lists of rows.
    fn transfer<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let t = self.state.final_triple().map_err(coder_err)?;
        let blocks = [t.h1.to_rows(), t.h2.to_rows(), t.g1.to_rows(), t.g2.to_rows()];
        to_py(py, &blocks)
    }

    fn local_coding(&self) -> Vec<Vec<u64>> {
        self.state.f().to_rows()
    }
}

#[pyfunction]
fn reduce(net: &PyNetwork) -> PyResult<PyReduction> {
    let inner = reduction::reduce(&net.inner).map_err(value_err)?;
    Ok(PyReduction { inner })
}

#[pyfunction]
#[pyo3(signature = (net, seed = 0, field_prime = 65521, retries = 16))]
fn code(net: &PyNetwork, seed: u64, field_prime: u64, retries: usize) -> PyResult<PyCode> {
    let seq = reduction::reduce(&net.inner).map_err(value_err)?;
    let state = recursive_coding(&seq, field(field_prime)?, &mut SplitRng::new(seed), retries).map_err(coder_err)?;
    Ok(PyCode { seq, state, seed })
}

/// Grank of three matrices given as lists of rows.
#[pyfunction]
#[pyo3(signature = (h1, h2, g2, p = 65521, q1 = None, q2 = None))]
fn grank(
    h1: Vec<Vec<u64>>,
    h2: Vec<Vec<u64>>,
    g2: Vec<Vec<u64>>,
    p: u64,
    q1: Option<usize>,
    q2: Option<usize>,
) -> PyResult<usize> {
    let q1 = q1.unwrap_or_else(|| h1.first().or(h2.first()).map_or(0, Vec::len));
    let q2 = q2.unwrap_or_else(|| g2.first().map_or(0, Vec::len));
    let (h1, h2, g2) = (matrix(p, h1, q1)?, matrix(p, h2, q1)?, matrix(p, g2, q2)?);
    coder::grank(&h1, &h2, &g2).map_err(coder_err)
}

#[pyfunction]
#[pyo3(signature = (rows, p = 65521))]
fn rank(rows: Vec<Vec<u64>>, p: u64) -> PyResult<usize> {
    Ok(matrix(p, rows, 0)?.rank())
}

#[pymodule]
fn tuz(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetwork>()?;
    m.add_class::<PyReduction>()?;
    m.add_class::<PyCode>()?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(code, m)?)?;
    m.add_function(wrap_pyfunction!(grank, m)?)?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
