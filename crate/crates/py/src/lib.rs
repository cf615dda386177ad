//! Python bindings: graphs, constraints, the solvers, topology generation and
//! the two embedding experiments.

use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use nmpath_core::harness::{self, ExperimentConfig, SteeringOptions};
use nmpath_core::topofile::{parse_topology, write_topology};
use nmpath_core::topogen::{self, DelayModel, GenSpec, TopologyModel};
use nmpath_core::{
    format_result_line, Backend, ConstraintSet, EdgeSpec, GraphView, LinkBound, NodeId, PathBound, PathBoundMode,
    PathResult, PhysicalGraph, SolveResult,
};

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Graph", module = "nmpath", frozen)]
struct PyGraph {
    inner: Arc<PhysicalGraph>,
}

#[pymethods]
impl PyGraph {
    /// `edges` holds `(src, dst, link_metrics, path_metrics)` tuples.
    #[new]
    #[pyo3(signature = (node_count, edges, link_arity = 1, path_arity = 1, capacities = None))]
    fn new(
        node_count: usize,
        edges: Vec<(usize, usize, Vec<f64>, Vec<f64>)>,
        link_arity: usize,
        path_arity: usize,
        capacities: Option<Vec<f64>>,
    ) -> PyResult<Self> {
        let specs = edges.into_iter().map(|(s, d, l, p)| EdgeSpec::new(s, d, l, p)).collect();
        let g = PhysicalGraph::build(node_count, link_arity, path_arity, specs, capacities.unwrap_or_default())
            .map_err(value_err)?;
        Ok(Self { inner: Arc::new(g) })
    }

    /// Parses the text topology format.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        let g = parse_topology(text).map_err(value_err)?;
        Ok(Self { inner: Arc::new(g) })
    }

    fn to_text(&self) -> String {
        write_topology(&self.inner)
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn avg_out_degree(&self) -> f64 {
        self.inner.avg_out_degree()
    }

    fn label(&self, node: usize) -> Option<String> {
        (node < self.inner.node_count()).then(|| self.inner.display_name(NodeId(node)))
    }

    /// `(src, dst, link_metrics, path_metrics)` for every edge, in id order.
    fn edges(&self) -> Vec<(usize, usize, Vec<f64>, Vec<f64>)> {
        self.inner
            .edge_specs()
            .into_iter()
            .map(|e| (e.src.0, e.dst.0, e.metrics.link, e.metrics.path))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("Graph(nodes={}, edges={})", self.inner.node_count(), self.inner.edge_count())
    }
}

#[pyclass(name = "Constraints", module = "nmpath", frozen)]
struct PyConstraints {
    inner: ConstraintSet,
}

#[pymethods]
impl PyConstraints {
    /// `links`: `(metric, min)` pairs; `paths`: `(metric, max)` pairs.
    #[new]
    #[pyo3(signature = (links = vec![], paths = vec![], inclusive = false))]
    fn new(links: Vec<(usize, f64)>, paths: Vec<(usize, f64)>, inclusive: bool) -> PyResult<Self> {
        let c = ConstraintSet::new(
            links.into_iter().map(|(metric, min)| LinkBound { metric, min }).collect(),
            paths.into_iter().map(|(metric, max)| PathBound { metric, max }).collect(),
        )
        .map_err(value_err)?;
        let mode = if inclusive { PathBoundMode::Inclusive } else { PathBoundMode::Strict };
        Ok(Self { inner: c.with_mode(mode) })
    }

    /// One literal per line: `link 0 >= 5`, `path 0 < 10`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: ConstraintSet::parse_literals(text).map_err(value_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (bandwidth = None, delay = None))]
    fn bw_delay(bandwidth: Option<f64>, delay: Option<f64>) -> Self {
        Self {
            inner: ConstraintSet::bw_delay(bandwidth, delay),
        }
    }

    /// Bounds for a severity level pair on `graph` (`low | med | high`).
    #[staticmethod]
    fn from_severity(graph: &PyGraph, bw_level: &str, delay_level: &str) -> PyResult<Self> {
        let bw = bw_level.parse().map_err(PyValueError::new_err)?;
        let delay = delay_level.parse().map_err(PyValueError::new_err)?;
        Ok(Self {
            inner: topogen::resolve_constraint_severity(&graph.inner, bw, delay),
        })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Constraints({:?})", self.inner.to_string().trim_end())
    }
}

#[pyclass(name = "PathResult", module = "nmpath", frozen, get_all)]
struct PyPath {
    nodes: Vec<usize>,
    edges: Vec<usize>,
    sums: Vec<f64>,
    mins: Vec<f64>,
}

impl From<&PathResult> for PyPath {
    fn from(p: &PathResult) -> Self {
        Self {
            nodes: p.nodes.iter().map(|n| n.0).collect(),
            edges: p.edges.iter().map(|e| e.0).collect(),
            sums: p.accumulated.sums.clone(),
            mins: p.min_link_metrics.clone(),
        }
    }
}

#[pymethods]
impl PyPath {
    #[getter]
    fn hops(&self) -> usize {
        self.edges.len()
    }

    fn __repr__(&self) -> String {
        format!("PathResult(nodes={:?})", self.nodes)
    }
}

/// Outcome of one query: `status` is `ok`, `unreachable`, `infeasible`,
/// `negcycle`, `limit` or `error`; `path` is set only when `ok`.
#[pyclass(name = "SolveOutcome", module = "nmpath", frozen, get_all)]
struct PyOutcome {
    status: String,
    path: Option<Py<PyPath>>,
    message: Option<String>,
    line: String,
}

#[pymethods]
impl PyOutcome {
    #[getter]
    fn ok(&self) -> bool {
        self.path.is_some()
    }

    fn __repr__(&self) -> String {
        format!("SolveOutcome({})", self.line)
    }
}

fn outcome(py: Python<'_>, g: &PhysicalGraph, r: &SolveResult) -> PyResult<PyOutcome> {
    let line = format_result_line(r, 0, |n| g.display_name(n));
    Ok(match r {
        Ok(p) => PyOutcome {
            status: "ok".into(),
            path: Some(Py::new(py, PyPath::from(p))?),
            message: None,
            line,
        },
        Err(e) => PyOutcome {
            status: e.status().into(),
            path: None,
            message: Some(e.to_string()),
            line,
        },
    })
}

fn parse_backend(name: &str) -> PyResult<Backend> {
    name.parse().map_err(value_err)
}

/// Solves one query with the named backend (`nm-general`, `nm-l1`,
/// `edijkstra`, `ksp:<k>[:<ranking>]`, `exhaustive`).
#[pyfunction]
#[pyo3(signature = (graph, src, dst, constraints, backend = "nm-general"))]
fn solve(
    py: Python<'_>,
    graph: &PyGraph,
    src: usize,
    dst: usize,
    constraints: &PyConstraints,
    backend: &str,
) -> PyResult<PyOutcome> {
    let b = parse_backend(backend)?;
    let g = graph.inner.clone();
    let c = constraints.inner.clone();
    let r = py.detach(move || b.solve(&*g, NodeId(src), NodeId(dst), &c));
    outcome(py, &graph.inner, &r)
}

#[pyfunction]
fn energy_efficiency(total_nodes: usize, used_nodes: usize, bw_total: f64) -> PyResult<f64> {
    harness::energy_efficiency(total_nodes, used_nodes, bw_total).map_err(value_err)
}

/// Seeded synthetic topology (`waxman` or `ba`).
#[pyfunction]
#[pyo3(signature = (model = "waxman", nodes = 100, degree = Some(4.0), seed = 1, alpha = 0.15, beta = 0.2, m = 2, bw_min = 1.0, bw_max = 9.0, max_delay = 10.0, cpu = 200.0))]
#[allow(clippy::too_many_arguments)]
fn generate(
    model: &str,
    nodes: usize,
    degree: Option<f64>,
    seed: u64,
    alpha: f64,
    beta: f64,
    m: usize,
    bw_min: f64,
    bw_max: f64,
    max_delay: f64,
    cpu: f64,
) -> PyResult<PyGraph> {
    let model = match model {
        "waxman" => TopologyModel::Waxman { alpha, beta },
        "ba" => TopologyModel::BarabasiAlbert { m },
        other => return Err(PyValueError::new_err(format!("unknown model `{other}`"))),
    };
    let spec = GenSpec {
        model,
        node_count: nodes,
        target_avg_degree: degree,
        bw_range: (bw_min, bw_max),
        delay_model: DelayModel::EuclideanScaled { max_delay },
        cpu_units: cpu,
        seed,
    };
    let g = topogen::generate(&spec).map_err(value_err)?;
    Ok(PyGraph { inner: Arc::new(g) })
}

/// Traffic steering; returns a dict of the report fields.
#[pyfunction]
#[pyo3(signature = (graph, pairs, constraints, backend = "nm-l1", seed = 1, record_timing = false))]
fn run_steering<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    pairs: usize,
    constraints: &PyConstraints,
    backend: &str,
    seed: u64,
    record_timing: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let b = parse_backend(backend)?;
    let g = graph.inner.clone();
    let c = constraints.inner.clone();
    let r = py
        .detach(move || harness::run_steering(g, pairs, &c, &b, seed, SteeringOptions { record_timing }))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let d = PyDict::new(py);
    d.set_item("total_throughput", r.total_throughput)?;
    d.set_item("energy_efficiency", r.energy_efficiency)?;
    d.set_item("avg_path_length", r.avg_path_length)?;
    d.set_item("avg_time_per_vl", r.avg_time_per_vl)?;
    d.set_item("n_used", r.n_used)?;
    d.set_item("n_total", r.n_total)?;
    d.set_item("vl_count", r.vl_count)?;
    Ok(d)
}

/// VNE over `requests` generated requests of `vn_nodes` virtual nodes each;
/// returns a dict of the report fields.
#[pyfunction]
#[pyo3(signature = (graph, requests = 15, vn_nodes = 14, max_demand = 20.0, backend = "nm-general", seed = 1))]
fn run_vne<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    requests: usize,
    vn_nodes: usize,
    max_demand: f64,
    backend: &str,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let b = parse_backend(backend)?;
    let g = graph.inner.clone();
    let r = py
        .detach(move || {
            let reqs = harness::generate_vn_requests(requests, vn_nodes, max_demand, seed);
            harness::run_vne(g, &reqs, &b, false)
        })
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let d = PyDict::new(py);
    d.set_item("vn_allocation_ratio", r.vn_allocation_ratio)?;
    d.set_item("link_allocation_ratio", r.link_allocation_ratio)?;
    d.set_item("link_utilization", r.link_utilization)?;
    d.set_item("avg_path_length", r.avg_path_length)?;
    let accepted = r
        .per_request_outcomes
        .iter()
        .map(|o| matches!(o, harness::RequestOutcome::Accepted { .. }))
        .collect::<Vec<_>>();
    d.set_item("accepted", accepted)?;
    Ok(d)
}

/// Runs an experiment config (text) and returns the CSV.
#[pyfunction]
fn run_config(py: Python<'_>, text: &str) -> PyResult<String> {
    let cfg = ExperimentConfig::parse(text).map_err(value_err)?;
    py.detach(move || cfg.run())
        .map(|o| o.to_csv())
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn nmpath(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyConstraints>()?;
    m.add_class::<PyPath>()?;
    m.add_class::<PyOutcome>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(energy_efficiency, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(run_steering, m)?)?;
    m.add_function(wrap_pyfunction!(run_vne, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
