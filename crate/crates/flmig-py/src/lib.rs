//! Python bindings: graph construction, the FLMIG engine and baselines,
//! quality metrics, and benchmark generation/loading.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use flmig::engine::RunConfig;
use flmig::error::Error;
use flmig::harness::{default_stall_limit, run_algorithm, Algorithm};
use flmig::partition::Partition;
use flmig::quality::{LabeledPartition, Resolution};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Io(inner) => PyIOError::new_err(inner.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Immutable undirected weighted graph.
#[pyclass(frozen, name = "Graph")]
struct PyGraph {
    inner: flmig::Graph,
    labels: flmig::NodeLabelMap,
}

#[pymethods]
impl PyGraph {
    /// Parse an edge-list file ("u v" or "u v w" lines, '#'/'%' comments).
    #[staticmethod]
    #[pyo3(signature = (path, weighted = false, allow_self_loops = false))]
    fn from_edge_list(path: &str, weighted: bool, allow_self_loops: bool) -> PyResult<Self> {
        let file = std::fs::File::open(path).map_err(|e| PyIOError::new_err(e.to_string()))?;
        let (inner, labels) = flmig::parse_edge_list(
            std::io::BufReader::new(file),
            flmig::ParseOptions {
                weighted,
                allow_self_loops,
            },
        )
        .map_err(to_py_err)?;
        Ok(PyGraph { inner, labels })
    }

    /// Build from (u, v, weight) triples over nodes 0..node_count.
    #[staticmethod]
    fn from_edges(node_count: usize, edges: Vec<(u32, u32, f64)>) -> PyResult<Self> {
        let inner = flmig::Graph::from_weighted_edges(node_count, edges).map_err(to_py_err)?;
        let labels = flmig::NodeLabelMap::numeric(node_count);
        Ok(PyGraph { inner, labels })
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    /// Twice the total edge weight.
    #[getter]
    fn total_weight_2m(&self) -> f64 {
        self.inner.total_weight_2m()
    }

    fn degree(&self, node: u32) -> PyResult<f64> {
        if (node as usize) >= self.inner.node_count() {
            return Err(PyValueError::new_err(format!("node {node} out of range")));
        }
        Ok(self.inner.degree(node))
    }

    /// External node labels indexed by internal id.
    fn labels(&self) -> Vec<String> {
        (0..self.inner.node_count() as u32)
            .map(|v| self.labels.label(v).to_string())
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(node_count={}, edge_count={})",
            self.inner.node_count(),
            self.inner.edge_count()
        )
    }
}

/// Result of a detection run.
#[pyclass(frozen, name = "Detection")]
struct PyDetection {
    #[pyo3(get)]
    membership: Vec<u32>,
    #[pyo3(get)]
    q: f64,
    #[pyo3(get)]
    iterations: u64,
    #[pyo3(get)]
    communities: usize,
}

#[pymethods]
impl PyDetection {
    fn __repr__(&self) -> String {
        format!(
            "Detection(q={:.6}, communities={}, iterations={})",
            self.q, self.communities, self.iterations
        )
    }
}

/// Run a community-detection algorithm; `algorithm` is one of "flmig",
/// "louvain", "louvain-prune", "lpa". Identical arguments give identical
/// results.
#[pyfunction]
#[pyo3(signature = (graph, algorithm = "flmig", beta = 0.5, epsilon = 0.01, rho = 1.0, stall = None, max_iterations = None, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn detect(
    graph: &PyGraph,
    algorithm: &str,
    beta: f64,
    epsilon: f64,
    rho: f64,
    stall: Option<u32>,
    max_iterations: Option<u64>,
    seed: u64,
) -> PyResult<PyDetection> {
    let algorithm: Algorithm = algorithm.parse().map_err(to_py_err)?;
    let cfg = RunConfig {
        beta,
        epsilon,
        rho: Resolution::new(rho).map_err(to_py_err)?,
        stall_limit: stall.unwrap_or_else(|| default_stall_limit(graph.inner.node_count())),
        max_iterations,
        seed,
        ..RunConfig::default()
    };
    cfg.validate().map_err(to_py_err)?;
    let result = run_algorithm(algorithm, &graph.inner, &cfg).map_err(to_py_err)?;
    Ok(PyDetection {
        membership: result.best_partition.dense_membership(),
        q: result.best_q,
        iterations: result.iterations,
        communities: result.best_partition.community_count(),
    })
}

/// Modularity of a membership vector (community id per node).
#[pyfunction]
#[pyo3(signature = (graph, membership, rho = 1.0))]
fn modularity(graph: &PyGraph, membership: Vec<u32>, rho: f64) -> PyResult<f64> {
    let partition = Partition::from_membership(&graph.inner, &membership).map_err(to_py_err)?;
    flmig::modularity(&graph.inner, &partition, Resolution::new(rho).map_err(to_py_err)?)
        .map_err(to_py_err)
}

/// Normalized mutual information between two membership vectors.
#[pyfunction]
fn nmi(a: Vec<u32>, b: Vec<u32>) -> PyResult<f64> {
    let a = LabeledPartition::new(a).map_err(to_py_err)?;
    let b = LabeledPartition::new(b).map_err(to_py_err)?;
    flmig::nmi(&a, &b).map_err(to_py_err)
}

/// Generate a Girvan-Newman planted-partition instance; returns the graph
/// and the ground-truth membership.
#[pyfunction]
#[pyo3(signature = (mixing, seed = 0, communities = 4, community_size = 32, degree = 16.0))]
fn generate_gn(
    mixing: f64,
    seed: u64,
    communities: usize,
    community_size: usize,
    degree: f64,
) -> PyResult<(PyGraph, Vec<u32>)> {
    let spec = flmig::synth::GnSpec {
        node_count: communities * community_size,
        communities,
        community_size,
        expected_degree: degree,
        mixing,
    };
    let (graph, truth) = flmig::synth::generate_gn_seeded(&spec, seed).map_err(to_py_err)?;
    let labels = flmig::NodeLabelMap::numeric(graph.node_count());
    Ok((
        PyGraph { inner: graph, labels },
        truth.labels().to_vec(),
    ))
}

/// Load an LFR benchmark network/community file pair; returns the graph and
/// the ground-truth membership.
#[pyfunction]
fn load_lfr(network_path: &str, community_path: &str) -> PyResult<(PyGraph, Vec<u32>)> {
    let network = std::fs::File::open(network_path).map_err(|e| PyIOError::new_err(e.to_string()))?;
    let community = std::fs::File::open(community_path).map_err(|e| PyIOError::new_err(e.to_string()))?;
    let (graph, labels, truth) = flmig::lfr::load_lfr(
        std::io::BufReader::new(network),
        std::io::BufReader::new(community),
    )
    .map_err(to_py_err)?;
    Ok((PyGraph { inner: graph, labels }, truth.labels().to_vec()))
}

#[pymodule]
fn flmig_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyDetection>()?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(modularity, m)?)?;
    m.add_function(wrap_pyfunction!(nmi, m)?)?;
    m.add_function(wrap_pyfunction!(generate_gn, m)?)?;
    m.add_function(wrap_pyfunction!(load_lfr, m)?)?;
    Ok(())
}
