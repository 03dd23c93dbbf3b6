//! Python bindings: clusters, walk statistics, the lamplighter identity,
//! Følner values, the Nash curve and the recipe runner.

use perc_range::bounds::{nash_ode_solve, NashProfile};
use perc_range::harness::{run_with_workers, ExperimentSpec};
use perc_range::isoperimetry::{folner_function, isoperimetric_beta, FolnerValue, IsoGraph};
use perc_range::percolation::{BondConfiguration, ClusterGraph, LatticeSpec};
use perc_range::walk::{self, DEFAULT_BUDGET};
use perc_range::wreath::verify_identity;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn from_json<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

/// A finite graph with a distinguished origin, usually the open cluster of
/// the origin in a lattice box.
#[pyclass(name = "Cluster", module = "perc_range_py", frozen)]
struct PyCluster {
    inner: ClusterGraph,
}

#[pymethods]
impl PyCluster {
    /// Open cluster of the origin in `[-n, n]^d` with edges open w.p. `p`.
    #[staticmethod]
    fn sample(d: usize, n: usize, p: f64, seed: u64) -> PyResult<Self> {
        let spec = LatticeSpec::new(d, n).map_err(err)?;
        let config = if p == 0.0 {
            BondConfiguration::closed(spec)
        } else {
            BondConfiguration::sample(spec, p, seed).map_err(err)?
        };
        Ok(Self { inner: ClusterGraph::component_of_origin(&config) })
    }

    #[staticmethod]
    fn full(d: usize, n: usize) -> PyResult<Self> {
        let spec = LatticeSpec::new(d, n).map_err(err)?;
        Ok(Self { inner: ClusterGraph::component_of_origin(&BondConfiguration::full(spec)) })
    }

    #[staticmethod]
    fn path(k: usize) -> Self {
        Self { inner: ClusterGraph::path(k) }
    }

    #[staticmethod]
    fn from_edges(vertex_count: usize, edges: Vec<(usize, usize)>, origin: usize) -> PyResult<Self> {
        Ok(Self { inner: ClusterGraph::from_edges(vertex_count, &edges, origin).map_err(err)? })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Cluster(vertices={}, edges={})", self.inner.len(), self.inner.edge_count())
    }

    #[getter]
    fn origin(&self) -> Option<usize> {
        self.inner.origin()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges()
    }

    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees().to_vec()
    }

    fn point(&self, v: usize) -> Option<Vec<i32>> {
        self.inner.point(v)
    }

    fn chemical_distances(&self) -> PyResult<Vec<Option<usize>>> {
        self.inner.chemical_distances().map_err(err)
    }
}

/// `E[α^{N_n}]`, or `E[α^{N_n} 1{X_n = 0}]` when `pinned`, exactly.
#[pyfunction]
#[pyo3(signature = (cluster, alpha, n, pinned = false))]
fn exact_laplace(cluster: &PyCluster, alpha: f64, n: usize, pinned: bool) -> PyResult<f64> {
    walk::exact_laplace(&cluster.inner, alpha, n, pinned, DEFAULT_BUDGET).map_err(err)
}

/// Monte Carlo `E[α^{N_n}]` as `(n, value, stderr)` rows.
#[pyfunction]
fn mc_laplace(cluster: &PyCluster, alpha: f64, n_list: Vec<usize>, samples: usize, seed: u64) -> PyResult<Vec<(usize, f64, f64)>> {
    let series = walk::mc_laplace(&cluster.inner, alpha, &n_list, samples, seed).map_err(err)?;
    Ok(series.entries.iter().map(|e| (e.n, e.value, e.stderr)).collect())
}

#[pyfunction]
fn simulate_walk(cluster: &PyCluster, n: usize, seed: u64) -> PyResult<Vec<usize>> {
    Ok(walk::simulate_walk(&cluster.inner, n, seed).map_err(err)?.steps)
}

/// Spectral report of the walk killed outside the chemical ball of radius `r`.
#[pyfunction]
#[pyo3(signature = (cluster, r, n_list = Vec::new()))]
fn killed_operator_report<'py>(py: Python<'py>, cluster: &PyCluster, r: usize, n_list: Vec<usize>) -> PyResult<Bound<'py, PyAny>> {
    let rep = walk::killed_operator_report(&cluster.inner, r, &n_list).map_err(err)?;
    from_json(py, &rep.to_json())
}

/// Both sides of the lamplighter return identity at time `2n`.
#[pyfunction]
fn lamplighter_identity(cluster: &PyCluster, alpha: f64, n: usize) -> PyResult<(f64, f64, f64)> {
    let c = verify_identity(&cluster.inner, alpha, n).map_err(err)?;
    Ok((c.lhs, c.rhs, c.gap))
}

/// Internal Følner value: `(kind, size)` with kind `exact`, `at_least` or
/// `unbounded`.
#[pyfunction]
#[pyo3(signature = (cluster, k, cap, connected_only = true))]
fn folner(cluster: &PyCluster, k: f64, cap: usize, connected_only: bool) -> PyResult<(&'static str, Option<usize>)> {
    let entry = folner_function(&IsoGraph::internal(&cluster.inner), k, cap, connected_only).map_err(err)?;
    Ok(match entry.value {
        FolnerValue::Exact(v) => ("exact", Some(v)),
        FolnerValue::AtLeast(v) => ("at_least", Some(v)),
        FolnerValue::Unbounded => ("unbounded", None),
    })
}

/// Isoperimetric constant of `host` with boundary counted in `supergraph`.
#[pyfunction]
fn isoperimetric_beta_relative<'py>(
    py: Python<'py>,
    host: &PyCluster,
    supergraph: &PyCluster,
    c: f64,
    gamma: f64,
    n: usize,
    cap: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let g = IsoGraph::relative(&host.inner, &supergraph.inner).map_err(err)?;
    let rep = isoperimetric_beta(&g, c, gamma, n, host.inner.dim(), cap).map_err(err)?;
    from_json(py, &rep.to_json())
}

/// Nash curve `(t, log a(t))` on the grid `0, step, …, t_max`.
#[pyfunction]
#[pyo3(signature = (d, n, t_max, step, rtol = 1e-8))]
fn nash_curve(d: usize, n: usize, t_max: f64, step: f64, rtol: f64) -> PyResult<Vec<(f64, f64)>> {
    let sol = nash_ode_solve(&NashProfile::new(d, n), t_max, step, rtol).map_err(err)?;
    Ok(sol.samples.iter().map(|&(t, u)| (t, -u)).collect())
}

#[pyfunction]
fn seed_manifest(master: u64, chain_count: usize) -> Vec<u64> {
    perc_range::rng::seed_manifest(master, chain_count)
}

/// Runs a recipe from TOML text; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (recipe, config = "", workers = None))]
fn run_recipe<'py>(py: Python<'py>, recipe: &str, config: &str, workers: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let spec = ExperimentSpec::from_toml(config).map_err(err)?;
    let out = py.detach(|| run_with_workers(recipe, &spec, workers)).map_err(err)?;
    from_json(py, &out.report.to_json())
}

#[pymodule]
fn perc_range_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCluster>()?;
    m.add_function(wrap_pyfunction!(exact_laplace, m)?)?;
    m.add_function(wrap_pyfunction!(mc_laplace, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_walk, m)?)?;
    m.add_function(wrap_pyfunction!(killed_operator_report, m)?)?;
    m.add_function(wrap_pyfunction!(lamplighter_identity, m)?)?;
    m.add_function(wrap_pyfunction!(folner, m)?)?;
    m.add_function(wrap_pyfunction!(isoperimetric_beta_relative, m)?)?;
    m.add_function(wrap_pyfunction!(nash_curve, m)?)?;
    m.add_function(wrap_pyfunction!(seed_manifest, m)?)?;
    m.add_function(wrap_pyfunction!(run_recipe, m)?)?;
    Ok(())
}
