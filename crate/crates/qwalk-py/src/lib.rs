//! Python bindings: graphs, transfer amplitudes, routing, chains, corona
//! scans, qudit families and coupler estimates.

use std::fmt::Display;

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qwalk::chain;
use qwalk::corona;
use qwalk::graph::{self, MarkingScheme, MatrixKind};
use qwalk::qudit::{CommutingFamily, QuditState};
use qwalk::routing::{HopKind, RoutingNetwork, SwitchLag};
use qwalk::spectral::{self, Spectrum};
use qwalk::transmon::{self, CouplerConfig};

fn value_err(e: impl Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix_kind(name: &str) -> PyResult<MatrixKind> {
    match name {
        "adj" | "adjacency" => Ok(MatrixKind::Adjacency),
        "lap" | "laplacian" => Ok(MatrixKind::Laplacian),
        "signless" => Ok(MatrixKind::SignlessLaplacian),
        _ => Err(value_err(format!("unknown matrix kind {name:?}"))),
    }
}

fn marking_scheme(name: &str) -> PyResult<MarkingScheme> {
    match name {
        "canonical" => Ok(MarkingScheme::Canonical),
        "plurality" => Ok(MarkingScheme::Plurality),
        "explicit" => Ok(MarkingScheme::Explicit),
        _ => Err(value_err(format!("unknown marking scheme {name:?}"))),
    }
}

#[pyclass(name = "Graph", module = "qwalk_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyGraph {
    inner: graph::Graph,
}

#[pymethods]
impl PyGraph {
    /// Parses the line format (`graph n`, `edge u v w +|-`, ...).
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner = graph::parse_graph(text).map_err(value_err)?;
        Ok(PyGraph { inner })
    }

    /// `k<n>`, `p<n>`, `c<n>`, `q<k>` or a file path.
    #[staticmethod]
    fn named(spec: &str) -> PyResult<Self> {
        let inner = qwalk::io::resolve_graph(spec).map_err(value_err)?;
        Ok(PyGraph { inner })
    }

    #[staticmethod]
    fn example(name: &str) -> PyResult<Self> {
        match corona::example_graph(name).map_err(value_err)? {
            Some(ex) => Ok(PyGraph { inner: ex.graph }),
            None => Err(value_err(format!("no example {name:?}"))),
        }
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn is_balanced(&self) -> bool {
        graph::balance(&self.inner).balanced
    }

    #[pyo3(signature = (kind = "adj"))]
    fn matrix(&self, kind: &str) -> PyResult<Vec<Vec<f64>>> {
        let m = self.inner.matrix(matrix_kind(kind)?);
        Ok(m.row_iter().map(|r| r.iter().copied().collect()).collect())
    }

    #[pyo3(signature = (kind = "adj"))]
    fn eigenvalues(&self, kind: &str) -> PyResult<Vec<f64>> {
        Ok(Spectrum::of_graph(&self.inner, matrix_kind(kind)?)
            .values()
            .to_vec())
    }

    /// ⟨to|e^{−iHt}|from⟩
    #[pyo3(signature = (source, target, t, kind = "adj"))]
    fn amplitude(&self, source: usize, target: usize, t: f64, kind: &str) -> PyResult<Complex64> {
        Spectrum::of_graph(&self.inner, matrix_kind(kind)?)
            .amplitude(source, target, t)
            .map_err(value_err)
    }

    /// Transfer conditions and, when they hold, the transfer time.
    #[pyo3(signature = (source, target, kind = "adj"))]
    fn pst<'py>(
        &self,
        py: Python<'py>,
        source: usize,
        target: usize,
        kind: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let s = Spectrum::of_graph(&self.inner, matrix_kind(kind)?);
        let c = spectral::check_pst_conditions(&s, source, target).map_err(value_err)?;
        let d = PyDict::new(py);
        d.set_item("vector_condition", c.vector_condition)?;
        d.set_item("rationality", c.rationality)?;
        d.set_item("pst", c.eigenvalue_condition)?;
        d.set_item("time", c.candidate_time.filter(|_| c.eigenvalue_condition))?;
        Ok(d)
    }

    /// `self ∘ other` under the given marking scheme.
    #[pyo3(signature = (other, marking = "canonical"))]
    fn corona(&self, other: &PyGraph, marking: &str) -> PyResult<PyGraph> {
        let inner = graph::corona(&self.inner, &other.inner, marking_scheme(marking)?)
            .map_err(value_err)?;
        Ok(PyGraph { inner })
    }

    fn to_text(&self) -> String {
        graph::write_graph(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(vertices={}, edges={})",
            self.inner.vertex_count(),
            self.inner.edge_count()
        )
    }
}

#[pyclass(name = "RoutingNetwork", module = "qwalk_py", frozen)]
pub struct PyRoutingNetwork {
    inner: RoutingNetwork,
}

#[pymethods]
impl PyRoutingNetwork {
    #[new]
    fn new(n: usize) -> PyResult<Self> {
        let inner = RoutingNetwork::build(n).map_err(value_err)?;
        Ok(PyRoutingNetwork { inner })
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    fn label(&self, v: usize) -> PyResult<String> {
        self.inner
            .label(v)
            .map(|l| l.to_string())
            .map_err(value_err)
    }

    /// Plans and runs the route between two bit-string labels.
    #[pyo3(signature = (source, target, idle = 0.0))]
    fn route<'py>(
        &self,
        py: Python<'py>,
        source: &str,
        target: &str,
        idle: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let vertex = |s: &str| -> PyResult<usize> {
            let label = s.parse().map_err(value_err)?;
            self.inner.vertex(&label).map_err(value_err)
        };
        let (u, w) = (vertex(source)?, vertex(target)?);
        let plan = self.inner.plan_route(u, w).map_err(value_err)?;
        let lag = if idle > 0.0 {
            SwitchLag::Idle(idle)
        } else {
            SwitchLag::Instant
        };
        let out = self
            .inner
            .execute_route(&plan, &spectral::basis_state(self.inner.size(), u), lag)
            .map_err(value_err)?;
        let hops: Vec<(String, String, &str)> = plan
            .hops
            .iter()
            .map(|h| {
                let kind = match h.kind {
                    HopKind::Bridge => "bridge",
                    HopKind::Cube => "cube",
                };
                Ok((self.label(h.from)?, self.label(h.to)?, kind))
            })
            .collect::<PyResult<_>>()?;
        let d = PyDict::new(py);
        d.set_item("hops", hops)?;
        d.set_item("time", out.report.time)?;
        d.set_item("magnitude", out.report.magnitude)?;
        d.set_item("phase", out.report.phase)?;
        d.set_item(
            "swap_baseline",
            self.inner.swap_baseline(u, w).map_err(value_err)?,
        )?;
        Ok(d)
    }
}

/// Couplings √(i(n−i)) of the engineered n-site chain.
#[pyfunction]
fn pst_chain(n: usize) -> PyResult<Vec<f64>> {
    Ok(chain::pst_chain(n).map_err(value_err)?.couplings().to_vec())
}

/// Chain couplings obtained by projecting Q_k onto Hamming-weight columns.
#[pyfunction]
fn column_project(k: u32) -> PyResult<Vec<f64>> {
    Ok(chain::column_project(k)
        .map_err(value_err)?
        .chain
        .couplings()
        .to_vec())
}

/// (time, fidelity) of the best end-to-end transfer on the uniform chain.
#[pyfunction]
fn uniform_chain_best(n: usize, t_max: f64) -> PyResult<(f64, f64)> {
    let best = chain::unmodulated_no_pst_scan(n, t_max).map_err(value_err)?;
    Ok((best.time, best.fidelity))
}

/// (m, from, to, time, fidelity, provenance)
type ScanRow = (u32, usize, usize, f64, f64, String);

/// Rows for corona orders 0..=m_max.
#[pyfunction]
#[pyo3(signature = (seed, pairs, m_max, kind = "adj", marking = "canonical", t_max = corona::SCAN_T_MAX))]
fn corona_scan(
    seed: &PyGraph,
    pairs: Vec<(usize, usize)>,
    m_max: u32,
    kind: &str,
    marking: &str,
    t_max: f64,
) -> PyResult<Vec<ScanRow>> {
    let table = corona::fidelity_vs_m(
        &seed.inner,
        &pairs,
        m_max,
        matrix_kind(kind)?,
        marking_scheme(marking)?,
        t_max,
    )
    .map_err(value_err)?;
    Ok(table
        .rows
        .iter()
        .map(|r| {
            (
                r.m,
                r.from,
                r.to,
                r.time,
                r.fidelity,
                r.provenance.to_string(),
            )
        })
        .collect())
}

#[pyclass(name = "CouplingFamily", module = "qwalk_py", frozen)]
pub struct PyCouplingFamily {
    inner: CommutingFamily,
}

#[pymethods]
impl PyCouplingFamily {
    /// Distance classes of C_n with couplings J_0..J_{⌊n/2⌋}.
    #[staticmethod]
    fn cycle(n: usize, couplings: Vec<f64>) -> PyResult<Self> {
        let inner = CommutingFamily::cycle(n, couplings).map_err(value_err)?;
        Ok(PyCouplingFamily { inner })
    }

    /// Identity and K_n adjacency with couplings J_0, J_1.
    #[staticmethod]
    fn complete(n: usize, couplings: Vec<f64>) -> PyResult<Self> {
        let inner = CommutingFamily::complete(n, couplings).map_err(value_err)?;
        Ok(PyCouplingFamily { inner })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let inner = qwalk::qudit::parse_family(text).map_err(value_err)?;
        Ok(PyCouplingFamily { inner })
    }

    #[getter]
    fn sites(&self) -> usize {
        self.inner.sites()
    }

    fn effective_couplings(&self) -> Vec<f64> {
        self.inner.effective_couplings()
    }

    fn amplitude(&self, source: usize, target: usize, t: f64) -> PyResult<Complex64> {
        self.inner
            .transfer_amplitude(source, target, t)
            .map_err(value_err)
    }

    /// Same amplitude through the matrix exponential.
    fn direct_amplitude(&self, source: usize, target: usize, t: f64) -> PyResult<Complex64> {
        self.inner
            .direct_amplitude(source, target, t)
            .map_err(value_err)
    }

    /// (corrected, uncorrected) worst |Σ_j |f_j|² − 1| over `times`.
    fn unitarity_audit(&self, source: usize, times: Vec<f64>) -> PyResult<(f64, f64)> {
        let a = self
            .inner
            .unitarity_audit(source, &times)
            .map_err(value_err)?;
        Ok((a.corrected, a.uncorrected))
    }

    /// Moves a qudit with level amplitudes `amplitudes` from `source`.
    fn transfer<'py>(
        &self,
        py: Python<'py>,
        source: usize,
        amplitudes: Vec<Complex64>,
        target: usize,
        t: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let state = QuditState::new(source, amplitudes).map_err(value_err)?;
        let out = self
            .inner
            .qudit_transfer(&state, target, t)
            .map_err(value_err)?;
        let d = PyDict::new(py);
        d.set_item("amplitudes", out.amplitudes)?;
        d.set_item("level_phases", out.level_phases)?;
        d.set_item("fidelity", out.fidelity)?;
        d.set_item("condition_met", out.condition_met)?;
        Ok(d)
    }
}

fn coupler_config(cfg: &str) -> PyResult<CouplerConfig> {
    transmon::parse_config(cfg).map_err(value_err)
}

/// Effective couplings for a `key = value` coupler config (fF, GHz).
#[pyfunction]
fn coupling_report<'py>(py: Python<'py>, config: &str) -> PyResult<Bound<'py, PyDict>> {
    let r = transmon::coupling_report(&coupler_config(config)?).map_err(value_err)?;
    let d = PyDict::new(py);
    for (k, v) in [
        ("w_c", r.w_c),
        ("g_i", r.g_i),
        ("g_j", r.g_j),
        ("g_ij", r.g_ij),
        ("eta", r.eta),
        ("delta_i", r.delta_i),
        ("delta_j", r.delta_j),
        ("delta_ij", r.delta_ij),
        ("g_rwa", r.g_rwa),
        ("g_brwa", r.g_brwa),
    ] {
        d.set_item(k, v)?;
    }
    d.set_item("dispersive", r.dispersive)?;
    Ok(d)
}

/// (w_c, delta_i) where the effective coupling vanishes in [lo, hi].
#[pyfunction]
fn find_cutoff(config: &str, lo: f64, hi: f64) -> PyResult<(f64, f64)> {
    let c = transmon::find_cutoff(&coupler_config(config)?, lo, hi).map_err(value_err)?;
    Ok((c.w_c, c.delta_i))
}

/// hops·π/(2|g|) in ns for g in rad/ns.
#[pyfunction]
#[pyo3(signature = (coupling, hops = 1))]
fn pst_time(coupling: f64, hops: u32) -> PyResult<f64> {
    Ok(transmon::pst_time(coupling, hops)
        .map_err(value_err)?
        .angular_ns)
}

#[pymodule]
fn qwalk_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyRoutingNetwork>()?;
    m.add_class::<PyCouplingFamily>()?;
    m.add_function(wrap_pyfunction!(pst_chain, m)?)?;
    m.add_function(wrap_pyfunction!(column_project, m)?)?;
    m.add_function(wrap_pyfunction!(uniform_chain_best, m)?)?;
    m.add_function(wrap_pyfunction!(corona_scan, m)?)?;
    m.add_function(wrap_pyfunction!(coupling_report, m)?)?;
    m.add_function(wrap_pyfunction!(find_cutoff, m)?)?;
    m.add_function(wrap_pyfunction!(pst_time, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_functions() {
        Python::attach(|py| {
            let m = PyModule::new(py, "qwalk_py").unwrap();
            qwalk_py(&m).unwrap();
            let k2 = PyGraph::named("k2").unwrap();
            assert!(
                (k2.amplitude(0, 1, std::f64::consts::FRAC_PI_2, "adj")
                    .unwrap()
                    .norm()
                    - 1.0)
                    .abs()
                    < 1e-12
            );
            let d = k2.pst(py, 0, 1, "adj").unwrap();
            assert!(d
                .get_item("pst")
                .unwrap()
                .unwrap()
                .extract::<bool>()
                .unwrap());
            assert!(matrix_kind("nope").is_err());
            assert_eq!(pst_chain(4).unwrap().len(), 3);
            let net = PyRoutingNetwork::new(31).unwrap();
            let r = net.route(py, "10100", "01011", 0.0).unwrap();
            let hops: Vec<(String, String, String)> =
                r.get_item("hops").unwrap().unwrap().extract().unwrap();
            assert_eq!(hops.len(), 2);
        });
    }
}
