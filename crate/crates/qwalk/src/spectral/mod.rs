//! Quantum-walk evolution through the eigendecomposition of a real symmetric
//! Hamiltonian, together with the perfect-state-transfer diagnostics.

use std::f64::consts::PI;
use std::ops::Range;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, MatrixKind};

mod oracle;
mod rational;

pub use oracle::{
    series_evolve, spin_oracle_check, xy_hamiltonian, SparseHamiltonian, MAX_SPIN_SITES,
};
pub use rational::{best_rational, rationality_check, Rationality, SpectralLattice};

pub type C64 = Complex64;

/// Default tolerance on a transfer magnitude.
pub const PST_TOL: f64 = 1e-9;
/// Default tolerance for condition checks.
pub const CONDITION_TOL: f64 = 1e-8;
/// Eigenvalues closer than this (relative to max(1, |λ|)) share an eigenspace.
pub const DEGENERACY_TOL: f64 = 1e-8;
/// Projector weights below this are outside a vertex's eigenvalue support.
const SUPPORT_TOL: f64 = 1e-12;
/// Grid peaks this far below the best grid value are still refined.
const PEAK_MARGIN: f64 = 1e-2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is empty")]
    Empty,
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vertex {vertex} out of range for dimension {dim}")]
    VertexOutOfRange { vertex: usize, dim: usize },
    #[error("eigenvector magnitude condition fails between {0} and {1}; no symmetry maps one to the other, so transfer is impossible")]
    VectorCondition(usize, usize),
    #[error("graph is not bipartite")]
    NotBipartite,
    #[error("vertices {0} and {1} are not connected")]
    Disconnected(usize, usize),
    #[error("spin oracle is limited to {MAX_SPIN_SITES} sites, got {0}")]
    TooManySites(usize),
    #[error("scan step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("eigenvectors are not orthonormal (defect {0:e})")]
    NotOrthonormal(f64),
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

/// Weights of two vertices on one eigenspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenspaceOverlap {
    pub value: f64,
    /// ⟨u|P|u⟩
    pub uu: f64,
    /// ⟨v|P|v⟩
    pub vv: f64,
    /// ⟨u|P|v⟩
    pub uv: f64,
}

impl Spectrum {
    pub fn new(m: &DMatrix<f64>) -> Result<Self, SpectralError> {
        let (rows, cols) = m.shape();
        if rows != cols {
            return Err(SpectralError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(SpectralError::Empty);
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(SpectralError::NonFinite);
        }
        let asym = (m - m.transpose()).amax();
        if asym > 1e-12 * m.amax().max(1.0) {
            return Err(SpectralError::NotSymmetric(asym));
        }
        let eig = SymmetricEigen::new(m.clone());
        let mut order: Vec<usize> = (0..rows).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(rows, rows, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(Spectrum { values, vectors })
    }

    /// Builds a spectrum from known eigenpairs; columns of `vectors` must be
    /// orthonormal. Pairs are reordered by value.
    pub fn from_eigenpairs(values: &[f64], vectors: &DMatrix<f64>) -> Result<Self, SpectralError> {
        let (rows, cols) = vectors.shape();
        if rows != cols {
            return Err(SpectralError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(SpectralError::Empty);
        }
        if values.len() != cols {
            return Err(SpectralError::DimensionMismatch {
                expected: cols,
                found: values.len(),
            });
        }
        if values.iter().chain(vectors.iter()).any(|x| !x.is_finite()) {
            return Err(SpectralError::NonFinite);
        }
        let defect = (vectors.transpose() * vectors - DMatrix::identity(rows, rows)).amax();
        if defect > 1e-8 {
            return Err(SpectralError::NotOrthonormal(defect));
        }
        let mut order: Vec<usize> = (0..rows).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        Ok(Spectrum {
            values: order.iter().map(|&i| values[i]).collect(),
            vectors: DMatrix::from_fn(rows, rows, |r, c| vectors[(r, order[c])]),
        })
    }

    pub fn of_graph(g: &Graph, kind: MatrixKind) -> Self {
        Spectrum::new(&g.matrix(kind)).expect("graph matrices are finite and symmetric")
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// V·diag(λ)·Vᵀ.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&self.values));
        &self.vectors * d * self.vectors.transpose()
    }

    fn check_vertex(&self, v: usize) -> Result<(), SpectralError> {
        if v >= self.dim() {
            Err(SpectralError::VertexOutOfRange {
                vertex: v,
                dim: self.dim(),
            })
        } else {
            Ok(())
        }
    }

    /// e^{−iHt}·state.
    pub fn evolve(&self, state: &DVector<C64>, t: f64) -> Result<DVector<C64>, SpectralError> {
        if state.len() != self.dim() {
            return Err(SpectralError::DimensionMismatch {
                expected: self.dim(),
                found: state.len(),
            });
        }
        let n = self.dim();
        let mut out = DVector::zeros(n);
        for (j, &lam) in self.values.iter().enumerate() {
            let col = self.vectors.column(j);
            let proj: C64 = col.iter().zip(state.iter()).map(|(a, s)| s * a).sum();
            let c = proj * C64::cis(-lam * t);
            for r in 0..n {
                out[r] += c * col[r];
            }
        }
        Ok(out)
    }

    /// Full propagator e^{−iHt}.
    pub fn propagator(&self, t: f64) -> DMatrix<C64> {
        let n = self.dim();
        let v = self.vectors.map(|x| C64::new(x, 0.0));
        let mut scaled = v.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let ph = C64::cis(-lam * t);
            scaled.column_mut(j).iter_mut().for_each(|x| *x *= ph);
        }
        let out = scaled * v.transpose();
        debug_assert_eq!(out.nrows(), n);
        out
    }

    /// ⟨to|e^{−iHt}|from⟩.
    pub fn amplitude(&self, from: usize, to: usize, t: f64) -> Result<C64, SpectralError> {
        self.check_vertex(from)?;
        self.check_vertex(to)?;
        Ok(self
            .values
            .iter()
            .enumerate()
            .map(|(j, &lam)| C64::cis(-lam * t) * (self.vectors[(from, j)] * self.vectors[(to, j)]))
            .sum())
    }

    /// Index ranges of numerically equal eigenvalues.
    pub fn clusters(&self) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for j in 1..=self.dim() {
            let split = j == self.dim()
                || self.values[j] - self.values[j - 1]
                    > DEGENERACY_TOL * self.values[j].abs().max(1.0);
            if split {
                out.push(start..j);
                start = j;
            }
        }
        out
    }

    /// Projector weights of `u` and `v` on each eigenspace.
    pub fn overlaps(&self, u: usize, v: usize) -> Result<Vec<EigenspaceOverlap>, SpectralError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(self
            .clusters()
            .into_iter()
            .map(|r| {
                let value = r.clone().map(|j| self.values[j]).sum::<f64>() / r.len() as f64;
                let (mut uu, mut vv, mut uv) = (0.0, 0.0, 0.0);
                for j in r {
                    let (a, b) = (self.vectors[(u, j)], self.vectors[(v, j)]);
                    uu += a * a;
                    vv += b * b;
                    uv += a * b;
                }
                EigenspaceOverlap { value, uu, vv, uv }
            })
            .collect())
    }

    /// Eigenvalues (one per eigenspace) on which `u` has weight.
    pub fn support(&self, u: usize) -> Result<Vec<f64>, SpectralError> {
        Ok(self
            .overlaps(u, u)?
            .into_iter()
            .filter(|o| o.uu > SUPPORT_TOL)
            .map(|o| o.value)
            .collect())
    }
}

fn check_dt(dt: f64) -> Result<(), SpectralError> {
    if dt.is_finite() && dt > 0.0 {
        Ok(())
    } else {
        Err(SpectralError::BadStep(dt))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferReport {
    pub from: usize,
    pub to: usize,
    pub time: f64,
    pub magnitude: f64,
    pub phase: f64,
    pub pass: bool,
}

impl TransferReport {
    pub fn from_amplitude(from: usize, to: usize, time: f64, amp: C64, tol: f64) -> Self {
        let magnitude = amp.norm();
        TransferReport {
            from,
            to,
            time,
            magnitude,
            phase: amp.arg(),
            pass: magnitude >= 1.0 - tol,
        }
    }
}

pub fn transfer_amplitude(
    g: &Graph,
    u: usize,
    v: usize,
    t: f64,
    kind: MatrixKind,
) -> Result<TransferReport, SpectralError> {
    let s = Spectrum::of_graph(g, kind);
    let amp = s.amplitude(u, v, t)?;
    Ok(TransferReport::from_amplitude(u, v, t, amp, PST_TOL))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PstConditions {
    pub vector_condition: bool,
    pub rationality: bool,
    pub eigenvalue_condition: bool,
    /// First time at which the eigenvalue phases can line up, when rational.
    pub candidate_time: Option<f64>,
    /// Magnitude reached at the candidate time.
    pub candidate_magnitude: Option<f64>,
}

/// Vector, rationality and eigenvalue conditions for transfer from `u` to `v`.
pub fn check_pst_conditions(
    s: &Spectrum,
    u: usize,
    v: usize,
) -> Result<PstConditions, SpectralError> {
    let ov = s.overlaps(u, v)?;
    let vector_condition = ov
        .iter()
        .all(|o| (o.uu.sqrt() - o.vv.sqrt()).abs() <= CONDITION_TOL);
    let support: Vec<f64> = ov
        .iter()
        .filter(|o| o.uu > SUPPORT_TOL)
        .map(|o| o.value)
        .collect();
    let rat = rationality_check(&support, rational::RATIONAL_TOL, rational::MAX_DENOMINATOR);
    let candidate_time = rat.lattice.as_ref().and_then(SpectralLattice::half_period);
    let candidate_magnitude = match candidate_time {
        Some(t) => Some(s.amplitude(u, v, t)?.norm()),
        None => None,
    };
    let eigenvalue_condition =
        u != v && vector_condition && candidate_magnitude.is_some_and(|m| m >= 1.0 - CONDITION_TOL);
    Ok(PstConditions {
        vector_condition,
        rationality: rat.rational,
        eigenvalue_condition,
        candidate_time,
        candidate_magnitude,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanMax {
    pub time: f64,
    /// Largest |amplitude|² found.
    pub fidelity: f64,
}

/// Largest |⟨v|e^{−iHt}|u⟩|² over [0, t_max]. Every grid peak close to the
/// best grid value is refined by golden section; the earliest peak reaching
/// the supremum (within 1e-10) is reported.
pub fn max_fidelity_scan(
    s: &Spectrum,
    u: usize,
    v: usize,
    t_max: f64,
    dt: f64,
) -> Result<ScanMax, SpectralError> {
    check_dt(dt)?;
    s.check_vertex(u)?;
    s.check_vertex(v)?;
    let terms: Vec<(f64, f64)> = (0..s.dim())
        .map(|j| (s.values[j], s.vectors[(u, j)] * s.vectors[(v, j)]))
        .filter(|(_, c)| c.abs() > 1e-15)
        .collect();
    let f = |t: f64| -> f64 {
        terms
            .iter()
            .map(|&(lam, c)| C64::cis(-lam * t) * c)
            .sum::<C64>()
            .norm_sqr()
    };
    let t_max = t_max.max(0.0);
    let steps = (t_max / dt).ceil() as usize;
    let grid: Vec<(f64, f64)> = (0..=steps)
        .map(|i| {
            let t = (i as f64 * dt).min(t_max);
            (t, f(t))
        })
        .collect();
    let top = grid.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let mut peaks: Vec<ScanMax> = Vec::new();
    for i in 0..grid.len() {
        let left = i == 0 || grid[i - 1].1 <= grid[i].1;
        let right = i + 1 == grid.len() || grid[i + 1].1 <= grid[i].1;
        if left && right && grid[i].1 >= top - PEAK_MARGIN {
            let (lo, hi) = ((grid[i].0 - dt).max(0.0), (grid[i].0 + dt).min(t_max));
            let (t, val) = golden_max(f, lo, hi, 80);
            peaks.push(if val > grid[i].1 {
                ScanMax {
                    time: t,
                    fidelity: val,
                }
            } else {
                ScanMax {
                    time: grid[i].0,
                    fidelity: grid[i].1,
                }
            });
        }
    }
    let best = peaks
        .iter()
        .map(|p| p.fidelity)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(*peaks
        .iter()
        .find(|p| p.fidelity >= best - 1e-10)
        .expect("grid has a maximum"))
}

/// Golden-section search for a maximum of a unimodal function on [a, b].
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

#[derive(Debug, Clone)]
pub struct SymmetryReport {
    pub operator: DMatrix<C64>,
    pub commutes: bool,
    pub maps_pair: bool,
}

/// S = Σ e^{iφ_j} P_j with φ_j = arg⟨u|P_j|v⟩ on the support of `u` and
/// identity on the remaining eigenspaces.
pub fn symmetry_operator(
    s: &Spectrum,
    u: usize,
    v: usize,
) -> Result<SymmetryReport, SpectralError> {
    let ov = s.overlaps(u, v)?;
    if ov
        .iter()
        .any(|o| (o.uu.sqrt() - o.vv.sqrt()).abs() > CONDITION_TOL)
    {
        return Err(SpectralError::VectorCondition(u, v));
    }
    let n = s.dim();
    let mut op = DMatrix::<C64>::zeros(n, n);
    for (range, o) in s.clusters().into_iter().zip(&ov) {
        let phase = if o.uu > SUPPORT_TOL && o.uv.abs() > SUPPORT_TOL {
            o.uv.signum()
        } else {
            1.0
        };
        for j in range {
            let col = s.vectors.column(j);
            for r in 0..n {
                for c in 0..n {
                    op[(r, c)] += C64::new(phase * col[r] * col[c], 0.0);
                }
            }
        }
    }
    let h = s.reconstruct().map(|x| C64::new(x, 0.0));
    let commutes = max_norm(&(&op * &h - &h * &op)) <= CONDITION_TOL;
    let mut diff = op.column(u).into_owned();
    diff[v] -= C64::new(1.0, 0.0);
    let maps_pair = diff.norm() <= CONDITION_TOL;
    Ok(SymmetryReport {
        operator: op,
        commutes,
        maps_pair,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PhaseClass {
    /// ±1
    Real,
    /// ±i
    Imaginary,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseAudit {
    pub distance: usize,
    pub phase: f64,
    pub class: PhaseClass,
    /// Even distance gives a real phase, odd distance an imaginary one.
    pub consistent: bool,
}

pub fn bipartite_phase_audit(
    g: &Graph,
    u: usize,
    v: usize,
    t0: f64,
) -> Result<PhaseAudit, SpectralError> {
    if g.bipartition().is_none() {
        return Err(SpectralError::NotBipartite);
    }
    let s = Spectrum::of_graph(g, MatrixKind::Adjacency);
    let phase = s.amplitude(u, v, t0)?.arg();
    let distance = g.distances_from(u)[v].ok_or(SpectralError::Disconnected(u, v))?;
    let tol = 1e-6;
    let near = |target: f64| {
        let d = (phase - target).rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d) <= tol
    };
    let class = if near(0.0) || near(PI) {
        PhaseClass::Real
    } else if near(PI / 2.0) || near(-PI / 2.0) {
        PhaseClass::Imaginary
    } else {
        PhaseClass::Other
    };
    let expected = if distance % 2 == 0 {
        PhaseClass::Real
    } else {
        PhaseClass::Imaginary
    };
    Ok(PhaseAudit {
        distance,
        phase,
        class,
        consistent: class == expected,
    })
}

/// |⟨u|e^{−2iHt0}|u⟩| ≥ 1 − 1e-8.
pub fn periodicity_check(s: &Spectrum, u: usize, t0: f64) -> Result<bool, SpectralError> {
    Ok(s.amplitude(u, u, 2.0 * t0)?.norm() >= 1.0 - CONDITION_TOL)
}

/// Largest modulus among complex entries.
pub fn max_norm<'a>(entries: impl IntoIterator<Item = &'a C64>) -> f64 {
    entries.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Basis state |v⟩ in dimension n.
pub fn basis_state(n: usize, v: usize) -> DVector<C64> {
    let mut s = DVector::zeros(n);
    s[v] = C64::new(1.0, 0.0);
    s
}
