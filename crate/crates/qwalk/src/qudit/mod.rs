//! Qudit transfer: SU(d) chains and bosonic hopping on graphs whose coupling
//! classes form a commuting family of 0/1 matrices.
//!
//! With H = Σ_k J_k A_k and a common orthonormal eigenbasis (rows of U), the
//! single-boson amplitude from site s to site j is
//! f_js(t) = Σ_l U_lj U_ls e^{−itJ̃_l} with J̃_l = Σ_k J_k λ_l^(k). A boson
//! number level i then moves as f^i.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::spectral::{SpectralError, Spectrum, C64};

mod chain;

pub use chain::{
    qudit_coupling, su_d_generators, Generator, GeneratorKind, GeneratorSet, QuditChain,
    MAX_FULL_DIM, MAX_LEVELS, MAX_SECTOR_DIM,
};


const COMMUTE_TOL: f64 = 1e-9;
/// Target-amplitude magnitude needed before a transfer counts as perfect.
pub const QUDIT_PST_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuditError {
    #[error("qudit dimension must be between 2 and {MAX_LEVELS}, got {0}")]
    Levels(usize),
    #[error("a chain needs at least 2 sites, got {0}")]
    Sites(usize),
    #[error("space of dimension {0} is too large")]
    TooLarge(usize),
    #[error("Hamiltonian leaves the single-excitation sector")]
    SectorLeak,
    #[error("family needs A_0 = I and at least one more matrix")]
    MissingIdentity,
    #[error("family matrix {0} has the wrong shape or is not symmetric")]
    BadMatrix(usize),
    #[error("family matrices {0} and {1} do not commute (‖[A,B]‖ = {2:e})")]
    NotCommuting(usize, usize, f64),
    #[error("family matrices do not sum to the all-ones matrix")]
    NotComplete,
    #[error("{couplings} couplings for {matrices} matrices")]
    CouplingCount { couplings: usize, matrices: usize },
    #[error("simultaneous diagonalisation failed (residual {0:e})")]
    Diagonalisation(f64),
    #[error("site {site} out of range for {n} sites")]
    Site { site: usize, n: usize },
    #[error("qudit amplitudes are not normalised (Σ|α|² = {0})")]
    NotNormalised(f64),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Commuting 0/1 matrices A_0 = I, A_1, …, A_d with couplings J_0..J_d and a
/// shared eigenbasis.
#[derive(Debug, Clone)]
pub struct CommutingFamily {
    matrices: Vec<DMatrix<f64>>,
    couplings: Vec<f64>,
    /// Row l is the l-th common eigenvector.
    basis: DMatrix<f64>,
    /// eigenvalues[k][l] = λ_l^(k)
    eigenvalues: Vec<Vec<f64>>,
}

impl CommutingFamily {
    pub fn new(matrices: Vec<DMatrix<f64>>, couplings: Vec<f64>) -> Result<Self, QuditError> {
        if matrices.len() < 2 {
            return Err(QuditError::MissingIdentity);
        }
        let n = matrices[0].nrows();
        if matrices[0] != DMatrix::identity(n, n) {
            return Err(QuditError::MissingIdentity);
        }
        if couplings.len() != matrices.len() {
            return Err(QuditError::CouplingCount {
                couplings: couplings.len(),
                matrices: matrices.len(),
            });
        }
        for (k, a) in matrices.iter().enumerate() {
            if a.shape() != (n, n) || a != &a.transpose() || a.iter().any(|x| !x.is_finite()) {
                return Err(QuditError::BadMatrix(k));
            }
        }
        for a in 0..matrices.len() {
            for b in a + 1..matrices.len() {
                let c = (&matrices[a] * &matrices[b] - &matrices[b] * &matrices[a]).amax();
                if c > COMMUTE_TOL {
                    return Err(QuditError::NotCommuting(a, b, c));
                }
            }
        }
        let total = matrices.iter().fold(DMatrix::zeros(n, n), |acc, m| acc + m);
        if (total - DMatrix::from_element(n, n, 1.0)).amax() > 1e-12 {
            return Err(QuditError::NotComplete);
        }
        let columns = simultaneous_eigenbasis(&matrices[1..], n)?;
        let eigenvalues: Vec<Vec<f64>> = matrices
            .iter()
            .map(|a| {
                (0..n)
                    .map(|l| columns.column(l).dot(&(a * columns.column(l))))
                    .collect()
            })
            .collect();
        let worst = matrices
            .iter()
            .zip(&eigenvalues)
            .flat_map(|(a, vals)| {
                let columns = &columns;
                (0..n).map(move |l| (a * columns.column(l) - columns.column(l) * vals[l]).amax())
            })
            .fold(0.0, f64::max);
        if worst > COMMUTE_TOL {
            return Err(QuditError::Diagonalisation(worst));
        }
        Ok(CommutingFamily {
            matrices,
            couplings,
            basis: columns.transpose(),
            eigenvalues,
        })
    }

    /// Distance classes of `g`: A_k joins vertices at distance k. Commutes
    /// for distance-regular graphs such as cycles and complete graphs.
    pub fn distance_classes(g: &Graph, couplings: Vec<f64>) -> Result<Self, QuditError> {
        let n = g.vertex_count();
        let dist: Vec<Vec<Option<usize>>> = (0..n).map(|v| g.distances_from(v)).collect();
        let diameter = dist
            .iter()
            .flatten()
            .map(|d| d.unwrap_or(usize::MAX))
            .max()
            .unwrap_or(0);
        if diameter == usize::MAX {
            return Err(QuditError::NotComplete);
        }
        let matrices = (0..=diameter)
            .map(|k| DMatrix::from_fn(n, n, |i, j| if dist[i][j] == Some(k) { 1.0 } else { 0.0 }))
            .collect();
        CommutingFamily::new(matrices, couplings)
    }

    pub fn cycle(n: usize, couplings: Vec<f64>) -> Result<Self, QuditError> {
        Self::distance_classes(&Graph::cycle(n)?, couplings)
    }

    pub fn complete(n: usize, couplings: Vec<f64>) -> Result<Self, QuditError> {
        Self::distance_classes(&Graph::complete(n)?, couplings)
    }

    pub fn sites(&self) -> usize {
        self.basis.nrows()
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn eigenvalues(&self) -> &[Vec<f64>] {
        &self.eigenvalues
    }

    /// Σ_k J_k A_k
    pub fn hamiltonian(&self) -> DMatrix<f64> {
        let n = self.sites();
        self.matrices
            .iter()
            .zip(&self.couplings)
            .fold(DMatrix::zeros(n, n), |acc, (a, j)| acc + a * *j)
    }

    /// J̃_l = Σ_k J_k λ_l^(k).
    pub fn effective_couplings(&self) -> Vec<f64> {
        (0..self.sites())
            .map(|l| {
                self.couplings
                    .iter()
                    .zip(&self.eigenvalues)
                    .map(|(j, vals)| j * vals[l])
                    .sum()
            })
            .collect()
    }

    fn check_site(&self, site: usize) -> Result<(), QuditError> {
        if site >= self.sites() {
            return Err(QuditError::Site {
                site,
                n: self.sites(),
            });
        }
        Ok(())
    }

    /// f_js(t) = Σ_l U_lj U_ls e^{−itJ̃_l}.
    pub fn transfer_amplitude(
        &self,
        source: usize,
        target: usize,
        t: f64,
    ) -> Result<C64, QuditError> {
        self.check_site(source)?;
        self.check_site(target)?;
        let u = &self.basis;
        Ok(self
            .effective_couplings()
            .iter()
            .enumerate()
            .map(|(l, jl)| C64::cis(-t * jl) * (u[(l, target)] * u[(l, source)]))
            .sum())
    }

    /// The same sum with every U_ls replaced by 1, as in the flawed
    /// derivation this module corrects. Kept only for comparison.
    pub fn uncorrected_amplitude(&self, target: usize, t: f64) -> Result<C64, QuditError> {
        self.check_site(target)?;
        let u = &self.basis;
        Ok(self
            .effective_couplings()
            .iter()
            .enumerate()
            .map(|(l, jl)| C64::cis(-t * jl) * u[(l, target)])
            .sum())
    }

    /// ⟨target|e^{−iHt}|source⟩ from a fresh eigensolve of H.
    pub fn direct_amplitude(
        &self,
        source: usize,
        target: usize,
        t: f64,
    ) -> Result<C64, QuditError> {
        self.check_site(source)?;
        self.check_site(target)?;
        Ok(Spectrum::new(&self.hamiltonian())?.amplitude(source, target, t)?)
    }

    /// Largest |Σ_j |f_js(t)|² − 1| over the sample times, for the corrected
    /// and the uncorrected amplitudes.
    pub fn unitarity_audit(
        &self,
        source: usize,
        times: &[f64],
    ) -> Result<UnitarityAudit, QuditError> {
        let mut audit = UnitarityAudit {
            corrected: 0.0,
            uncorrected: 0.0,
        };
        for &t in times {
            let mut a = 0.0;
            let mut b = 0.0;
            for j in 0..self.sites() {
                a += self.transfer_amplitude(source, j, t)?.norm_sqr();
                b += self.uncorrected_amplitude(j, t)?.norm_sqr();
            }
            audit.corrected = f64::max(audit.corrected, (a - 1.0).abs());
            audit.uncorrected = f64::max(audit.uncorrected, (b - 1.0).abs());
        }
        Ok(audit)
    }

    /// Moves a qudit from its site to `target` in time `t0`. Level i of the
    /// qudit picks up f^i; the transfer is perfect when |f| = 1.
    pub fn qudit_transfer(
        &self,
        state: &QuditState,
        target: usize,
        t0: f64,
    ) -> Result<QuditTransfer, QuditError> {
        let f = self.transfer_amplitude(state.site, target, t0)?;
        let amplitudes: Vec<C64> = state
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| a * f.powu(i as u32))
            .collect();
        let fidelity = state
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * f.norm().powi(i as i32))
            .sum();
        let condition_met = f.norm() >= 1.0 - QUDIT_PST_TOL;
        Ok(QuditTransfer {
            site: target,
            amplitudes,
            level_phases: (0..state.amplitudes.len())
                .map(|i| i as f64 * f.arg())
                .collect(),
            target_amplitude: f,
            fidelity,
            condition_met,
        })
    }
}

/// Recursive refinement: diagonalise the first matrix, then each later
/// matrix inside every degenerate block left so far.
fn simultaneous_eigenbasis(
    matrices: &[DMatrix<f64>],
    n: usize,
) -> Result<DMatrix<f64>, QuditError> {
    let mut blocks: Vec<DMatrix<f64>> = vec![DMatrix::identity(n, n)];
    for a in matrices {
        let mut next = Vec::new();
        for q in blocks {
            if q.ncols() == 1 {
                next.push(q);
                continue;
            }
            let s = Spectrum::new(&(q.transpose() * a * &q))?;
            let rotated = &q * s.vectors();
            for range in s.clusters() {
                next.push(rotated.columns(range.start, range.len()).into_owned());
            }
        }
        blocks = next;
    }
    let cols: Vec<DVector<f64>> = blocks
        .iter()
        .flat_map(|b| b.column_iter().map(|c| c.into_owned()))
        .collect();
    Ok(DMatrix::from_columns(&cols))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitarityAudit {
    pub corrected: f64,
    pub uncorrected: f64,
}

/// Σ_i α_i |i⟩ on one site; level i means i bosons.
#[derive(Debug, Clone, PartialEq)]
pub struct QuditState {
    pub site: usize,
    pub amplitudes: Vec<C64>,
}

impl QuditState {
    pub fn new(site: usize, amplitudes: Vec<C64>) -> Result<Self, QuditError> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(QuditError::NotNormalised(norm));
        }
        Ok(QuditState { site, amplitudes })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuditTransfer {
    pub site: usize,
    /// α_i f^i
    pub amplitudes: Vec<C64>,
    /// i·arg f, removable after arrival.
    pub level_phases: Vec<f64>,
    pub target_amplitude: C64,
    /// Overlap with the phase-corrected ideal state: Σ_i |α_i|² |f|^i.
    pub fidelity: f64,
    pub condition_met: bool,
}

/// Text format:
///
/// ```text
/// family <n>
/// coupling <k> <J_k>      # k = 0 is the on-site term
/// pair <k> <i> <j>        # i and j are joined in class k
/// ```
///
/// `cycle <n>` or `complete <n>` may replace the pair lines.
pub fn parse_family(text: &str) -> Result<CommutingFamily, QuditError> {
    let mut n: Option<usize> = None;
    let mut couplings: Vec<(usize, f64)> = Vec::new();
    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    let mut builtin: Option<(String, usize)> = None;
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |reason: &str| QuditError::Parse {
            line: no + 1,
            reason: reason.to_string(),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let int = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| err(&format!("bad integer '{s}'")))
        };
        match fields.as_slice() {
            ["family", v] => n = Some(int(v)?),
            [name @ ("cycle" | "complete"), v] => builtin = Some((name.to_string(), int(v)?)),
            ["coupling", k, j] => {
                let j: f64 = j.parse().map_err(|_| err(&format!("bad coupling '{j}'")))?;
                couplings.push((int(k)?, j));
            }
            ["pair", k, i, j] => pairs.push((int(k)?, int(i)?, int(j)?)),
            _ => return Err(err(&format!("unrecognised line '{line}'"))),
        }
    }
    let width = couplings.iter().map(|c| c.0 + 1).max().unwrap_or(0);
    let mut js = vec![0.0; width];
    for (k, j) in couplings {
        js[k] = j;
    }
    if let Some((name, size)) = builtin {
        let g = if name == "cycle" {
            Graph::cycle(size)?
        } else {
            Graph::complete(size)?
        };
        let diameter = if name == "cycle" { size / 2 } else { 1 };
        js.resize(diameter + 1, 0.0);
        return CommutingFamily::distance_classes(&g, js);
    }
    let n = n.ok_or(QuditError::Parse {
        line: 0,
        reason: "missing 'family <n>' header".into(),
    })?;
    let classes = pairs.iter().map(|p| p.0 + 1).max().unwrap_or(1).max(width);
    js.resize(classes, 0.0);
    let mut matrices = vec![DMatrix::zeros(n, n); classes];
    matrices[0] = DMatrix::identity(n, n);
    for (k, i, j) in pairs {
        if k == 0 || i >= n || j >= n || i == j {
            return Err(QuditError::Parse {
                line: 0,
                reason: format!("bad pair {k} {i} {j}"),
            });
        }
        matrices[k][(i, j)] = 1.0;
        matrices[k][(j, i)] = 1.0;
    }
    CommutingFamily::new(matrices, js)
}
