//! Spectra of signed corona products and fidelity scans over iterated
//! self-coronas.
//!
//! For `G1 ∘ G2` with markings μ1, μ2 the adjacency and signed Laplacian
//! share one block shape:
//!
//! ```text
//! [ M1 + a·I        σ·μ2ᵀ⊗diag(μ1) ]
//! [ σ·μ2⊗diag(μ1)   (M2 + b·I)⊗I_n ]
//! ```
//!
//! with (a, b, σ) = (0, 0, +1) for adjacency and (k, 1, −1) for the
//! Laplacian. When μ2 is an eigenvector of M2 with eigenvalue ρ, every
//! eigenpair (λ, X) of M1 lifts to two eigenpairs
//! Λ± = (λ + a + s ± √((λ + a − s)² + 4k)) / 2 with s = ρ + b and vector
//! [X; c·μ2(j)·diag(μ1)X] where c = σ/(Λ − s). The remaining eigenpairs are
//! (η + b, [0; Y⊗e_i]) for the eigenpairs (η, Y) of M2 orthogonal to μ2.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{
    corona_with, marking, parse_graph, Graph, GraphError, MarkingScheme, MatrixKind, ParseError,
    Sign,
};
use crate::spectral::{max_fidelity_scan, SpectralError, Spectrum};

#[cfg(test)]
mod tests;

/// Largest product the lab will build.
pub const MAX_CORONA_VERTICES: usize = 5000;
/// Eigenpair residual accepted when checking theorem output.
pub const RESIDUAL_TOL: f64 = 1e-8;
const HYPOTHESIS_TOL: f64 = 1e-9;
/// Default scan horizon and step.
pub const SCAN_T_MAX: f64 = 20.0;
pub const SCAN_DT: f64 = 0.005;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoronaError {
    #[error("theorem does not apply: {0}")]
    Hypothesis(String),
    #[error("eigenpair with value {value} has residual {residual:e}")]
    Validation { value: f64, residual: f64 },
    #[error("corona would have {vertices} vertices, limit is {MAX_CORONA_VERTICES}")]
    TooLarge { vertices: usize },
    #[error("vertex {vertex} is not in the seed of {size} vertices")]
    PairOutOfRange { vertex: usize, size: usize },
    #[error("only adjacency and Laplacian spectra are supported")]
    UnsupportedKind,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Unit vector.
    pub vector: DVector<f64>,
}

impl EigenPair {
    /// ‖M·x − λ·x‖∞ with M applied through the edge list.
    pub fn residual(&self, g: &Graph, kind: MatrixKind) -> Result<f64, CoronaError> {
        let mx = apply(g, kind, &self.vector)?;
        Ok((mx - &self.vector * self.value).amax())
    }
}

fn apply(g: &Graph, kind: MatrixKind, x: &DVector<f64>) -> Result<DVector<f64>, CoronaError> {
    let (diag, off) = match kind {
        MatrixKind::Adjacency => (false, 1.0),
        MatrixKind::Laplacian => (true, -1.0),
        MatrixKind::SignlessLaplacian => (true, 1.0),
    };
    let mut y = DVector::zeros(x.len());
    for e in g.edges() {
        let w = off * e.signed_weight();
        y[e.u] += w * x[e.v];
        y[e.v] += w * x[e.u];
        if diag {
            y[e.u] += e.weight * x[e.u];
            y[e.v] += e.weight * x[e.v];
        }
    }
    Ok(y)
}

/// How a spectrum was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Theorem,
    Direct,
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Provenance::Theorem => "theorem",
            Provenance::Direct => "direct",
        })
    }
}

fn signs(mu: &[Sign]) -> Vec<f64> {
    mu.iter().map(|s| s.value()).collect()
}

fn shifts(kind: MatrixKind, k: usize) -> Result<(f64, f64, f64), CoronaError> {
    match kind {
        MatrixKind::Adjacency => Ok((0.0, 0.0, 1.0)),
        MatrixKind::Laplacian => Ok((k as f64, 1.0, -1.0)),
        MatrixKind::SignlessLaplacian => Err(CoronaError::UnsupportedKind),
    }
}

/// Eigenvalue ρ with M2·μ2 = ρ·μ2, the hypothesis both families rest on.
pub fn marking_eigenvalue(g2: &Graph, mu2: &[Sign], kind: MatrixKind) -> Result<f64, CoronaError> {
    let m = g2.matrix(kind);
    let mu = DVector::from_vec(signs(mu2));
    let image = &m * &mu;
    let rho = image[0] / mu[0];
    let defect = (image - &mu * rho).amax();
    if defect > HYPOTHESIS_TOL * rho.abs().max(1.0) {
        let hint = match kind {
            MatrixKind::Adjacency => "marking vector is not an adjacency eigenvector (needs net-regular graph with uniform marking or equivalent)",
            _ => "marking vector is not a Laplacian eigenvector (needs constant negative degree with uniform marking or equivalent)",
        };
        return Err(CoronaError::Hypothesis(format!(
            "{hint}; defect {defect:e}"
        )));
    }
    Ok(rho)
}

/// Orthonormal eigenpairs of `m` restricted to the complement of `mu`.
fn complement_pairs(m: &DMatrix<f64>, mu: &DVector<f64>) -> Vec<(f64, DVector<f64>)> {
    let k = mu.len();
    let mut basis: Vec<DVector<f64>> = vec![mu.normalize()];
    for i in 0..k {
        let mut v = DVector::from_fn(k, |r, _| if r == i { 1.0 } else { 0.0 });
        for b in &basis {
            v -= b * b.dot(&v);
        }
        let norm = v.norm();
        if norm > 1e-8 {
            basis.push(v / norm);
        }
        if basis.len() == k {
            break;
        }
    }
    if basis.len() < 2 {
        return Vec::new();
    }
    let q = DMatrix::from_columns(&basis[1..]);
    let s = Spectrum::new(&(q.transpose() * m * &q)).expect("restriction of a symmetric matrix");
    (0..q.ncols())
        .map(|c| (s.values()[c], &q * s.vectors().column(c)))
        .collect()
}

/// Lifts eigenpairs of `M1` to eigenpairs of the corona matrix.
fn lift(
    base: &[EigenPair],
    mu1: &[Sign],
    g2: &Graph,
    mu2: &[Sign],
    kind: MatrixKind,
) -> Result<Vec<EigenPair>, CoronaError> {
    let (n, k) = (mu1.len(), g2.vertex_count());
    let (a, b, sigma) = shifts(kind, k)?;
    let rho = marking_eigenvalue(g2, mu2, kind)?;
    let s = rho + b;
    let m1 = signs(mu1);
    let m2 = signs(mu2);
    let kf = k as f64;
    let mut out = Vec::with_capacity(n * (k + 1));
    for p in base {
        let lam = p.value + a;
        let root = ((lam - s).powi(2) + 4.0 * kf).sqrt();
        for big in [(lam + s + root) / 2.0, (lam + s - root) / 2.0] {
            let c = sigma / (big - s);
            let mut z = DVector::zeros(n * (k + 1));
            z.rows_mut(0, n).copy_from(&p.vector);
            for j in 0..k {
                for i in 0..n {
                    z[n + j * n + i] = c * m2[j] * m1[i] * p.vector[i];
                }
            }
            let norm = z.norm();
            out.push(EigenPair {
                value: big,
                vector: z / norm,
            });
        }
    }
    for (eta, y) in complement_pairs(&g2.matrix(kind), &DVector::from_vec(m2)) {
        for i in 0..n {
            let mut z = DVector::zeros(n * (k + 1));
            for j in 0..k {
                z[n + j * n + i] = y[j];
            }
            out.push(EigenPair {
                value: eta + b,
                vector: z,
            });
        }
    }
    Ok(out)
}

fn direct_pairs(g: &Graph, kind: MatrixKind) -> Vec<EigenPair> {
    let s = Spectrum::of_graph(g, kind);
    (0..s.dim())
        .map(|c| EigenPair {
            value: s.values()[c],
            vector: s.vectors().column(c).into_owned(),
        })
        .collect()
}

fn validate(pairs: &[EigenPair], product: &Graph, kind: MatrixKind) -> Result<(), CoronaError> {
    for p in pairs {
        let residual = p.residual(product, kind)?;
        if residual > RESIDUAL_TOL * p.value.abs().max(1.0) {
            return Err(CoronaError::Validation {
                value: p.value,
                residual,
            });
        }
    }
    Ok(())
}

fn theorem_eigenpairs(
    g1: &Graph,
    g2: &Graph,
    scheme: MarkingScheme,
    kind: MatrixKind,
) -> Result<Vec<EigenPair>, CoronaError> {
    let mu1 = marking(g1, scheme)?;
    let mu2 = marking(g2, scheme)?;
    let pairs = lift(&direct_pairs(g1, kind), &mu1, g2, &mu2, kind)?;
    validate(&pairs, &corona_with(g1, &mu1, g2, &mu2)?, kind)?;
    Ok(pairs)
}

/// All n(1 + k) adjacency eigenpairs of `g1 ∘ g2` from the factors' spectra,
/// each checked against the product. Refuses when the marking of `g2` is not
/// an adjacency eigenvector.
pub fn corona_adjacency_eigenpairs(
    g1: &Graph,
    g2: &Graph,
    scheme: MarkingScheme,
) -> Result<Vec<EigenPair>, CoronaError> {
    theorem_eigenpairs(g1, g2, scheme, MatrixKind::Adjacency)
}

/// Laplacian counterpart of [`corona_adjacency_eigenpairs`].
pub fn corona_laplacian_eigenpairs(
    g1: &Graph,
    g2: &Graph,
    scheme: MarkingScheme,
) -> Result<Vec<EigenPair>, CoronaError> {
    theorem_eigenpairs(g1, g2, scheme, MatrixKind::Laplacian)
}

/// n(n + 1)^m, or `None` on overflow.
pub fn corona_vertex_count(n: usize, m: u32) -> Option<usize> {
    (n + 1).checked_pow(m)?.checked_mul(n)
}

/// e + (n + e)((n + 1)^m − 1).
pub fn corona_edge_count(n: usize, e: usize, m: u32) -> Option<usize> {
    (n + 1)
        .checked_pow(m)?
        .checked_sub(1)?
        .checked_mul(n + e)?
        .checked_add(e)
}

fn guard(seed: &Graph, m: u32) -> Result<(), CoronaError> {
    match corona_vertex_count(seed.vertex_count(), m) {
        Some(v) if v <= MAX_CORONA_VERTICES => Ok(()),
        Some(v) => Err(CoronaError::TooLarge { vertices: v }),
        None => Err(CoronaError::TooLarge {
            vertices: usize::MAX,
        }),
    }
}

/// G^(0) = seed, G^(m) = G^(m−1) ∘ seed.
pub fn iterate_corona(seed: &Graph, m: u32, scheme: MarkingScheme) -> Result<Graph, CoronaError> {
    guard(seed, m)?;
    let mu_seed = marking(seed, scheme)?;
    let mut g = seed.clone();
    for _ in 0..m {
        let mu = marking(&g, scheme)?;
        g = corona_with(&g, &mu, seed, &mu_seed)?;
    }
    Ok(g)
}

/// Iterated corona with its spectrum, lifted level by level when the seed
/// satisfies the hypothesis and solved directly otherwise.
pub fn iterated_spectrum(
    seed: &Graph,
    m: u32,
    scheme: MarkingScheme,
    kind: MatrixKind,
) -> Result<(Graph, Spectrum, Provenance), CoronaError> {
    guard(seed, m)?;
    shifts(kind, 0)?;
    let mu_seed = marking(seed, scheme)?;
    let usable = m > 0 && marking_eigenvalue(seed, &mu_seed, kind).is_ok();
    let mut g = seed.clone();
    let mut pairs = usable.then(|| direct_pairs(seed, kind));
    for _ in 0..m {
        let mu = marking(&g, scheme)?;
        let next = corona_with(&g, &mu, seed, &mu_seed)?;
        if let Some(p) = pairs.take() {
            let lifted = lift(&p, &mu, seed, &mu_seed, kind)?;
            validate(&lifted, &next, kind)?;
            pairs = Some(lifted);
        }
        g = next;
    }
    match pairs {
        Some(p) if usable => {
            let values: Vec<f64> = p.iter().map(|q| q.value).collect();
            let vectors =
                DMatrix::from_columns(&p.iter().map(|q| q.vector.clone()).collect::<Vec<_>>());
            Ok((
                g,
                Spectrum::from_eigenpairs(&values, &vectors)?,
                Provenance::Theorem,
            ))
        }
        _ => {
            let s = Spectrum::of_graph(&g, kind);
            Ok((g, s, Provenance::Direct))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub m: u32,
    pub from: usize,
    pub to: usize,
    pub time: f64,
    pub fidelity: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanTable {
    pub kind: String,
    pub rows: Vec<ScanRow>,
}

/// Best fidelity between seed vertices for every order 0..=m_max. Seed
/// vertices keep their indices in every product.
pub fn fidelity_vs_m(
    seed: &Graph,
    pairs: &[(usize, usize)],
    m_max: u32,
    kind: MatrixKind,
    scheme: MarkingScheme,
    t_max: f64,
) -> Result<ScanTable, CoronaError> {
    let n = seed.vertex_count();
    for &(u, v) in pairs {
        for x in [u, v] {
            if x >= n {
                return Err(CoronaError::PairOutOfRange { vertex: x, size: n });
            }
        }
    }
    guard(seed, m_max)?;
    let mut rows = Vec::new();
    for m in 0..=m_max {
        let (_, spectrum, provenance) = iterated_spectrum(seed, m, scheme, kind)?;
        for &(u, v) in pairs {
            let best = max_fidelity_scan(&spectrum, u, v, t_max, SCAN_DT)?;
            rows.push(ScanRow {
                m,
                from: u,
                to: v,
                time: best.time,
                fidelity: best.fidelity,
                provenance,
            });
        }
    }
    Ok(ScanTable {
        kind: kind.to_string(),
        rows,
    })
}

/// Outcome of scanning every vertex pair of `seed ∘ seed` under the
/// Laplacian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaplacianAudit {
    pub pairs: usize,
    /// Pairs ruled out by the eigenspace bound without scanning.
    pub pruned: usize,
    pub best_fidelity: f64,
    pub best_pair: (usize, usize),
    pub best_time: f64,
}

/// |⟨v|e^{−iLt}|u⟩| ≤ Σ_j ‖P_j u‖‖P_j v‖ over eigenspaces; pairs whose bound
/// is already below 1 − 1e-6 cannot transfer perfectly and are skipped.
pub fn laplacian_no_pst_audit(
    seed: &Graph,
    scheme: MarkingScheme,
    t_max: f64,
) -> Result<LaplacianAudit, CoronaError> {
    let (g, s, _) = iterated_spectrum(seed, 1, scheme, MatrixKind::Laplacian)?;
    let n = g.vertex_count();
    let mut audit = LaplacianAudit {
        pairs: 0,
        pruned: 0,
        best_fidelity: 0.0,
        best_pair: (0, 0),
        best_time: 0.0,
    };
    for u in 0..n {
        for v in u + 1..n {
            audit.pairs += 1;
            let bound: f64 = s.overlaps(u, v)?.iter().map(|o| (o.uu * o.vv).sqrt()).sum();
            let (fid, time) = if bound < 1.0 - 1e-6 {
                audit.pruned += 1;
                (bound * bound, f64::NAN)
            } else {
                let best = max_fidelity_scan(&s, u, v, t_max, 0.01)?;
                (best.fidelity, best.time)
            };
            if fid > audit.best_fidelity {
                audit.best_fidelity = fid;
                audit.best_pair = (u, v);
                audit.best_time = time;
            }
        }
    }
    Ok(audit)
}

/// Seed graphs from the numerical study. `approx` marks reconstructions
/// whose edge lists were not given in text.
#[derive(Debug, Clone)]
pub struct ExampleGraph {
    pub name: &'static str,
    pub approx: bool,
    pub graph: Graph,
}

const EXAMPLES: [(&str, &str); 3] = [
    ("example1", include_str!("../../data/corona/example1.graph")),
    ("example8", include_str!("../../data/corona/example8.graph")),
    (
        "example10",
        include_str!("../../data/corona/example10.graph"),
    ),
];

pub fn example_graphs() -> Result<Vec<ExampleGraph>, CoronaError> {
    EXAMPLES
        .iter()
        .map(|(name, text)| {
            Ok(ExampleGraph {
                name,
                approx: text.lines().any(|l| l.trim_start().starts_with("# approx")),
                graph: parse_graph(text)?,
            })
        })
        .collect()
}

pub fn example_graph(name: &str) -> Result<Option<ExampleGraph>, CoronaError> {
    Ok(example_graphs()?.into_iter().find(|e| e.name == name))
}
