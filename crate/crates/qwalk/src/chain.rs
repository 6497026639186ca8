//! Weighted chains obtained by projecting a hypercube onto its Hamming-weight
//! columns, and the uniform chain they replace.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphError, Sign};
use crate::spectral::{
    max_fidelity_scan, ScanMax, SpectralError, Spectrum, TransferReport, PST_TOL,
};

/// Largest hypercube dimension projected by explicit enumeration.
pub const EXPLICIT_PROJECTION_DIM: u32 = 16;
const MIRROR_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("a chain needs at least {min} sites, got {got}")]
    TooShort { got: usize, min: usize },
    #[error("coupling {index} must be positive and finite, got {value}")]
    BadCoupling { index: usize, value: f64 },
    #[error("couplings are not mirror symmetric at position {0}")]
    NotMirrored(usize),
    #[error("{got} fields for a chain of {expected} sites")]
    FieldCount { got: usize, expected: usize },
    #[error("scan horizon must be positive, got {0}")]
    BadHorizon(f64),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Nearest-neighbour chain with couplings `J_1..J_{n−1}` and optional local
/// fields used by the Heisenberg form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainSpec {
    couplings: Vec<f64>,
    fields: Vec<f64>,
}

impl ChainSpec {
    pub fn new(couplings: Vec<f64>) -> Result<Self, ChainError> {
        if couplings.is_empty() {
            return Err(ChainError::TooShort { got: 1, min: 2 });
        }
        for (i, &j) in couplings.iter().enumerate() {
            if !(j.is_finite() && j > 0.0) {
                return Err(ChainError::BadCoupling {
                    index: i + 1,
                    value: j,
                });
            }
        }
        let m = couplings.len();
        for i in 0..m / 2 {
            let (a, b) = (couplings[i], couplings[m - 1 - i]);
            if (a - b).abs() > MIRROR_TOL * a.max(b) {
                return Err(ChainError::NotMirrored(i + 1));
            }
        }
        let fields = vec![0.0; m + 1];
        Ok(ChainSpec { couplings, fields })
    }

    pub fn with_fields(mut self, fields: Vec<f64>) -> Result<Self, ChainError> {
        if fields.len() != self.len() {
            return Err(ChainError::FieldCount {
                got: fields.len(),
                expected: self.len(),
            });
        }
        self.fields = fields;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.couplings.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    /// Tridiagonal hopping matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &j) in self.couplings.iter().enumerate() {
            m[(i, i + 1)] = j;
            m[(i + 1, i)] = j;
        }
        m
    }

    pub fn graph(&self) -> Result<Graph, ChainError> {
        let mut g = Graph::new(self.len())?;
        for (i, &j) in self.couplings.iter().enumerate() {
            g.add_edge(i, i + 1, j, Sign::Plus)?;
        }
        Ok(g)
    }

    /// Single-excitation block of ½ Σ J_j σ_j·σ_{j+1} + Σ B_j σ^z_j, with
    /// σ^z = +1 on the excited site. Hopping amplitudes equal `J_j`.
    pub fn heisenberg_block(&self) -> DMatrix<f64> {
        let n = self.len();
        let total: f64 = self.couplings.iter().sum();
        let field_sum: f64 = self.fields.iter().sum();
        let mut m = self.matrix();
        for site in 0..n {
            let touching = self.left(site) + self.right(site);
            m[(site, site)] = 0.5 * total - touching - field_sum + 2.0 * self.fields[site];
        }
        m
    }

    fn left(&self, site: usize) -> f64 {
        if site == 0 {
            0.0
        } else {
            self.couplings[site - 1]
        }
    }

    fn right(&self, site: usize) -> f64 {
        self.couplings.get(site).copied().unwrap_or(0.0)
    }
}

/// Hypercube-derived chain: J_i = √(i(n − i)). Carries Heisenberg fields
/// B_j = ½(J_{j−1} + J_j) − ΣJ / (2(n − 2)) when n ≥ 3.
pub fn pst_chain(n: usize) -> Result<ChainSpec, ChainError> {
    if n < 2 {
        return Err(ChainError::TooShort { got: n, min: 2 });
    }
    let couplings: Vec<f64> = (1..n).map(|i| ((i * (n - i)) as f64).sqrt()).collect();
    let spec = ChainSpec::new(couplings)?;
    if n == 2 {
        return Ok(spec);
    }
    let total: f64 = spec.couplings.iter().sum();
    let fields = (0..n)
        .map(|j| 0.5 * (spec.left(j) + spec.right(j)) - total / (2.0 * (n - 2) as f64))
        .collect();
    spec.with_fields(fields)
}

pub fn uniform_chain(n: usize) -> Result<ChainSpec, ChainError> {
    if n < 2 {
        return Err(ChainError::TooShort { got: n, min: 2 });
    }
    ChainSpec::new(vec![1.0; n - 1])
}

/// Couplings between normalised Hamming-weight classes of Q_k.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection {
    pub chain: ChainSpec,
    /// Largest norm of the part of A|col⟩ leaving the column space. Only
    /// measured when the hypercube is enumerated explicitly.
    pub closure_defect: Option<f64>,
}

pub fn column_project(k: u32) -> Result<Projection, ChainError> {
    if k == 0 {
        return Err(ChainError::TooShort { got: 1, min: 2 });
    }
    if k <= EXPLICIT_PROJECTION_DIM {
        explicit_projection(k)
    } else {
        // Each weight-(i−1) vertex has k−i+1 neighbours of weight i, so the
        // coupling is c_i(k−i+1)/√(c_i c_{i+1}) with c_i/c_{i+1} = i/(k−i+1).
        let couplings = (1..=k as usize)
            .map(|i| {
                let up = (k as usize - i + 1) as f64;
                up * (i as f64 / up).sqrt()
            })
            .collect();
        Ok(Projection {
            chain: ChainSpec::new(couplings)?,
            closure_defect: None,
        })
    }
}

fn explicit_projection(k: u32) -> Result<Projection, ChainError> {
    let size = 1usize << k;
    let classes = k as usize + 1;
    let mut counts = vec![0usize; classes];
    for x in 0..size {
        counts[x.count_ones() as usize] += 1;
    }
    let norm: Vec<f64> = counts.iter().map(|&c| 1.0 / (c as f64).sqrt()).collect();
    let mut couplings = Vec::with_capacity(k as usize);
    let mut defect: f64 = 0.0;
    for c in 0..classes {
        // A|col c⟩ evaluated vertex by vertex
        let mut image = vec![0.0; size];
        for x in (0..size).filter(|x| x.count_ones() as usize == c) {
            for b in 0..k {
                image[x ^ (1 << b)] += norm[c];
            }
        }
        let mut proj = vec![0.0; classes];
        for (y, &val) in image.iter().enumerate() {
            proj[y.count_ones() as usize] += val * norm[y.count_ones() as usize];
        }
        let leak: f64 = image
            .iter()
            .enumerate()
            .map(|(y, &val)| {
                let w = y.count_ones() as usize;
                (val - proj[w] * norm[w]).powi(2)
            })
            .sum();
        defect = defect.max(leak.sqrt());
        if c + 1 < classes {
            couplings.push(proj[c + 1]);
        }
    }
    Ok(Projection {
        chain: ChainSpec::new(couplings)?,
        closure_defect: Some(defect),
    })
}

/// End-to-end amplitude of the chain at time `t`.
pub fn chain_pst_verify(spec: &ChainSpec, t: f64) -> Result<TransferReport, ChainError> {
    let s = Spectrum::new(&spec.matrix())?;
    let amp = s.amplitude(0, spec.len() - 1, t)?;
    Ok(TransferReport::from_amplitude(
        0,
        spec.len() - 1,
        t,
        amp,
        PST_TOL,
    ))
}

/// Transfer time of [`pst_chain`] at unit scale.
pub fn pst_chain_time() -> f64 {
    FRAC_PI_2
}

/// Best end-to-end fidelity of the uniform chain over [0, t_max].
pub fn unmodulated_no_pst_scan(n: usize, t_max: f64) -> Result<ScanMax, ChainError> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(ChainError::BadHorizon(t_max));
    }
    let spec = uniform_chain(n)?;
    let s = Spectrum::new(&spec.matrix())?;
    let dt = (t_max / 1e5).min(0.01);
    Ok(max_fidelity_scan(&s, 0, n - 1, t_max, dt)?)
}

/// λ_k = −2cos(kπ/(n+1)), ascending.
pub fn uniform_chain_spectrum(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| -2.0 * (k as f64 * std::f64::consts::PI / (n + 1) as f64).cos())
        .collect()
}
