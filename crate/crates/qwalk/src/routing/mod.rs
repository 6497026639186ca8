//! Edge-switching routes on hypercube-derived networks.
//!
//! A network of `n` vertices labels vertex `x` with the binary form of `x`
//! using `⌊log₂ n⌋ + 1` bits and joins labels at Hamming distance one. Writing
//! `n = 2^{d_0} + 2^{d_1} + …` with `d_0 > d_1 > …`, the vertices split into
//! consecutive blocks that are full hypercubes of dimension `d_j`; a vertex in
//! a later block has exactly one neighbour in every earlier block.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{induced_subgraph, BitLabel, Graph, GraphError, LabelError, MatrixKind};
use crate::spectral::{SpectralError, Spectrum, TransferReport, C64, PST_TOL};

#[cfg(test)]
mod tests;

/// Largest sub-hypercube a single hop may activate.
pub const MAX_SUB_DIM: u32 = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoutingError {
    #[error("a routing network needs at least 2 vertices, got {0}")]
    TooSmall(usize),
    #[error("source and target are the same vertex")]
    SameVertex,
    #[error("label {0} is not a vertex of the network")]
    NotInNetwork(String),
    #[error("all {size} labels of width {width} are in use; widen the labels first")]
    Capacity { size: usize, width: u8 },
    #[error("plan does not fit the network: {0}")]
    PlanMismatch(String),
    #[error("input state is not concentrated on the source vertex {0}")]
    InputNotAtSource(usize),
    #[error("sub-hypercube of dimension {0} is too large to activate")]
    TooLarge(u32),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Sub-hypercube on which two labels are antipodal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SwitchPlan {
    pub host_dim: u32,
    /// Ascending string positions where the endpoints agree.
    pub fixed_positions: Vec<usize>,
    /// Shared bit values at those positions.
    pub fixed_bits: Vec<u8>,
    pub sub_dimension: u32,
    /// Edges switched off when the host is the full hypercube of `host_dim`.
    pub off_edge_count: u64,
}

impl SwitchPlan {
    /// Every label agreeing with the fixed bits, ascending.
    pub fn keep_labels(&self) -> Result<Vec<BitLabel>, RoutingError> {
        if self.sub_dimension > MAX_SUB_DIM {
            return Err(RoutingError::TooLarge(self.sub_dimension));
        }
        let width = self.host_dim as u8;
        let free: Vec<usize> = (0..width as usize)
            .filter(|p| !self.fixed_positions.contains(p))
            .collect();
        let mut base = BitLabel::new(0, width)?;
        for (&p, &b) in self.fixed_positions.iter().zip(&self.fixed_bits) {
            base = base.with_bit(p, b)?;
        }
        let mut out = Vec::with_capacity(1 << free.len());
        for mask in 0u64..(1u64 << free.len()) {
            let mut l = base;
            for (i, &p) in free.iter().enumerate() {
                l = l.with_bit(p, ((mask >> (free.len() - 1 - i)) & 1) as u8)?;
            }
            out.push(l);
        }
        out.sort();
        Ok(out)
    }
}

/// Edges outside an induced Q_i of Q_k: k·2^(k−1) − i·2^(i−1).
pub fn off_edge_count(k: u32, i: u32) -> u64 {
    let edges = |d: u32| {
        if d == 0 {
            0
        } else {
            d as u64 * (1u64 << (d - 1))
        }
    };
    edges(k) - edges(i)
}

pub fn antipodal(u: &BitLabel) -> BitLabel {
    u.antipode()
}

/// Positions where `u` and `v` agree are frozen; the remaining positions span
/// a sub-hypercube in which `u` and `v` are antipodal.
pub fn find_subhypercube(u: &BitLabel, v: &BitLabel) -> Result<SwitchPlan, RoutingError> {
    u.hamming(v)?;
    if u == v {
        return Err(RoutingError::SameVertex);
    }
    let k = u.width() as u32;
    let mut fixed_positions = Vec::new();
    let mut fixed_bits = Vec::new();
    for p in 0..u.width() as usize {
        let (a, b) = (u.bit(p)?, v.bit(p)?);
        if a == b {
            fixed_positions.push(p);
            fixed_bits.push(a);
        }
    }
    let sub_dimension = k - fixed_positions.len() as u32;
    Ok(SwitchPlan {
        host_dim: k,
        fixed_positions,
        fixed_bits,
        sub_dimension,
        off_edge_count: off_edge_count(k, sub_dimension),
    })
}

/// Consecutive vertex range forming a full hypercube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Block {
    pub start: usize,
    pub dim: u32,
}

impl Block {
    pub fn len(&self) -> usize {
        1 << self.dim
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: usize) -> bool {
        v >= self.start && v < self.start + self.len()
    }
}

fn blocks_of(n: usize) -> Vec<Block> {
    let mut out = Vec::new();
    let mut start = 0;
    for d in (0..usize::BITS).rev() {
        if n >> d & 1 == 1 {
            out.push(Block { start, dim: d });
            start += 1 << d;
        }
    }
    out
}

/// Edge count of the n-vertex network: Σ_j [d_j·2^(d_j−1) + j·2^(d_j)].
pub fn network_edge_count(n: usize) -> u64 {
    blocks_of(n)
        .iter()
        .enumerate()
        .map(|(j, b)| off_edge_count(b.dim, 0) + j as u64 * (1u64 << b.dim))
        .sum()
}

#[derive(Debug, Clone)]
pub struct RoutingNetwork {
    graph: Graph,
    width: u8,
    blocks: Vec<Block>,
}

fn label_width(n: usize) -> u8 {
    (usize::BITS - n.leading_zeros()) as u8
}

impl RoutingNetwork {
    pub fn build(n: usize) -> Result<Self, RoutingError> {
        if n < 2 {
            return Err(RoutingError::TooSmall(n));
        }
        Self::with_width(n, label_width(n))
    }

    fn with_width(n: usize, width: u8) -> Result<Self, RoutingError> {
        if width > 62 || n > 1usize << width {
            return Err(RoutingError::Capacity { size: n, width });
        }
        let mut graph = Graph::new(n)?;
        for x in 0..n {
            for b in 0..width as usize {
                let y = x ^ (1 << b);
                if y > x && y < n {
                    graph.add_unit_edge(x, y)?;
                }
            }
        }
        let labels = (0..n)
            .map(|x| BitLabel::new(x as u64, width))
            .collect::<Result<Vec<_>, _>>()?;
        graph.set_labels(labels)?;
        Ok(RoutingNetwork {
            graph,
            width,
            blocks: blocks_of(n),
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn size(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn label(&self, v: usize) -> Result<BitLabel, RoutingError> {
        if v >= self.size() {
            return Err(RoutingError::PlanMismatch(format!(
                "vertex {v} out of range"
            )));
        }
        Ok(BitLabel::new(v as u64, self.width)?)
    }

    pub fn vertex(&self, label: &BitLabel) -> Result<usize, RoutingError> {
        if label.width() != self.width || label.bits() as usize >= self.size() {
            return Err(RoutingError::NotInNetwork(label.to_string()));
        }
        Ok(label.bits() as usize)
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.contains(v))
            .unwrap_or(self.blocks.len())
    }

    /// Adds the vertex whose label is one more than the last, wired to every
    /// existing label at Hamming distance one.
    pub fn grow(&self) -> Result<Self, RoutingError> {
        let n = self.size();
        if n >= 1usize << self.width {
            return Err(RoutingError::Capacity {
                size: n,
                width: self.width,
            });
        }
        let mut graph = self.graph.clone();
        let labels: Vec<BitLabel> = graph.labels().map(<[BitLabel]>::to_vec).unwrap_or_default();
        graph.push_vertices(1);
        for b in 0..self.width as usize {
            let y = n ^ (1 << b);
            if y < n {
                graph.add_unit_edge(y, n)?;
            }
        }
        let mut labels = labels;
        labels.push(BitLabel::new(n as u64, self.width)?);
        graph.set_labels(labels)?;
        Ok(RoutingNetwork {
            graph,
            width: self.width,
            blocks: blocks_of(n + 1),
        })
    }

    /// Same network with one more leading zero on every label.
    pub fn widened(&self) -> Result<Self, RoutingError> {
        Self::with_width(self.size(), self.width + 1)
    }

    /// Existing vertices at Hamming distance 1, 2, 3 and 4 from `u`.
    pub fn classify_neighborhood(&self, u: usize) -> Result<Neighborhood, RoutingError> {
        let lu = self.label(u)?;
        let mut sets: [Vec<usize>; 4] = Default::default();
        for v in 0..self.size() {
            let d = lu.hamming(&self.label(v)?)? as usize;
            if (1..=4).contains(&d) {
                sets[d - 1].push(v);
            }
        }
        let [alpha, beta, gamma, delta] = sets;
        Ok(Neighborhood {
            alpha,
            beta,
            gamma,
            delta,
        })
    }

    /// Shortest-path edge count, the number of cascaded SWAPs needed.
    pub fn swap_baseline(&self, u: usize, w: usize) -> Result<usize, RoutingError> {
        if u >= self.size() || w >= self.size() {
            return Err(RoutingError::PlanMismatch("vertex out of range".into()));
        }
        self.graph.distances_from(u)[w]
            .ok_or_else(|| RoutingError::PlanMismatch(format!("{u} and {w} are disconnected")))
    }

    /// Vertex set of the sub-hypercube spanned by a hop between `from` and `to`.
    pub fn hop_vertices(
        &self,
        from: usize,
        to: usize,
    ) -> Result<(SwitchPlan, Vec<usize>), RoutingError> {
        let plan = find_subhypercube(&self.label(from)?, &self.label(to)?)?;
        let vertices = plan
            .keep_labels()?
            .iter()
            .map(|l| self.vertex(l))
            .collect::<Result<Vec<_>, _>>()?;
        Ok((plan, vertices))
    }

    fn hop(&self, from: usize, to: usize, kind: HopKind) -> Result<Hop, RoutingError> {
        let (switch, active) = self.hop_vertices(from, to)?;
        let (sub, _) = induced_subgraph(&self.graph, &active)?;
        let weight = self.uniform_weight()?;
        Ok(Hop {
            from,
            to,
            kind,
            network_off_edges: self.graph.edge_count() - sub.edge_count(),
            switch,
            active,
            duration: FRAC_PI_2 / weight,
        })
    }

    fn uniform_weight(&self) -> Result<f64, RoutingError> {
        let w = self.graph.edges().first().map_or(1.0, |e| e.weight);
        if self.graph.edges().iter().any(|e| e.weight != w) {
            return Err(RoutingError::PlanMismatch("mixed edge weights".into()));
        }
        Ok(w)
    }

    /// At most two hops: inside one block a single hop; across blocks the
    /// bridge edge leaves or enters the smaller block and the other hop runs
    /// inside the larger block.
    pub fn plan_route(&self, u: usize, w: usize) -> Result<HopPlan, RoutingError> {
        let n = self.size();
        for x in [u, w] {
            if x >= n {
                return Err(RoutingError::PlanMismatch(format!(
                    "vertex {x} out of range"
                )));
            }
        }
        if u == w {
            return Ok(HopPlan {
                from: u,
                to: w,
                hops: Vec::new(),
                total_time: 0.0,
                intermediate: None,
            });
        }
        let (bu, bw) = (self.block_of(u), self.block_of(w));
        let mut hops = Vec::new();
        let mut intermediate = None;
        if bu == bw {
            hops.push(self.hop(u, w, HopKind::Cube)?);
        } else if bu > bw {
            // source sits in the smaller cube: cross first
            let mirror = u - (1 << self.blocks[bw].dim);
            hops.push(self.hop(u, mirror, HopKind::Bridge)?);
            if mirror != w {
                hops.push(self.hop(mirror, w, HopKind::Cube)?);
                intermediate = Some(mirror);
            }
        } else {
            let mirror = w - (1 << self.blocks[bu].dim);
            if mirror != u {
                hops.push(self.hop(u, mirror, HopKind::Cube)?);
                intermediate = Some(mirror);
            }
            hops.push(self.hop(mirror, w, HopKind::Bridge)?);
        }
        let total_time = hops.iter().map(|h| h.duration).sum();
        Ok(HopPlan {
            from: u,
            to: w,
            hops,
            total_time,
            intermediate,
        })
    }

    /// Adjacency of a hop's active subgraph embedded in the full vertex space.
    pub fn hop_adjacency(&self, hop: &Hop) -> DMatrix<f64> {
        let a = self.graph.adjacency();
        let n = self.size();
        let mut inside = vec![false; n];
        hop.active.iter().for_each(|&v| inside[v] = true);
        DMatrix::from_fn(n, n, |r, c| {
            if inside[r] && inside[c] {
                a[(r, c)]
            } else {
                0.0
            }
        })
    }

    /// Applies each hop's evolution in turn. Vertices outside a hop's active
    /// set are isolated during that hop and keep their amplitudes.
    pub fn execute_route(
        &self,
        plan: &HopPlan,
        input: &DVector<C64>,
        lag: SwitchLag,
    ) -> Result<RouteOutcome, RoutingError> {
        let n = self.size();
        if input.len() != n {
            return Err(RoutingError::PlanMismatch(format!(
                "state has dimension {}, network {}",
                input.len(),
                n
            )));
        }
        if input[plan.from].norm_sqr() < 1.0 - 1e-9 {
            return Err(RoutingError::InputNotAtSource(plan.from));
        }
        let mut state = input.clone();
        let mut elapsed = 0.0;
        let mut touched = vec![false; n];
        touched[plan.from] = true;
        for (i, hop) in plan.hops.iter().enumerate() {
            if i > 0 {
                match lag {
                    SwitchLag::Instant => {}
                    SwitchLag::Idle(dt) => elapsed += dt,
                    SwitchLag::FullNetwork(dt) => {
                        let s = Spectrum::of_graph(&self.graph, MatrixKind::Adjacency);
                        state = s.evolve(&state, dt)?;
                        elapsed += dt;
                        touched.iter_mut().for_each(|t| *t = true);
                    }
                }
            }
            let (sub, _) = induced_subgraph(&self.graph, &hop.active)?;
            let expected = hop.switch.sub_dimension as usize * (hop.active.len() / 2);
            if sub.edge_count() != expected {
                return Err(RoutingError::PlanMismatch(format!(
                    "hop {}→{} activates {} edges, expected {expected}",
                    hop.from,
                    hop.to,
                    sub.edge_count()
                )));
            }
            let local =
                DVector::from_iterator(hop.active.len(), hop.active.iter().map(|&v| state[v]));
            let evolved =
                Spectrum::of_graph(&sub, MatrixKind::Adjacency).evolve(&local, hop.duration)?;
            for (&v, amp) in hop.active.iter().zip(evolved.iter()) {
                state[v] = *amp;
                touched[v] = true;
            }
            elapsed += hop.duration;
        }
        let untouched_max = (0..n)
            .filter(|&v| !touched[v])
            .map(|v| state[v].norm())
            .fold(0.0, f64::max);
        let report =
            TransferReport::from_amplitude(plan.from, plan.to, elapsed, state[plan.to], PST_TOL);
        Ok(RouteOutcome {
            state,
            report,
            untouched_max,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Neighborhood {
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
    pub gamma: Vec<usize>,
    pub delta: Vec<usize>,
}

impl Neighborhood {
    pub fn counts(&self) -> [usize; 4] {
        [
            self.alpha.len(),
            self.beta.len(),
            self.gamma.len(),
            self.delta.len(),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HopKind {
    /// Single edge between two blocks.
    Bridge,
    /// Antipodal transfer inside one block.
    Cube,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hop {
    pub from: usize,
    pub to: usize,
    pub kind: HopKind,
    pub switch: SwitchPlan,
    /// Vertices of the active sub-hypercube, ascending.
    pub active: Vec<usize>,
    /// Network edges switched off during the hop.
    pub network_off_edges: usize,
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopPlan {
    pub from: usize,
    pub to: usize,
    pub hops: Vec<Hop>,
    pub total_time: f64,
    pub intermediate: Option<usize>,
}

/// What happens while edges are being reconfigured between hops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SwitchLag {
    Instant,
    /// All couplings off for the given time.
    Idle(f64),
    /// The full network stays coupled for the given time.
    FullNetwork(f64),
}

#[derive(Debug, Clone)]
pub struct RouteOutcome {
    pub state: DVector<C64>,
    pub report: TransferReport,
    /// Largest amplitude on vertices no hop ever activated.
    pub untouched_max: f64,
}
