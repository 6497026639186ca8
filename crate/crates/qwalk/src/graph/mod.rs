//! Signed, weighted, optionally labelled graphs and the matrices built from them.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use nalgebra::DMatrix;
use thiserror::Error;

mod balance;
mod format;
mod products;

pub use balance::{balance, Balance};
pub use format::{parse_graph, write_graph, ParseError};
pub use products::{
    add_isolated, cartesian, corona, corona_with, disjoint_union, induced_subgraph, marking,
    MarkingScheme,
};

/// Largest hypercube dimension the constructors accept.
pub const MAX_HYPERCUBE_DIM: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("label width {0} exceeds 63 bits")]
    TooWide(usize),
    #[error("value {bits} does not fit in {width} bits")]
    Overflow { bits: u64, width: u8 },
    #[error("invalid bit string {0:?}")]
    Invalid(String),
    #[error("labels have different widths ({0} and {1})")]
    WidthMismatch(u8, u8),
    #[error("bit position {pos} out of range for width {width}")]
    Position { pos: usize, width: u8 },
}

/// Fixed-width bit string. Position 0 is the leftmost character.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitLabel {
    bits: u64,
    width: u8,
}

impl BitLabel {
    pub const MAX_WIDTH: u8 = 63;

    pub fn new(bits: u64, width: u8) -> Result<Self, LabelError> {
        if width > Self::MAX_WIDTH {
            return Err(LabelError::TooWide(width as usize));
        }
        if width < 64 && bits >> width != 0 {
            return Err(LabelError::Overflow { bits, width });
        }
        Ok(BitLabel { bits, width })
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn width(&self) -> u8 {
        self.width
    }

    fn mask(&self) -> u64 {
        (1u64 << self.width) - 1
    }

    /// Bit at string position `pos` (0 = leftmost).
    pub fn bit(&self, pos: usize) -> Result<u8, LabelError> {
        if pos >= self.width as usize {
            return Err(LabelError::Position {
                pos,
                width: self.width,
            });
        }
        Ok(((self.bits >> (self.width as usize - 1 - pos)) & 1) as u8)
    }

    pub fn with_bit(&self, pos: usize, value: u8) -> Result<Self, LabelError> {
        if pos >= self.width as usize {
            return Err(LabelError::Position {
                pos,
                width: self.width,
            });
        }
        let shift = self.width as usize - 1 - pos;
        let bits = (self.bits & !(1u64 << shift)) | (((value & 1) as u64) << shift);
        Ok(BitLabel {
            bits,
            width: self.width,
        })
    }

    /// Bitwise complement.
    pub fn antipode(&self) -> Self {
        BitLabel {
            bits: !self.bits & self.mask(),
            width: self.width,
        }
    }

    pub fn hamming(&self, other: &BitLabel) -> Result<u32, LabelError> {
        if self.width != other.width {
            return Err(LabelError::WidthMismatch(self.width, other.width));
        }
        Ok((self.bits ^ other.bits).count_ones())
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    /// Same value with `extra` leading zeros.
    pub fn widened(&self, extra: u8) -> Result<Self, LabelError> {
        BitLabel::new(self.bits, self.width + extra)
    }

    pub fn concat(&self, other: &BitLabel) -> Result<Self, LabelError> {
        let width = self.width as usize + other.width as usize;
        if width > Self::MAX_WIDTH as usize {
            return Err(LabelError::TooWide(width));
        }
        BitLabel::new((self.bits << other.width) | other.bits, width as u8)
    }
}

impl fmt::Display for BitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for pos in 0..self.width as usize {
            let b = (self.bits >> (self.width as usize - 1 - pos)) & 1;
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for BitLabel {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, LabelError> {
        if s.len() > Self::MAX_WIDTH as usize {
            return Err(LabelError::TooWide(s.len()));
        }
        let mut bits = 0u64;
        for c in s.chars() {
            bits = match c {
                '0' => bits << 1,
                '1' => (bits << 1) | 1,
                _ => return Err(LabelError::Invalid(s.to_string())),
            };
        }
        BitLabel::new(bits, s.len() as u8)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
    pub sign: Sign,
}

impl Edge {
    pub fn signed_weight(&self) -> f64 {
        self.sign.value() * self.weight
    }

    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixKind {
    Adjacency,
    Laplacian,
    SignlessLaplacian,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MatrixKind::Adjacency => "adjacency",
            MatrixKind::Laplacian => "laplacian",
            MatrixKind::SignlessLaplacian => "signless-laplacian",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    Empty,
    #[error("vertex {vertex} out of range for a graph with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("edge weight must be finite and positive, got {0}")]
    BadWeight(f64),
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error("label {0} is used by more than one vertex")]
    DuplicateLabel(String),
    #[error("expected {expected} entries, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("hypercube dimension {0} exceeds the limit {MAX_HYPERCUBE_DIM}")]
    TooLarge(u32),
    #[error("vertex set is empty")]
    EmptyVertexSet,
    #[error("explicit marking requested but the graph carries no markings")]
    MissingMarkings,
    #[error("{0}")]
    Unsupported(String),
}

/// Simple undirected graph with positive weights and separate edge signs.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    index: BTreeMap<(usize, usize), usize>,
    adj: Vec<Vec<usize>>,
    labels: Option<Vec<BitLabel>>,
    markings: Option<Vec<Sign>>,
    potentials: Option<Vec<f64>>,
}

impl Graph {
    pub fn new(n: usize) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        Ok(Graph {
            n,
            edges: Vec::new(),
            index: BTreeMap::new(),
            adj: vec![Vec::new(); n],
            labels: None,
            markings: None,
            potentials: None,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v >= self.n {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                count: self.n,
            })
        } else {
            Ok(())
        }
    }

    pub fn add_edge(
        &mut self,
        u: usize,
        v: usize,
        weight: f64,
        sign: Sign,
    ) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(GraphError::BadWeight(weight));
        }
        let key = (u.min(v), u.max(v));
        if self.index.contains_key(&key) {
            return Err(GraphError::DuplicateEdge(key.0, key.1));
        }
        self.index.insert(key, self.edges.len());
        self.adj[u].push(self.edges.len());
        self.adj[v].push(self.edges.len());
        self.edges.push(Edge { u, v, weight, sign });
        Ok(())
    }

    pub fn add_unit_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        self.add_edge(u, v, 1.0, Sign::Plus)
    }

    /// Appends `count` isolated vertices. Markings extend with `+`, potentials
    /// with zero; labels are dropped since no fresh label is implied.
    pub fn push_vertices(&mut self, count: usize) {
        self.n += count;
        self.labels = None;
        self.adj
            .extend(std::iter::repeat_with(Vec::new).take(count));
        if let Some(m) = self.markings.as_mut() {
            m.extend(std::iter::repeat_n(Sign::Plus, count));
        }
        if let Some(p) = self.potentials.as_mut() {
            p.extend(std::iter::repeat_n(0.0, count));
        }
    }

    pub fn edge_between(&self, u: usize, v: usize) -> Option<&Edge> {
        self.index
            .get(&(u.min(v), u.max(v)))
            .map(|&i| &self.edges[i])
    }

    pub fn incident(&self, v: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.adj[v].iter().map(move |&i| &self.edges[i])
    }

    /// Neighbours of `v` in ascending order.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.incident(v).map(|e| e.other(v)).collect();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// (positive, negative) incident edge counts.
    pub fn signed_degree(&self, v: usize) -> (usize, usize) {
        self.incident(v).fold((0, 0), |(p, m), e| match e.sign {
            Sign::Plus => (p + 1, m),
            Sign::Minus => (p, m + 1),
        })
    }

    pub fn weighted_degree(&self, v: usize) -> f64 {
        self.incident(v).map(|e| e.weight).sum()
    }

    pub fn is_signed(&self) -> bool {
        self.edges.iter().any(|e| e.sign == Sign::Minus)
    }

    pub fn labels(&self) -> Option<&[BitLabel]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> Option<BitLabel> {
        self.labels.as_ref().map(|l| l[v])
    }

    pub fn set_labels(&mut self, labels: Vec<BitLabel>) -> Result<(), GraphError> {
        if labels.len() != self.n {
            return Err(GraphError::LengthMismatch {
                expected: self.n,
                found: labels.len(),
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for l in &labels {
            if l.width() != labels[0].width() {
                return Err(LabelError::WidthMismatch(labels[0].width(), l.width()).into());
            }
            if !seen.insert(*l) {
                return Err(GraphError::DuplicateLabel(l.to_string()));
            }
        }
        self.labels = Some(labels);
        Ok(())
    }

    pub fn clear_labels(&mut self) {
        self.labels = None;
    }

    /// Vertex carrying `label`, if any.
    pub fn find_label(&self, label: &BitLabel) -> Option<usize> {
        self.labels.as_ref()?.iter().position(|l| l == label)
    }

    pub fn markings(&self) -> Option<&[Sign]> {
        self.markings.as_deref()
    }

    pub fn set_markings(&mut self, marks: Vec<Sign>) -> Result<(), GraphError> {
        if marks.len() != self.n {
            return Err(GraphError::LengthMismatch {
                expected: self.n,
                found: marks.len(),
            });
        }
        self.markings = Some(marks);
        Ok(())
    }

    pub fn clear_markings(&mut self) {
        self.markings = None;
    }

    pub fn potentials(&self) -> Option<&[f64]> {
        self.potentials.as_deref()
    }

    pub fn set_potentials(&mut self, fields: Vec<f64>) -> Result<(), GraphError> {
        if fields.len() != self.n {
            return Err(GraphError::LengthMismatch {
                expected: self.n,
                found: fields.len(),
            });
        }
        self.potentials = Some(fields);
        Ok(())
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            a[(e.u, e.v)] = e.signed_weight();
            a[(e.v, e.u)] = e.signed_weight();
        }
        a
    }

    /// D − A with D the weighted (unsigned) degree.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = -self.adjacency();
        for v in 0..self.n {
            l[(v, v)] = self.weighted_degree(v);
        }
        l
    }

    /// D + A.
    pub fn signless_laplacian(&self) -> DMatrix<f64> {
        let mut l = self.adjacency();
        for v in 0..self.n {
            l[(v, v)] = self.weighted_degree(v);
        }
        l
    }

    pub fn matrix(&self, kind: MatrixKind) -> DMatrix<f64> {
        match kind {
            MatrixKind::Adjacency => self.adjacency(),
            MatrixKind::Laplacian => self.laplacian(),
            MatrixKind::SignlessLaplacian => self.signless_laplacian(),
        }
    }

    /// Adjacency plus the local fields on the diagonal (zero when absent).
    pub fn hamiltonian_with_fields(&self) -> DMatrix<f64> {
        let mut a = self.adjacency();
        if let Some(p) = &self.potentials {
            for (v, b) in p.iter().enumerate() {
                a[(v, v)] = *b;
            }
        }
        a
    }

    /// Copy with every edge sign set to `+`.
    pub fn unsigned(&self) -> Graph {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.sign = Sign::Plus;
        }
        g
    }

    /// Switching by a vertex signing: sign(u,v) becomes θ(u)·sign(u,v)·θ(v).
    pub fn switched(&self, theta: &[Sign]) -> Result<Graph, GraphError> {
        if theta.len() != self.n {
            return Err(GraphError::LengthMismatch {
                expected: self.n,
                found: theta.len(),
            });
        }
        let mut g = self.clone();
        for e in &mut g.edges {
            e.sign = theta[e.u] * e.sign * theta[e.v];
        }
        Ok(g)
    }

    /// Breadth-first edge distances from `source`; `None` marks unreachable vertices.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap_or(0);
            for y in self.neighbors(x) {
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.distances_from(0).iter().all(Option::is_some)
    }

    /// Proper 2-colouring if one exists.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut color: Vec<Option<bool>> = vec![None; self.n];
        for root in 0..self.n {
            if color[root].is_some() {
                continue;
            }
            color[root] = Some(false);
            let mut queue = VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                let cx = color[x].unwrap_or(false);
                for y in self.neighbors(x) {
                    match color[y] {
                        None => {
                            color[y] = Some(!cx);
                            queue.push_back(y);
                        }
                        Some(cy) if cy == cx => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(color.into_iter().map(|c| c.unwrap_or(false)).collect())
    }

    /// Constant d⁺ − d⁻ across vertices, if there is one.
    pub fn net_regularity(&self) -> Option<i64> {
        let nets: Vec<i64> = (0..self.n)
            .map(|v| {
                let (p, m) = self.signed_degree(v);
                p as i64 - m as i64
            })
            .collect();
        nets.iter().all(|&d| d == nets[0]).then_some(nets[0])
    }

    pub fn path(n: usize) -> Result<Graph, GraphError> {
        let mut g = Graph::new(n)?;
        for i in 1..n {
            g.add_unit_edge(i - 1, i)?;
        }
        Ok(g)
    }

    pub fn cycle(n: usize) -> Result<Graph, GraphError> {
        if n < 3 {
            return Err(GraphError::Unsupported(format!(
                "a cycle needs at least 3 vertices, got {n}"
            )));
        }
        let mut g = Graph::path(n)?;
        g.add_unit_edge(n - 1, 0)?;
        Ok(g)
    }

    pub fn complete(n: usize) -> Result<Graph, GraphError> {
        let mut g = Graph::new(n)?;
        for i in 0..n {
            for j in i + 1..n {
                g.add_unit_edge(i, j)?;
            }
        }
        Ok(g)
    }

    /// Q_k: vertex `x` carries the k-bit label of `x`, edges join labels at Hamming distance 1.
    pub fn hypercube(k: u32) -> Result<Graph, GraphError> {
        if k > MAX_HYPERCUBE_DIM {
            return Err(GraphError::TooLarge(k));
        }
        let n = 1usize << k;
        let mut g = Graph::new(n)?;
        for x in 0..n {
            for b in 0..k {
                let y = x ^ (1 << b);
                if y > x {
                    g.add_unit_edge(x, y)?;
                }
            }
        }
        let labels = (0..n)
            .map(|x| BitLabel::new(x as u64, k as u8))
            .collect::<Result<Vec<_>, _>>()?;
        g.set_labels(labels)?;
        Ok(g)
    }
}
