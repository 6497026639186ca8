use super::{BitLabel, Graph, GraphError, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarkingScheme {
    /// Product of incident edge signs.
    Canonical,
    /// `-` when negative edges outnumber positive ones, `+` otherwise (ties included).
    Plurality,
    /// Markings stored on the graph.
    Explicit,
}

pub fn marking(g: &Graph, scheme: MarkingScheme) -> Result<Vec<Sign>, GraphError> {
    let n = g.vertex_count();
    match scheme {
        MarkingScheme::Canonical => Ok((0..n)
            .map(|v| g.incident(v).fold(Sign::Plus, |acc, e| acc * e.sign))
            .collect()),
        MarkingScheme::Plurality => Ok((0..n)
            .map(|v| {
                let (p, m) = g.signed_degree(v);
                if m > p {
                    Sign::Minus
                } else {
                    Sign::Plus
                }
            })
            .collect()),
        MarkingScheme::Explicit => g
            .markings()
            .map(<[Sign]>::to_vec)
            .ok_or(GraphError::MissingMarkings),
    }
}

/// Kronecker-sum product; vertex (i, j) sits at index i·|h| + j.
pub fn cartesian(g: &Graph, h: &Graph) -> Result<Graph, GraphError> {
    let (n, m) = (g.vertex_count(), h.vertex_count());
    let mut out = Graph::new(n * m)?;
    for i in 0..n {
        for e in h.edges() {
            out.add_edge(i * m + e.u, i * m + e.v, e.weight, e.sign)?;
        }
    }
    for e in g.edges() {
        for j in 0..m {
            out.add_edge(e.u * m + j, e.v * m + j, e.weight, e.sign)?;
        }
    }
    if let (Some(lg), Some(lh)) = (g.labels(), h.labels()) {
        let mut labels = Vec::with_capacity(n * m);
        for a in lg {
            for b in lh {
                labels.push(a.concat(b)?);
            }
        }
        out.set_labels(labels)?;
    }
    Ok(out)
}

/// Block-diagonal union; `h` follows `g`. Labels survive when both sides
/// carry distinct labels of one width.
pub fn disjoint_union(g: &Graph, h: &Graph) -> Result<Graph, GraphError> {
    let n = g.vertex_count();
    let mut out = g.clone();
    out.push_vertices(h.vertex_count());
    for e in h.edges() {
        out.add_edge(n + e.u, n + e.v, e.weight, e.sign)?;
    }
    if let (Some(lg), Some(lh)) = (g.labels(), h.labels()) {
        let labels: Vec<BitLabel> = lg.iter().chain(lh).copied().collect();
        // conflicting labels are simply not carried over
        let _ = out.set_labels(labels);
    }
    match (g.markings(), h.markings()) {
        (Some(a), Some(b)) => out.set_markings(a.iter().chain(b).copied().collect())?,
        _ => out.clear_markings(),
    }
    Ok(out)
}

pub fn add_isolated(g: &Graph, count: usize) -> Graph {
    let mut out = g.clone();
    out.push_vertices(count);
    out
}

/// Subgraph on `vertices` (in the given order) with every edge whose ends are
/// both kept. Returns the graph and the original index of each new vertex.
pub fn induced_subgraph(g: &Graph, vertices: &[usize]) -> Result<(Graph, Vec<usize>), GraphError> {
    if vertices.is_empty() {
        return Err(GraphError::EmptyVertexSet);
    }
    let mut position = vec![None; g.vertex_count()];
    for (i, &v) in vertices.iter().enumerate() {
        if v >= g.vertex_count() {
            return Err(GraphError::VertexOutOfRange {
                vertex: v,
                count: g.vertex_count(),
            });
        }
        if position[v].is_some() {
            return Err(GraphError::Unsupported(format!("vertex {v} listed twice")));
        }
        position[v] = Some(i);
    }
    let mut out = Graph::new(vertices.len())?;
    for e in g.edges() {
        if let (Some(a), Some(b)) = (position[e.u], position[e.v]) {
            out.add_edge(a, b, e.weight, e.sign)?;
        }
    }
    if let Some(l) = g.labels() {
        out.set_labels(vertices.iter().map(|&v| l[v]).collect())?;
    }
    if let Some(m) = g.markings() {
        out.set_markings(vertices.iter().map(|&v| m[v]).collect())?;
    }
    if let Some(p) = g.potentials() {
        out.set_potentials(vertices.iter().map(|&v| p[v]).collect())?;
    }
    Ok((out, vertices.to_vec()))
}

/// Signed corona with the markings derived from `scheme` on both factors.
pub fn corona(g1: &Graph, g2: &Graph, scheme: MarkingScheme) -> Result<Graph, GraphError> {
    let mu1 = marking(g1, scheme)?;
    let mu2 = marking(g2, scheme)?;
    corona_with(g1, &mu1, g2, &mu2)
}

/// Signed corona for given markings.
///
/// Vertex layout follows the block form `[[A1, μ2ᵀ⊗diag(μ1)], [.., A2⊗I_n]]`:
/// the n vertices of `g1` come first, then vertex `j` of the copy attached to
/// `g1`-vertex `i` sits at `n + j·n + i`. The edge from `i` to that vertex has
/// sign μ1(i)·μ2(j) and unit weight. The result carries markings inherited
/// from the factors.
pub fn corona_with(
    g1: &Graph,
    mu1: &[Sign],
    g2: &Graph,
    mu2: &[Sign],
) -> Result<Graph, GraphError> {
    let (n, k) = (g1.vertex_count(), g2.vertex_count());
    if mu1.len() != n {
        return Err(GraphError::LengthMismatch {
            expected: n,
            found: mu1.len(),
        });
    }
    if mu2.len() != k {
        return Err(GraphError::LengthMismatch {
            expected: k,
            found: mu2.len(),
        });
    }
    let at = |j: usize, i: usize| n + j * n + i;
    let mut out = Graph::new(n * (k + 1))?;
    for e in g1.edges() {
        out.add_edge(e.u, e.v, e.weight, e.sign)?;
    }
    for (i, &si) in mu1.iter().enumerate() {
        for (j, &sj) in mu2.iter().enumerate() {
            out.add_edge(i, at(j, i), 1.0, si * sj)?;
        }
    }
    for e in g2.edges() {
        for i in 0..n {
            out.add_edge(at(e.u, i), at(e.v, i), e.weight, e.sign)?;
        }
    }
    let mut marks = mu1.to_vec();
    for &s in mu2 {
        marks.extend(std::iter::repeat_n(s, n));
    }
    out.set_markings(marks)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::MatrixKind;
    use nalgebra::{DMatrix, SymmetricEigen};

    fn sorted_eigs(m: DMatrix<f64>) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn k2_box_k2_is_labelled_square() {
        let k2 = Graph::hypercube(1).unwrap();
        let q2 = cartesian(&k2, &k2).unwrap();
        assert_eq!(q2.edge_count(), 4);
        let labels: Vec<String> = q2.labels().unwrap().iter().map(|l| l.to_string()).collect();
        assert_eq!(labels, ["00", "01", "10", "11"]);
        assert_eq!(q2.adjacency(), Graph::hypercube(2).unwrap().adjacency());
    }

    #[test]
    fn cartesian_with_single_vertex_is_identity() {
        let g = Graph::path(4).unwrap();
        let q0 = Graph::hypercube(0).unwrap();
        assert_eq!(cartesian(&g, &q0).unwrap().adjacency(), g.adjacency());
    }

    #[test]
    fn p3_box_p3_spectrum_is_pairwise_sums() {
        let p3 = Graph::path(3).unwrap();
        let prod = cartesian(&p3, &p3).unwrap();
        let e = sorted_eigs(p3.adjacency());
        let mut sums: Vec<f64> = e
            .iter()
            .flat_map(|a| e.iter().map(move |b| a + b))
            .collect();
        sums.sort_by(f64::total_cmp);
        for (x, y) in sorted_eigs(prod.adjacency()).iter().zip(&sums) {
            assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn union_is_block_diagonal() {
        let k2 = Graph::complete(2).unwrap();
        let u = disjoint_union(&k2, &k2).unwrap();
        let a = u.adjacency();
        assert_eq!(a.view((0, 0), (2, 2)), k2.adjacency());
        assert_eq!(a.view((2, 2), (2, 2)), k2.adjacency());
        assert_eq!(a.view((0, 2), (2, 2)), DMatrix::<f64>::zeros(2, 2));
        assert_eq!(add_isolated(&k2, 5).vertex_count(), 7);
    }

    #[test]
    fn induced_q2_inside_q3() {
        let q3 = Graph::hypercube(3).unwrap();
        let (sub, map) = induced_subgraph(&q3, &[0, 1, 2, 3]).unwrap();
        assert_eq!(map, vec![0, 1, 2, 3]);
        assert_eq!(sub.edge_count(), 4);
        for e in sub.edges() {
            let (a, b) = (sub.label(e.u).unwrap(), sub.label(e.v).unwrap());
            assert_eq!(a.hamming(&b).unwrap(), 1);
        }
        let (all, _) = induced_subgraph(&q3, &(0..8).collect::<Vec<_>>()).unwrap();
        assert_eq!(all.adjacency(), q3.adjacency());
        assert_eq!(
            induced_subgraph(&q3, &[]).unwrap_err(),
            GraphError::EmptyVertexSet
        );
    }

    #[test]
    fn corona_counts() {
        let k3 = Graph::complete(3).unwrap();
        let c = corona(&k3, &k3, MarkingScheme::Canonical).unwrap();
        assert_eq!(c.vertex_count(), 12);
        // k + (k + n)·n with k = 3 edges and n = 3 vertices
        assert_eq!(c.edge_count(), 3 + (3 + 3) * 3);
    }

    #[test]
    fn corona_block_form() {
        let mut g1 = Graph::new(3).unwrap();
        g1.add_edge(0, 1, 1.0, Sign::Minus).unwrap();
        g1.add_unit_edge(1, 2).unwrap();
        let g2 = Graph::complete(2).unwrap();
        let mu1 = vec![Sign::Plus, Sign::Minus, Sign::Plus];
        let mu2 = vec![Sign::Minus, Sign::Plus];
        let c = corona_with(&g1, &mu1, &g2, &mu2).unwrap();
        let (n, k) = (3, 2);
        let a = c.matrix(MatrixKind::Adjacency);
        let a1 = g1.adjacency();
        let a2 = g2.adjacency();
        let d1 = DMatrix::from_fn(n, n, |i, j| if i == j { mu1[i].value() } else { 0.0 });
        let m2 = DMatrix::from_fn(1, k, |_, j| mu2[j].value());
        let off = m2.kronecker(&d1);
        let bottom = a2.kronecker(&DMatrix::<f64>::identity(n, n));
        let mut expected = DMatrix::zeros(n * (k + 1), n * (k + 1));
        expected.view_mut((0, 0), (n, n)).copy_from(&a1);
        expected.view_mut((0, n), (n, n * k)).copy_from(&off);
        expected
            .view_mut((n, 0), (n * k, n))
            .copy_from(&off.transpose());
        expected.view_mut((n, n), (n * k, n * k)).copy_from(&bottom);
        assert_eq!(a, expected);
    }

    #[test]
    fn canonical_and_plurality_can_differ() {
        // vertex 1 has one negative and two positive edges
        let mut g = Graph::new(4).unwrap();
        g.add_edge(0, 1, 1.0, Sign::Minus).unwrap();
        g.add_unit_edge(1, 2).unwrap();
        g.add_unit_edge(1, 3).unwrap();
        let c = marking(&g, MarkingScheme::Canonical).unwrap();
        let p = marking(&g, MarkingScheme::Plurality).unwrap();
        assert_eq!(c[1], Sign::Minus);
        assert_eq!(p[1], Sign::Plus);
        assert_eq!(
            marking(&g, MarkingScheme::Explicit),
            Err(GraphError::MissingMarkings)
        );
    }

    #[test]
    fn plurality_tie_is_plus() {
        let mut g = Graph::new(3).unwrap();
        g.add_edge(0, 1, 1.0, Sign::Minus).unwrap();
        g.add_unit_edge(1, 2).unwrap();
        assert_eq!(
            marking(&g, MarkingScheme::Plurality).unwrap()[1],
            Sign::Plus
        );
    }
}
