use super::*;
use crate::graph::corona;
use proptest::prelude::*;
use std::f64::consts::FRAC_PI_2;

fn example1() -> Graph {
    example_graph("example1").unwrap().unwrap().graph
}

fn sorted_values(pairs: &[EigenPair]) -> Vec<f64> {
    let mut v: Vec<f64> = pairs.iter().map(|p| p.value).collect();
    v.sort_by(f64::total_cmp);
    v
}

fn assert_spectrum_matches(pairs: &[EigenPair], product: &Graph, kind: MatrixKind) {
    let direct = Spectrum::of_graph(product, kind);
    assert_eq!(pairs.len(), direct.dim());
    for (a, b) in sorted_values(pairs).iter().zip(direct.values()) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
    let v = DMatrix::from_columns(&pairs.iter().map(|p| p.vector.clone()).collect::<Vec<_>>());
    let gram = v.transpose() * &v;
    assert!((gram - DMatrix::identity(pairs.len(), pairs.len())).amax() < 1e-9);
}

#[test]
fn net_regularity_cases() {
    assert_eq!(Graph::cycle(5).unwrap().net_regularity(), Some(2));
    assert_eq!(example1().net_regularity(), Some(0));
    let mut star = Graph::new(4).unwrap();
    for leaf in 1..4 {
        star.add_unit_edge(0, leaf).unwrap();
    }
    assert_eq!(star.net_regularity(), None);
}

#[test]
fn k2_with_single_vertex() {
    let k1 = Graph::new(1).unwrap();
    let k2 = Graph::complete(2).unwrap();
    let pairs = corona_adjacency_eigenpairs(&k2, &k1, MarkingScheme::Canonical).unwrap();
    let r5 = 5f64.sqrt();
    let expect = [
        (-1.0 - r5) / 2.0,
        (1.0 - r5) / 2.0,
        (-1.0 + r5) / 2.0,
        (1.0 + r5) / 2.0,
    ];
    for (a, b) in sorted_values(&pairs).iter().zip(expect) {
        assert!((a - b).abs() < 1e-12);
    }
    assert_spectrum_matches(
        &pairs,
        &corona(&k2, &k1, MarkingScheme::Canonical).unwrap(),
        MatrixKind::Adjacency,
    );
}

#[test]
fn signed_two_clique_self_corona() {
    let g = example1();
    let product = corona(&g, &g, MarkingScheme::Explicit).unwrap();
    let adj = corona_adjacency_eigenpairs(&g, &g, MarkingScheme::Explicit).unwrap();
    assert_eq!(adj.len(), 4 * 5);
    assert_spectrum_matches(&adj, &product, MatrixKind::Adjacency);
    let lap = corona_laplacian_eigenpairs(&g, &g, MarkingScheme::Explicit).unwrap();
    assert_spectrum_matches(&lap, &product, MatrixKind::Laplacian);
    for p in adj {
        assert!(p.residual(&product, MatrixKind::Adjacency).unwrap() <= 1e-8);
    }
}

#[test]
fn unsigned_laplacian_values() {
    let g1 = Graph::path(3).unwrap();
    let g2 = Graph::complete(3).unwrap();
    let pairs = corona_laplacian_eigenpairs(&g1, &g2, MarkingScheme::Canonical).unwrap();
    let k = 3.0;
    let base = Spectrum::of_graph(&g1, MatrixKind::Laplacian);
    let mut expect: Vec<f64> = base
        .values()
        .iter()
        .flat_map(|&l| {
            let r = ((1.0 - l - k).powi(2) + 4.0 * k).sqrt();
            [(1.0 + l + k + r) / 2.0, (1.0 + l + k - r) / 2.0]
        })
        .collect();
    // K3 Laplacian spectrum off the all-ones vector is {3, 3}, shifted by one
    expect.extend(std::iter::repeat_n(4.0, 6));
    expect.sort_by(f64::total_cmp);
    for (a, b) in sorted_values(&pairs).iter().zip(&expect) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn complete_triangle_self_corona() {
    let k3 = Graph::complete(3).unwrap();
    let product = corona(&k3, &k3, MarkingScheme::Canonical).unwrap();
    for kind in [MatrixKind::Adjacency, MatrixKind::Laplacian] {
        let pairs = theorem_eigenpairs(&k3, &k3, MarkingScheme::Canonical, kind).unwrap();
        assert_spectrum_matches(&pairs, &product, kind);
    }
}

#[test]
fn refuses_without_hypothesis() {
    let p3 = Graph::path(3).unwrap();
    let k2 = Graph::complete(2).unwrap();
    assert!(matches!(
        corona_adjacency_eigenpairs(&k2, &p3, MarkingScheme::Canonical),
        Err(CoronaError::Hypothesis(_))
    ));
    // P3's Laplacian annihilates the all-ones marking, so that theorem applies
    let lap = corona_laplacian_eigenpairs(&k2, &p3, MarkingScheme::Canonical).unwrap();
    assert_spectrum_matches(
        &lap,
        &corona(&k2, &p3, MarkingScheme::Canonical).unwrap(),
        MatrixKind::Laplacian,
    );
    let unmarked = Graph::cycle(4).unwrap();
    assert!(matches!(
        corona_adjacency_eigenpairs(&unmarked, &unmarked, MarkingScheme::Explicit),
        Err(CoronaError::Graph(GraphError::MissingMarkings))
    ));
    assert!(matches!(
        theorem_eigenpairs(
            &k2,
            &k2,
            MarkingScheme::Canonical,
            MatrixKind::SignlessLaplacian
        ),
        Err(CoronaError::UnsupportedKind)
    ));
}

#[test]
fn mixed_marking_hypothesis() {
    // a bipartite marking is an eigenvector of the even cycle's adjacency
    let mut c4 = Graph::cycle(4).unwrap();
    c4.set_markings(vec![Sign::Plus, Sign::Minus, Sign::Plus, Sign::Minus])
        .unwrap();
    let k2 = Graph::complete(2).unwrap();
    let mut k2m = k2.clone();
    k2m.set_markings(vec![Sign::Minus, Sign::Plus]).unwrap();
    let pairs = corona_adjacency_eigenpairs(&k2m, &c4, MarkingScheme::Explicit).unwrap();
    let product = corona(&k2m, &c4, MarkingScheme::Explicit).unwrap();
    assert_spectrum_matches(&pairs, &product, MatrixKind::Adjacency);
}

#[test]
fn iteration_counts() {
    let k3 = Graph::complete(3).unwrap();
    assert_eq!(
        iterate_corona(&k3, 0, MarkingScheme::Canonical)
            .unwrap()
            .vertex_count(),
        3
    );
    let g2 = iterate_corona(&k3, 2, MarkingScheme::Canonical).unwrap();
    assert_eq!(g2.vertex_count(), 48);
    assert_eq!(corona_vertex_count(3, 2), Some(48));
    assert_eq!(g2.edge_count(), corona_edge_count(3, 3, 2).unwrap());
    assert_eq!(g2.edge_count(), 93);
    for seed in [
        example1(),
        Graph::path(4).unwrap(),
        Graph::cycle(5).unwrap(),
    ] {
        for m in 0..=3 {
            let g = iterate_corona(&seed, m, MarkingScheme::Canonical).unwrap();
            let (n, e) = (seed.vertex_count(), seed.edge_count());
            assert_eq!(Some(g.vertex_count()), corona_vertex_count(n, m));
            assert_eq!(Some(g.edge_count()), corona_edge_count(n, e, m));
        }
    }
    assert!(matches!(
        iterate_corona(&k3, 6, MarkingScheme::Canonical),
        Err(CoronaError::TooLarge { .. })
    ));
}

#[test]
fn iterated_spectrum_matches_direct() {
    let g = example1();
    for kind in [MatrixKind::Adjacency, MatrixKind::Laplacian] {
        for m in 0..=2 {
            let (product, s, prov) =
                iterated_spectrum(&g, m, MarkingScheme::Explicit, kind).unwrap();
            assert_eq!(
                prov,
                if m == 0 {
                    Provenance::Direct
                } else {
                    Provenance::Theorem
                }
            );
            let direct = Spectrum::of_graph(&product, kind);
            for (a, b) in s.values().iter().zip(direct.values()) {
                assert!((a - b).abs() < 1e-8);
            }
            for t in [0.4, 1.9] {
                let x = s.amplitude(0, 2, t).unwrap();
                let y = direct.amplitude(0, 2, t).unwrap();
                assert!((x - y).norm() < 1e-9);
            }
        }
    }
    let (_, _, prov) = iterated_spectrum(
        &Graph::path(3).unwrap(),
        1,
        MarkingScheme::Canonical,
        MatrixKind::Adjacency,
    )
    .unwrap();
    assert_eq!(prov, Provenance::Direct);
}

#[test]
fn two_clique_fidelity_decays() {
    let g = example1();
    let table = fidelity_vs_m(
        &g,
        &[(0, 2), (1, 3)],
        2,
        MatrixKind::Adjacency,
        MarkingScheme::Explicit,
        SCAN_T_MAX,
    )
    .unwrap();
    let at = |m: u32, u: usize| table.rows.iter().find(|r| r.m == m && r.from == u).unwrap();
    for u in [0, 1] {
        let r0 = at(0, u);
        assert!(r0.fidelity > 1.0 - 1e-12);
        assert!((r0.time - FRAC_PI_2).abs() < 1e-6);
        assert!(at(1, u).fidelity < 1.0 - 1e-3);
    }
    assert!(fidelity_vs_m(
        &g,
        &[(0, 7)],
        1,
        MatrixKind::Adjacency,
        MarkingScheme::Explicit,
        1.0
    )
    .is_err());
}

#[test]
fn laplacian_corona_has_no_pst() {
    let table = fidelity_vs_m(
        &Graph::complete(2).unwrap(),
        &[(0, 1)],
        1,
        MatrixKind::Laplacian,
        MarkingScheme::Canonical,
        SCAN_T_MAX,
    )
    .unwrap();
    assert!(table.rows[0].fidelity > 1.0 - 1e-9);
    assert!(table.rows[1].fidelity < 1.0 - 1e-6);
}

#[test]
fn example_files() {
    let all = example_graphs().unwrap();
    let flags: Vec<(&str, bool)> = all.iter().map(|e| (e.name, e.approx)).collect();
    assert_eq!(
        flags,
        vec![("example1", false), ("example8", true), ("example10", true)]
    );
    let g = example1();
    assert_eq!(
        marking(&g, MarkingScheme::Canonical).unwrap(),
        vec![Sign::Minus; 4]
    );
    assert_eq!(g.markings().unwrap(), &[Sign::Minus; 4]);
    assert!(crate::graph::balance(&g).balanced);
}

fn connected_unsigned(n: usize, bits: &[bool]) -> Graph {
    let mut g = Graph::path(n).unwrap();
    let mut k = 0;
    for i in 0..n {
        for j in i + 2..n {
            if bits[k] {
                g.add_unit_edge(i, j).unwrap();
            }
            k += 1;
        }
    }
    g
}

#[test]
fn laplacian_audit_random_seeds() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let n = rng.gen_range(2..=5);
        let bits: Vec<bool> = (0..10).map(|_| rng.gen_bool(0.4)).collect();
        let seed = connected_unsigned(n, &bits);
        let audit = laplacian_no_pst_audit(&seed, MarkingScheme::Canonical, 50.0).unwrap();
        assert_eq!(audit.pairs, {
            let v = n * (n + 1);
            v * (v - 1) / 2
        });
        assert!(audit.best_fidelity < 1.0 - 1e-6, "{audit:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn theorem_spectrum_is_complete(n in 1usize..5, k in 1usize..5, b1 in prop::collection::vec(any::<bool>(), 6), s1 in prop::collection::vec(any::<bool>(), 6), cyc in any::<bool>()) {
        let mut g1 = Graph::new(n).unwrap();
        let mut idx = 0;
        for i in 0..n {
            for j in i + 1..n {
                if b1[idx] {
                    g1.add_edge(i, j, 1.0, if s1[idx] { Sign::Plus } else { Sign::Minus }).unwrap();
                }
                idx += 1;
            }
        }
        // complete graphs and cycles are regular, so uniform markings qualify
        let g2 = if cyc && k >= 3 { Graph::cycle(k).unwrap() } else { Graph::complete(k).unwrap() };
        let product = corona(&g1, &g2, MarkingScheme::Plurality).unwrap();
        for kind in [MatrixKind::Adjacency, MatrixKind::Laplacian] {
            let pairs = theorem_eigenpairs(&g1, &g2, MarkingScheme::Plurality, kind).unwrap();
            prop_assert_eq!(pairs.len(), n * (k + 1));
            let direct = Spectrum::of_graph(&product, kind);
            for (a, b) in sorted_values(&pairs).iter().zip(direct.values()) {
                prop_assert!((a - b).abs() < 1e-8);
            }
        }
    }
}
