use super::*;
use crate::spectral::basis_state;

fn lab(s: &str) -> BitLabel {
    s.parse().unwrap()
}

#[test]
fn subhypercube_q8_example() {
    let plan = find_subhypercube(&lab("00101101"), &lab("10011000")).unwrap();
    assert_eq!(plan.fixed_positions, vec![1, 4, 6]);
    assert_eq!(plan.fixed_bits, vec![0, 1, 0]);
    assert_eq!(plan.sub_dimension, 5);
    assert_eq!(plan.off_edge_count, off_edge_count(8, 5));
    let keep = plan.keep_labels().unwrap();
    assert_eq!(keep.len(), 32);
    assert!(keep
        .iter()
        .all(|l| l.bit(1).unwrap() == 0 && l.bit(4).unwrap() == 1 && l.bit(6).unwrap() == 0));
}

#[test]
fn subhypercube_small_cases() {
    let plan = find_subhypercube(&lab("000"), &lab("111")).unwrap();
    assert_eq!(plan.sub_dimension, 3);
    assert_eq!(plan.off_edge_count, 0);
    let plan = find_subhypercube(&lab("010"), &lab("011")).unwrap();
    assert_eq!(plan.sub_dimension, 1);
    assert_eq!(plan.keep_labels().unwrap(), vec![lab("010"), lab("011")]);
    assert!(matches!(
        find_subhypercube(&lab("01"), &lab("01")),
        Err(RoutingError::SameVertex)
    ));
    assert!(find_subhypercube(&lab("01"), &lab("011")).is_err());
}

#[test]
fn off_edge_counts_match_enumeration() {
    for k in 1..=6u32 {
        let host = Graph::hypercube(k).unwrap();
        for i in 1..=k {
            let u = BitLabel::new(0, k as u8).unwrap();
            let v = BitLabel::new((1u64 << i) - 1, k as u8).unwrap();
            let plan = find_subhypercube(&u, &v).unwrap();
            let keep: Vec<usize> = plan
                .keep_labels()
                .unwrap()
                .iter()
                .map(|l| l.bits() as usize)
                .collect();
            let (sub, _) = induced_subgraph(&host, &keep).unwrap();
            assert_eq!(
                plan.off_edge_count as usize,
                host.edge_count() - sub.edge_count(),
                "k={k} i={i}"
            );
        }
    }
    assert_eq!(off_edge_count(3, 1), 11);
}

#[test]
fn network_structure() {
    let net = RoutingNetwork::build(31).unwrap();
    assert_eq!(net.width(), 5);
    let dims: Vec<u32> = net.blocks().iter().map(|b| b.dim).collect();
    assert_eq!(dims, vec![4, 3, 2, 1, 0]);
    for n in 2..=70 {
        let net = RoutingNetwork::build(n).unwrap();
        assert_eq!(
            net.graph().edge_count() as u64,
            network_edge_count(n),
            "n={n}"
        );
        assert!(net.graph().is_connected());
    }
    assert!(matches!(
        RoutingNetwork::build(1),
        Err(RoutingError::TooSmall(1))
    ));
}

#[test]
fn later_blocks_have_one_neighbour_per_earlier_block() {
    let net = RoutingNetwork::build(45).unwrap();
    for (j, b) in net.blocks().iter().enumerate() {
        for x in b.start..b.start + b.len() {
            for (i, earlier) in net.blocks()[..j].iter().enumerate() {
                let nbrs: Vec<usize> = net
                    .graph()
                    .neighbors(x)
                    .into_iter()
                    .filter(|&y| earlier.contains(y))
                    .collect();
                assert_eq!(nbrs, vec![x - (1 << net.blocks()[i].dim)]);
            }
        }
    }
}

#[test]
fn growth_and_widening() {
    let q2 = RoutingNetwork::build(4).unwrap();
    assert_eq!(q2.width(), 3);
    let grown = q2.grow().unwrap();
    assert_eq!(grown.size(), 5);
    assert_eq!(grown.label(4).unwrap(), lab("100"));
    assert_eq!(grown.graph().neighbors(4), vec![0]);

    let mut net = RoutingNetwork::build(8).unwrap();
    while net.size() < 16 {
        net = net.grow().unwrap();
    }
    assert!(matches!(net.grow(), Err(RoutingError::Capacity { .. })));
    let q4 = Graph::hypercube(4).unwrap();
    assert_eq!(net.graph().adjacency(), q4.adjacency());

    let wide = net.widened().unwrap();
    assert_eq!(wide.width(), 5);
    assert_eq!(wide.graph().adjacency(), q4.adjacency());
    assert_eq!(wide.grow().unwrap().graph().neighbors(16), vec![0]);

    for n in 2..40 {
        let a = RoutingNetwork::build(n).unwrap();
        let b = RoutingNetwork::build(n + 1).unwrap();
        if a.width() == b.width() {
            assert_eq!(a.grow().unwrap().graph().adjacency(), b.graph().adjacency());
        }
    }
}

#[test]
fn route_31_vertices() {
    let net = RoutingNetwork::build(31).unwrap();
    let (u, w) = (0b10100, 0b01011);
    let plan = net.plan_route(u, w).unwrap();
    assert_eq!(plan.hops.len(), 2);
    assert_eq!(plan.intermediate, Some(0b00100));
    assert_eq!(plan.hops[0].kind, HopKind::Bridge);
    assert_eq!(plan.hops[1].kind, HopKind::Cube);
    assert!((plan.total_time - std::f64::consts::PI).abs() < 1e-15);
    assert_eq!(net.swap_baseline(u, w).unwrap(), 5);

    let out = net
        .execute_route(&plan, &basis_state(31, u), SwitchLag::Instant)
        .unwrap();
    assert!(out.report.pass, "magnitude {}", out.report.magnitude);
    assert!(out.untouched_max < 1e-12);
}

#[test]
fn route_three_vertex_path() {
    let net = RoutingNetwork::build(3).unwrap();
    assert_eq!(net.graph().edge_count(), 2);
    for (u, w) in [(0, 2), (2, 1), (1, 2), (0, 1)] {
        let plan = net.plan_route(u, w).unwrap();
        let out = net
            .execute_route(&plan, &basis_state(3, u), SwitchLag::Instant)
            .unwrap();
        assert!(out.report.pass, "{u}->{w}: {}", out.report.magnitude);
    }
}

#[test]
fn route_all_pairs_small_networks() {
    for n in 2..=20 {
        let net = RoutingNetwork::build(n).unwrap();
        for u in 0..n {
            for w in 0..n {
                if u == w {
                    continue;
                }
                let plan = net.plan_route(u, w).unwrap();
                assert!(plan.hops.len() <= 2);
                let out = net
                    .execute_route(&plan, &basis_state(n, u), SwitchLag::Instant)
                    .unwrap();
                assert!(out.report.pass, "n={n} {u}->{w}: {}", out.report.magnitude);
            }
        }
    }
}

#[test]
fn block_evolution_matches_embedded_adjacency() {
    let net = RoutingNetwork::build(13).unwrap();
    let plan = net.plan_route(12, 5).unwrap();
    let mut state = basis_state(13, 12);
    for hop in &plan.hops {
        let s = Spectrum::new(&net.hop_adjacency(hop)).unwrap();
        state = s.evolve(&state, hop.duration).unwrap();
    }
    let out = net
        .execute_route(&plan, &basis_state(13, 12), SwitchLag::Instant)
        .unwrap();
    for v in 0..13 {
        assert!((state[v] - out.state[v]).norm() < 1e-10);
    }
}

#[test]
fn hop_adjacencies_do_not_commute() {
    let net = RoutingNetwork::build(31).unwrap();
    let plan = net.plan_route(0b10100, 0b01011).unwrap();
    let a = net.hop_adjacency(&plan.hops[0]);
    let b = net.hop_adjacency(&plan.hops[1]);
    assert!((&a * &b - &b * &a).amax() > 0.5);
}

#[test]
fn switching_lag() {
    let net = RoutingNetwork::build(31).unwrap();
    let plan = net.plan_route(0b10100, 0b01011).unwrap();
    let psi = basis_state(31, 0b10100);
    let idle = net
        .execute_route(&plan, &psi, SwitchLag::Idle(0.3))
        .unwrap();
    assert!(idle.report.pass);
    assert!((idle.report.time - plan.total_time - 0.3).abs() < 1e-12);
    let coupled = net
        .execute_route(&plan, &psi, SwitchLag::FullNetwork(0.3))
        .unwrap();
    assert!(!coupled.report.pass);
    let norm: f64 = coupled.state.iter().map(|a| a.norm_sqr()).sum();
    assert!((norm - 1.0).abs() < 1e-10);
}

#[test]
fn execute_rejects_bad_input() {
    let net = RoutingNetwork::build(5).unwrap();
    let plan = net.plan_route(0, 4).unwrap();
    assert!(matches!(
        net.execute_route(&plan, &basis_state(5, 1), SwitchLag::Instant),
        Err(RoutingError::InputNotAtSource(0))
    ));
    assert!(net
        .execute_route(&plan, &basis_state(6, 0), SwitchLag::Instant)
        .is_err());
    assert!(net.plan_route(0, 9).is_err());
    assert_eq!(net.plan_route(2, 2).unwrap().hops.len(), 0);
}

#[test]
fn neighborhood_classes() {
    let net = RoutingNetwork::build(31).unwrap();
    let nb = net.classify_neighborhood(0b11110).unwrap();
    // 11111 is missing from the 31-vertex network
    assert_eq!(nb.counts(), [4, 10, 10, 5]);
    let full = RoutingNetwork::build(32).unwrap();
    let nb = full.classify_neighborhood(0).unwrap();
    assert_eq!(nb.counts(), [5, 10, 10, 5]);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn every_route_transfers(n in 2usize..=64, a in 0usize..64, b in 0usize..64) {
            let (u, w) = (a % n, b % n);
            prop_assume!(u != w);
            let net = RoutingNetwork::build(n).unwrap();
            let plan = net.plan_route(u, w).unwrap();
            prop_assert!(plan.hops.len() <= 2);
            let out = net.execute_route(&plan, &basis_state(n, u), SwitchLag::Instant).unwrap();
            prop_assert!(out.report.pass);
            prop_assert!(out.untouched_max < 1e-12);
        }

        #[test]
        fn endpoints_are_antipodal_in_their_subcube(k in 1u8..10, x in any::<u64>(), y in any::<u64>()) {
            let mask = (1u64 << k) - 1;
            let (u, v) = (BitLabel::new(x & mask, k).unwrap(), BitLabel::new(y & mask, k).unwrap());
            prop_assume!(u != v);
            let plan = find_subhypercube(&u, &v).unwrap();
            prop_assert_eq!(plan.sub_dimension, u.hamming(&v).unwrap());
            let keep = plan.keep_labels().unwrap();
            prop_assert!(keep.contains(&u) && keep.contains(&v));
        }
    }
}
