mod common;

use actorseg::maxflow::{FlowNetwork, Side};
use common::{sides_to_bool, ArcList};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn flow_equals_enumerated_min_cut(seed in any::<u64>(), n in 1usize..=9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arcs = ArcList::random(&mut rng, n);
        let mut g = arcs.network();
        let flow = g.max_flow();
        let best = arcs.brute_min_cut();
        prop_assert!((flow - best).abs() < 1e-9, "flow {flow} vs cut {best}");
        // the reported cut is a minimum one
        let reported = arcs.cut(&sides_to_bool(&g.cut()));
        prop_assert!((reported - flow).abs() < 1e-9);
    }

    #[test]
    fn flow_is_conserved_and_feasible(seed in any::<u64>(), n in 1usize..=10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let arcs = ArcList::random(&mut rng, n);
        let mut g = arcs.network();
        let flow = g.max_flow();
        let mut balance = vec![0.0; n];
        let mut out_of_source = 0.0;
        for (i, &(s, t)) in arcs.terminals.iter().enumerate() {
            let (fs, ft) = g.terminal_flow(i);
            prop_assert!(fs >= -1e-9 && fs <= s + 1e-9);
            prop_assert!(ft >= -1e-9 && ft <= t + 1e-9);
            balance[i] += fs - ft;
            out_of_source += fs;
        }
        for (k, &(i, j, c, r)) in arcs.arcs.iter().enumerate() {
            let f = g.edge_flow(k);
            prop_assert!(f <= c + 1e-9 && -f <= r + 1e-9);
            balance[i] -= f;
            balance[j] += f;
        }
        for b in balance {
            prop_assert!(b.abs() < 1e-9);
        }
        prop_assert!((out_of_source - flow).abs() < 1e-9);
    }
}

#[test]
fn single_arc_chain() {
    let mut g = FlowNetwork::new(2);
    g.add_terminal(0, 3.0, 0.0);
    g.add_terminal(1, 0.0, 2.0);
    g.add_edge(0, 1, 1.5, 0.0);
    assert!((g.max_flow() - 1.5).abs() < 1e-12);
    assert_eq!(g.cut(), vec![Side::Source, Side::Sink]);
}

#[test]
fn repeated_solves_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let arcs = ArcList::random(&mut rng, 8);
    let mut g = arcs.network();
    let a = g.max_flow();
    let b = g.max_flow();
    assert_eq!(a, b);
}

#[test]
fn cleared_network_is_reusable() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut g = FlowNetwork::new(0);
    for _ in 0..20 {
        let arcs = ArcList::random(&mut rng, 7);
        g.clear(arcs.n);
        for (i, &(s, t)) in arcs.terminals.iter().enumerate() {
            g.add_terminal(i, s, t);
        }
        for &(i, j, c, r) in &arcs.arcs {
            g.add_edge(i, j, c, r);
        }
        assert!((g.max_flow() - arcs.brute_min_cut()).abs() < 1e-9);
    }
}
