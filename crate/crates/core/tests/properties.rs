use std::collections::BTreeMap;

use dynexplore::exploration::ExpAlgo;
use dynexplore::runtime::{sequential_ids, step_round, CommSpec, Configuration, Radius};
use dynexplore::tvg::{check_connectivity_time, check_interval_connectivity, NodeId, Snapshot};
use dynexplore::verification::{check_conservation, monitor_hole_dynamics};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn snapshot(n: usize, mask: &[bool], seed: u64) -> Snapshot {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .zip(mask.iter().cycle())
        .filter_map(|(e, &keep)| keep.then_some(e))
        .collect();
    Snapshot::with_random_ports(n, &pairs, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

fn arb_snapshot() -> impl Strategy<Value = Snapshot> {
    (2usize..10, prop::collection::vec(any::<bool>(), 1..45), any::<u64>())
        .prop_map(|(n, mask, seed)| snapshot(n, &mask, seed))
}

fn arb_instance() -> impl Strategy<Value = (Snapshot, Vec<usize>)> {
    arb_snapshot().prop_flat_map(|s| {
        let n = s.n();
        (Just(s), prop::collection::vec(0usize..4, n))
    })
}

proptest! {
    #[test]
    fn ports_are_a_bijection(s in arb_snapshot()) {
        prop_assert!(s.validate().is_ok());
        for v in (0..s.n()).map(NodeId) {
            let mut ports: Vec<usize> = s.ports(v).iter().map(|&(p, _)| p).collect();
            ports.sort();
            prop_assert_eq!(ports, (0..s.degree(v)).collect::<Vec<_>>());
            for &(p, u) in s.ports(v) {
                prop_assert_eq!(s.neighbor(v, p), Some(u));
                let back = s.port_to(u, v).unwrap();
                prop_assert_eq!(s.neighbor(u, back), Some(v));
            }
        }
    }

    #[test]
    fn edge_text_round_trips(s in arb_snapshot()) {
        let back = Snapshot::decode_edges(s.n(), &s.encode_edges()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn window_one_means_every_snapshot_connected(seq in prop::collection::vec(arb_snapshot(), 1..6)) {
        let n = seq[0].n();
        let seq: Vec<Snapshot> = seq.into_iter().filter(|s| s.n() == n).collect();
        let each = seq.iter().all(Snapshot::is_connected);
        prop_assert_eq!(check_interval_connectivity(&seq, 1).unwrap(), each);
        prop_assert_eq!(check_connectivity_time(&seq, 1).unwrap(), each);
    }

    #[test]
    fn interval_implies_connectivity_time(seq in prop::collection::vec(arb_snapshot(), 2..8), t in 1usize..4) {
        let n = seq[0].n();
        let seq: Vec<Snapshot> = seq.into_iter().filter(|s| s.n() == n).collect();
        prop_assume!(seq.len() >= t);
        if check_interval_connectivity(&seq, t).unwrap() {
            prop_assert!(check_connectivity_time(&seq, t).unwrap());
        }
    }

    #[test]
    fn distances_are_symmetric(s in arb_snapshot()) {
        let all: Vec<Vec<Option<usize>>> = (0..s.n()).map(|v| s.distances_from(NodeId(v))).collect();
        for (u, row) in all.iter().enumerate() {
            prop_assert_eq!(row[u], Some(0));
            for (v, d) in row.iter().enumerate() {
                prop_assert_eq!(*d, all[v][u]);
            }
        }
    }

    #[test]
    fn exploration_round_conserves_and_follows_hole_dynamics((s, counts) in arb_instance()) {
        let total: usize = counts.iter().sum();
        let before = Configuration::from_counts(&counts, &sequential_ids(total)).unwrap();
        let spec = CommSpec::new(Radius::Hops(1), Radius::Unbounded);
        let out = step_round(0, &s, &before, &BTreeMap::new(), &ExpAlgo, &spec).unwrap();
        prop_assert!(check_conservation(&s, &before, &out.moves, &out.next).is_ok());
        prop_assert_eq!(monitor_hole_dynamics(&s, &before, &out.next), vec![]);
    }
}
