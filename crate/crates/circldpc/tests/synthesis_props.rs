mod common;

use std::collections::BTreeSet;

use circldpc::circuit::GateSet;
use circldpc::synthesis::{greedy_partition, roundtrip_check, synthesize, trivial_partition, PathPartition, Vertex};
use circldpc::tanner::{build_plain, symmetrize, verify_symmetry, SymmetryWitness, TannerGraph};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn symmetric(seed: u64) -> (TannerGraph, SymmetryWitness) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = common::circuit(&mut rng, 4, 6, GateSet::Full);
    let s = symmetrize(&build_plain(&c), &c).unwrap();
    (s.graph, s.witness)
}

/// Edges between different paths, with each edge identified with its dual.
fn inter_path_edge_classes(g: &TannerGraph, w: &SymmetryWitness, p: &PathPartition) -> usize {
    let mut consecutive = BTreeSet::new();
    for path in &p.paths {
        for pair in path.vertices.windows(2) {
            consecutive.insert((pair[0].min(pair[1]), pair[0].max(pair[1])));
        }
    }
    let bit_dual = w.bit_dual(g.n_bits());
    let mut classes = BTreeSet::new();
    for (a, bits) in g.check_bits.iter().enumerate() {
        for &b in bits.iter().filter(|b| !w.long.contains(b)) {
            let (v, c) = (Vertex::Bit(b), Vertex::Check(a));
            if consecutive.contains(&(v.min(c), v.max(c))) {
                continue;
            }
            let edge = (b, a);
            let dual = (w.check_dual[a], bit_dual[b].expect("non-long bit has a dual"));
            classes.insert(edge.min(dual));
        }
    }
    classes.len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn trivial_partition_synthesis(seed in any::<u64>()) {
        let (g, w) = symmetric(seed);
        let p = trivial_partition(&g, &w).unwrap();
        let syn = synthesize(&g, &w, &p).unwrap();
        prop_assert!(syn.circuit.validate().is_empty());
        verify_symmetry(&syn.graph, &syn.witness).unwrap();
        syn.maps.verify(&g.check_matrix(), &syn.graph.check_matrix()).unwrap();
        prop_assert_eq!(syn.schedule.gate_count(), inter_path_edge_classes(&g, &w, &p));
        let r = roundtrip_check(&g, &w, &p, 4).unwrap();
        prop_assert!(r.ok(), "{r:?}");
    }

    #[test]
    fn greedy_partition_synthesis(seed in any::<u64>()) {
        let (g, w) = symmetric(seed);
        let p = greedy_partition(&g, &w, 4).unwrap();
        prop_assert!(p.n_qubits() <= trivial_partition(&g, &w).unwrap().n_qubits());
        let r = roundtrip_check(&g, &w, &p, 4).unwrap();
        prop_assert!(r.ok(), "{r:?}");
    }

    #[test]
    fn partitions_round_trip_through_text(seed in any::<u64>()) {
        let (g, w) = symmetric(seed);
        let p = greedy_partition(&g, &w, 3).unwrap();
        prop_assert_eq!(PathPartition::parse(&p.to_text(&g), &g).unwrap(), p);
    }
}
