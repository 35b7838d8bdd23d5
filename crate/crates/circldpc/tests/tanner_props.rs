mod common;

use circldpc::circuit::GateSet;
use circldpc::gf2::BitVector;
use circldpc::tanner::{bit_split, build_plain, random_symmetric_graph, symmetrize, verify_symmetry, SymmetryWitness, TannerGraph};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Edges of the subgraph left after deleting the long terminals.
fn deleted_edges(g: &TannerGraph, w: &SymmetryWitness) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (a, bits) in g.check_bits.iter().enumerate() {
        for &v in bits {
            if w.long.binary_search(&v).is_err() {
                out.push((v, a));
            }
        }
    }
    out.sort_unstable();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn plain_graphs_have_degree_at_most_three(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = common::circuit(&mut rng, 6, 10, GateSet::ZBasis);
        prop_assert!(build_plain(&c).max_degree() <= 3);
    }

    #[test]
    fn bit_split_preserves_code(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = common::circuit(&mut rng, 5, 8, GateSet::Full);
        let g = build_plain(&c);
        let nbrs = g.bit_checks();
        let Some(v) = (0..g.n_bits()).filter(|&v| nbrs[v].len() >= 2).collect::<Vec<_>>().choose(&mut rng).copied() else {
            return Ok(());
        };
        let mut checks = nbrs[v].clone();
        checks.shuffle(&mut rng);
        let cut = rng.gen_range(1..checks.len());
        let (n1, n2) = checks.split_at(cut);
        let (g2, map, _, _) = bit_split(&g, v, n1, n2).unwrap();
        let (a, a2) = (g.check_matrix(), g2.check_matrix());
        let k = a.kernel_basis();
        prop_assert_eq!(k.n_rows(), a2.kernel_basis().n_rows());
        map.verify(&a, &a2).unwrap();
        for _ in 0..20 {
            let cw = common::random_combination(&mut rng, &k);
            let e = common::random_vector(&mut rng, g.n_bits());
            let (cw2, e2) = (map.map_codeword(&cw), map.map_error(&e));
            prop_assert!(a2.mul_vec(&cw2).is_zero());
            prop_assert_eq!(cw.dot(&e), cw2.dot(&e2));
            prop_assert_eq!(e.weight(), e2.weight());
        }
    }

    #[test]
    fn dual_exchange_is_an_automorphism(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pairs = rng.gen_range(1..12);
        let (g, w) = random_symmetric_graph(&mut rng, pairs, 4, 3, 0.3);
        verify_symmetry(&g, &w).unwrap();
        let dual_of_bit = w.bit_dual(g.n_bits());
        let edges = deleted_edges(&g, &w);
        let mut swapped: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(v, a)| (w.check_dual[a], dual_of_bit[v].expect("non-long bit has a dual")))
            .collect();
        swapped.sort_unstable();
        prop_assert_eq!(swapped, edges);
    }
}

#[test]
fn symmetrize_random_circuits() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    for i in 0..1000 {
        let c = common::circuit(&mut rng, 6, 10, GateSet::Full);
        let g = build_plain(&c);
        let s = symmetrize(&g, &c).unwrap_or_else(|e| panic!("circuit {i}: {e}\n{c}"));
        verify_symmetry(&s.graph, &s.witness).unwrap_or_else(|e| panic!("circuit {i}: {e}\n{c}"));
        s.map.verify(&g.check_matrix(), &s.graph.check_matrix()).unwrap();
    }
}

#[test]
fn labels_round_trip() {
    let c = circldpc::circuit::parse_circuit(common::ZZ).unwrap();
    let g = build_plain(&c);
    let back = TannerGraph::from_matrix_and_labels(&g.check_matrix(), &g.labels_text()).unwrap();
    assert_eq!(back.labels_text(), g.labels_text());
    assert_eq!(back.meas_bits, g.meas_bits);
    let cnot = build_plain(&circldpc::circuit::parse_circuit("qubits 2\ncnot 1 2").unwrap());
    assert!(cnot.check_matrix().mul_vec(&BitVector::from_bits(&[1, 0, 0, 0, 1, 1, 0, 0])).is_zero());
}
