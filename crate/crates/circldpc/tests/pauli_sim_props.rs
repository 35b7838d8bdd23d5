mod common;

use circldpc::circuit::GateSet;
use circldpc::codewords::{sigma_in, sigma_out, CodeSpaces};
use circldpc::pauli_sim::{conjugate_pauli, nu, run, verify_codeword_equation, Tableau};
use circldpc::tanner::build_plain;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn unitary_codewords_follow_conjugation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = common::circuit(&mut rng, 5, 8, GateSet::Unitary);
        let g = build_plain(&c);
        let sp = CodeSpaces::new(&g);
        for _ in 0..4 {
            let cw = common::random_combination(&mut rng, &sp.kernel);
            let mut got = conjugate_pauli(&c, &sigma_in(&g, &cw)).unwrap();
            let want = sigma_out(&g, &cw);
            prop_assert_eq!((&got.x, &got.z), (&want.x, &want.z));
            let minus = nu(&c, &g, &cw).unwrap();
            got.phase = (got.phase + want.phase) % 4;
            prop_assert_eq!(got.phase == 2, minus);
        }
    }

    #[test]
    fn tableau_stays_consistent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = common::circuit(&mut rng, 5, 10, GateSet::Full);
        let cut = rng.gen_range(0..=c.depth());
        let mut prefix = c.clone();
        prefix.layers.truncate(cut);
        let mut state = Tableau::random(c.n_qubits, &mut rng);
        prop_assert!(state.is_consistent());
        run(&prefix, &mut state, None, None, &mut rng).unwrap();
        prop_assert!(state.is_consistent());
    }

    #[test]
    fn codeword_equation_with_errors(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = common::circuit(&mut rng, 4, 6, GateSet::Full);
        let g = build_plain(&c);
        let sp = CodeSpaces::new(&g);
        let cw = common::random_combination(&mut rng, &sp.kernel);
        let e = common::random_vector(&mut rng, g.n_bits());
        verify_codeword_equation(&c, &g, &cw, Some(&e), &mut rng).unwrap();
    }
}
