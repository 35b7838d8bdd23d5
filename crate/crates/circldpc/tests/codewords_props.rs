mod common;

use circldpc::circuit::{parse_circuit, GateSet};
use circldpc::codewords::{build_ec_structure, sigma_in, sigma_out, CodeSpaces, CodewordClass, PauliOperator};
use circldpc::gf2::{row_space_member, BitMatrix, BitVector};
use circldpc::tanner::{build_plain, TannerGraph};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn all_codewords(k: &BitMatrix) -> Vec<BitVector> {
    (0u32..1 << k.n_rows())
        .map(|mask| {
            let mut c = BitVector::zeros(k.n_cols());
            for (i, r) in k.rows().iter().enumerate() {
                if mask >> i & 1 == 1 {
                    c.xor_assign(r);
                }
            }
            c
        })
        .collect()
}

fn commutes_with_all(g: &TannerGraph, c: &BitVector, k: &BitMatrix) -> bool {
    let (i, o) = (sigma_in(g, c), sigma_out(g, c));
    k.rows().iter().all(|r| i.commutes_with(&sigma_in(g, r)) && o.commutes_with(&sigma_out(g, r)))
}

/// Random stabiliser generators: boundary operators of random checkers/detectors.
fn boundary_code(g: &TannerGraph, sp: &CodeSpaces, rng: &mut ChaCha8Rng, input: bool) -> Vec<PauliOperator> {
    let src = if input { &sp.c_cd } else { &sp.c_ce };
    let mut out: Vec<PauliOperator> = Vec::new();
    let n = g.n_qubits;
    for r in src.rows() {
        if !rng.gen_bool(0.6) {
            continue;
        }
        let p = if input { sigma_in(g, r) } else { sigma_out(g, r) };
        if p.is_identity() {
            continue;
        }
        let mut m = BitMatrix::from_rows(2 * n, out.iter().map(PauliOperator::symplectic).collect());
        if !row_space_member(&m, &p.symplectic()) {
            m.push_row(p.symplectic());
            out.push(p);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn class_algebra(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = common::circuit(&mut rng, 5, 8, GateSet::Full);
        let g = build_plain(&c);
        let sp = CodeSpaces::new(&g);
        let nz = |v: &BitVector| !v.is_zero();
        let checker = || common::random_combination(&mut ChaCha8Rng::seed_from_u64(seed ^ 1), &sp.c_c);
        let c1 = checker();
        let c2 = common::random_combination(&mut rng, &sp.c_c);
        if nz(&c1.xor(&c2)) {
            prop_assert_eq!(sp.classify(&c1.xor(&c2)).unwrap(), CodewordClass::Checker);
        }
        for d in sp.c_cd.rows() {
            if sp.classify(d).unwrap() == CodewordClass::Detector {
                prop_assert_eq!(sp.classify(&d.xor(&c2)).unwrap(), CodewordClass::Detector);
            }
        }
    }

    #[test]
    fn cde_space_is_the_commutant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = common::circuit(&mut rng, 4, 6, GateSet::Full);
        let g = build_plain(&c);
        let sp = CodeSpaces::new(&g);
        prop_assume!(sp.kernel.n_rows() <= 12);
        for cw in all_codewords(&sp.kernel) {
            let in_cde = row_space_member(&sp.c_cde, &cw);
            prop_assert_eq!(in_cde, commutes_with_all(&g, &cw, &sp.kernel));
        }
    }

    #[test]
    fn ec_structure_is_valid(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = common::circuit(&mut rng, 5, 8, GateSet::Full);
        let g = build_plain(&c);
        let sp = CodeSpaces::new(&g);
        let s_in = boundary_code(&g, &sp, &mut rng, true);
        let s_out = boundary_code(&g, &sp, &mut rng, false);
        let ec = build_ec_structure(&g, &s_in, &s_out).unwrap();
        let a = g.check_matrix();
        prop_assert!(a.mul_transpose(&ec.b).is_zero());
        prop_assert!(a.mul_transpose(&ec.l).is_zero());
        for i in 0..ec.b.n_rows() {
            for j in i + 1..ec.b.n_rows() {
                prop_assert!(sigma_in(&g, ec.b.row(i)).commutes_with(&sigma_in(&g, ec.b.row(j))));
                prop_assert!(sigma_out(&g, ec.b.row(i)).commutes_with(&sigma_out(&g, ec.b.row(j))));
            }
        }
        prop_assert!(ec.b.rank() + ec.l.rank() <= sp.kernel.rank());
    }
}

#[test]
fn zz_detector_plus_emitter_is_pseudo() {
    let g = build_plain(&parse_circuit(common::ZZ).unwrap());
    let sp = CodeSpaces::new(&g);
    let zz: PauliOperator = "ZZI".parse().unwrap();
    let words = all_codewords(&sp.kernel);
    let meas = |c: &BitVector| circldpc::codewords::relevant_measurements(&g, c);
    let det = words.iter().find(|c| sigma_in(&g, c) == zz && sigma_out(&g, c).is_identity() && meas(c) == [0]).unwrap();
    let em = words.iter().find(|c| sigma_in(&g, c).is_identity() && sigma_out(&g, c) == zz && meas(c) == [1]).unwrap();
    assert_eq!(sp.classify(&det.xor(em)).unwrap(), CodewordClass::PseudoPropagator);
}
