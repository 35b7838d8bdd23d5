mod common;

use circldpc::css::{assemble_physical, cross_validate, derive_logicals, logical_cnot_layer, repeated_measurement_layer, CssCode};
use circldpc::distance::{circuit_distance, css_distance};
use circldpc::gf2::BitMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn independent(m: &BitMatrix) -> BitMatrix {
    let mut out = BitMatrix::zeros(0, m.n_cols());
    for r in m.rref().0.rows() {
        if !r.is_zero() {
            out.push_row(r.clone());
        }
    }
    out
}

fn random_code(rng: &mut ChaCha8Rng) -> CssCode {
    let n = rng.gen_range(2..=6);
    let rows = rng.gen_range(0..=2);
    let gx = common::random_matrix(rng, rows, n);
    let ker = gx.kernel_basis();
    let mut gz = BitMatrix::zeros(0, n);
    for _ in 0..rng.gen_range(0..=2) {
        gz.push_row(common::random_combination(rng, &ker));
    }
    derive_logicals(&independent(&gx), &independent(&gz)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn logicals_are_dual_bases(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = random_code(&mut rng);
        prop_assert_eq!(code.k, code.n - code.r_x - code.r_z);
        prop_assert!(code.gx.mul_transpose(&code.jz).is_zero());
        prop_assert!(code.gz.mul_transpose(&code.jx).is_zero());
        prop_assert_eq!(code.jx.mul_transpose(&code.jz), BitMatrix::identity(code.k));
    }

    #[test]
    fn closed_form_agrees_with_generic_construction(seed in any::<u64>(), m in 1usize..=3, cnot in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = random_code(&mut rng);
        let layer = if cnot { logical_cnot_layer() } else { repeated_measurement_layer(m).unwrap() };
        let p = assemble_physical(&code, &layer).unwrap();
        prop_assert!(p.a.mul_transpose(&p.b).is_zero());
        prop_assert!(p.a.mul_transpose(&p.l).is_zero());
        prop_assert!(cross_validate(&code, &layer, &p).unwrap());
    }

    #[test]
    fn circuit_distance_at_most_code_distance(seed in any::<u64>(), m in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let code = random_code(&mut rng);
        prop_assume!(code.k > 0);
        let p = assemble_physical(&code, &repeated_measurement_layer(m).unwrap()).unwrap();
        let d = circuit_distance(&p.b, &p.l, code.n).unwrap().value.exact().unwrap();
        let d_css = css_distance(&code.gx, &code.gz, code.n).unwrap().d_css.exact().unwrap();
        prop_assert!(d >= 1 && d <= d_css, "d={d} d_css={d_css}");
    }
}
