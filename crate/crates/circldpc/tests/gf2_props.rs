use circldpc::gf2::{kernel_basis, rank, row_space_member, symplectic_product, BitMatrix, BitVector};
use proptest::prelude::*;

fn matrix() -> impl Strategy<Value = BitMatrix> {
    (0usize..8, 1usize..12).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(any::<bool>(), c), r)
            .prop_map(move |rows| BitMatrix::from_rows(c, rows.iter().map(|b| BitVector::from_bools(b)).collect()))
    })
}

fn symplectic(n: usize) -> impl Strategy<Value = BitVector> {
    proptest::collection::vec(any::<bool>(), 2 * n).prop_map(|b| BitVector::from_bools(&b))
}

proptest! {
    #[test]
    fn kernel_is_annihilated_and_complementary(m in matrix()) {
        let k = kernel_basis(&m);
        prop_assert!(m.mul_transpose(&k).is_zero());
        prop_assert_eq!(rank(&k) + rank(&m), m.n_cols());
        prop_assert_eq!(k.n_rows(), rank(&k));
    }

    #[test]
    fn rref_keeps_rank(m in matrix()) {
        let (r, pivots) = m.rref();
        prop_assert_eq!(rank(&r), rank(&m));
        prop_assert_eq!(pivots.len(), rank(&m));
        prop_assert_eq!(r.rref().0, r);
    }

    #[test]
    fn row_space_membership(m in matrix(), mask in any::<u8>()) {
        let mut v = BitVector::zeros(m.n_cols());
        for (i, r) in m.rows().iter().enumerate() {
            if mask >> (i % 8) & 1 == 1 {
                v.xor_assign(r);
            }
        }
        prop_assert!(row_space_member(&m, &v));
    }

    #[test]
    fn symplectic_form_is_bilinear_and_symmetric(n in 1usize..6, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || BitVector::from_bools(&(0..2 * n).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>());
        let (a, b, c) = (draw(), draw(), draw());
        let sp = |x: &BitVector, y: &BitVector| symplectic_product(x, y).unwrap();
        prop_assert_eq!(sp(&a, &b), sp(&b, &a));
        prop_assert_eq!(sp(&a.xor(&b), &c), sp(&a, &c) ^ sp(&b, &c));
        prop_assert!(!sp(&a, &a));
    }

    #[test]
    fn disjoint_supports_self_product_zero(v in symplectic(5)) {
        let n = 5;
        let mut w = v.clone();
        for i in 0..n {
            if w.get(i) {
                w.set(n + i, false);
            }
        }
        prop_assert!(!symplectic_product(&w, &w).unwrap());
    }

    #[test]
    fn text_and_alist_round_trip(m in matrix()) {
        prop_assert_eq!(BitMatrix::from_text(&m.to_text()).unwrap(), m.clone());
        prop_assert_eq!(BitMatrix::read_alist(m.to_alist().as_bytes()).unwrap(), m);
    }
}

#[test]
fn odd_length_symplectic_is_rejected() {
    assert!(symplectic_product(&BitVector::zeros(3), &BitVector::zeros(3)).is_err());
}
