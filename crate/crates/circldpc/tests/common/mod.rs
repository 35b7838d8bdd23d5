#![allow(dead_code)]

use circldpc::circuit::{random_circuit, Circuit, GateSet};
use circldpc::distance::DistanceValue;
use circldpc::gf2::{BitMatrix, BitVector};
use rand::Rng;

/// The [[2,1,1]] code under two rounds of ZZ measurement through ancilla 3.
pub const ZZ: &str = "qubits 3\nrz 3\ntick\ncnot 1 3\ntick\ncnot 2 3\ntick\nmz 3\ntick\nrz 3\ntick\ncnot 1 3\ntick\ncnot 2 3\ntick\nmz 3\ntick\n";

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> BitMatrix {
    let mut m = BitMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            if rng.gen_bool(0.4) {
                m.set(r, c, true);
            }
        }
    }
    m
}

pub fn random_combination<R: Rng>(rng: &mut R, basis: &BitMatrix) -> BitVector {
    let mut v = BitVector::zeros(basis.n_cols());
    for r in basis.rows() {
        if rng.gen_bool(0.5) {
            v.xor_assign(r);
        }
    }
    v
}

pub fn random_vector<R: Rng>(rng: &mut R, n: usize) -> BitVector {
    BitVector::from_bools(&(0..n).map(|_| rng.gen_bool(0.3)).collect::<Vec<_>>())
}

/// Random circuit with `1..=max_n` qubits and `1..=max_t` layers.
pub fn circuit<R: Rng>(rng: &mut R, max_n: usize, max_t: usize, set: GateSet) -> Circuit {
    let n = rng.gen_range(1..=max_n);
    let t = rng.gen_range(1..=max_t);
    random_circuit(rng, n, t, set)
}

/// Orders distances; a lower bound past the search cap counts as larger.
pub fn key(d: DistanceValue) -> usize {
    match d {
        DistanceValue::Exact(d) | DistanceValue::LowerBound(d) => d,
        DistanceValue::NoLogicalErrors => usize::MAX,
    }
}

pub fn same_span(a: &BitMatrix, b: &BitMatrix) -> bool {
    let r = BitMatrix::vstack(&[a, b]).unwrap().rank();
    r == a.rank() && r == b.rank()
}
