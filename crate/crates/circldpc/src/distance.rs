//! Circuit code distance and CSS code distance by capped exhaustive search.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::gf2::{binomial, combination_rank, first_combination_from, BitMatrix, BitVector};

pub const DEFAULT_MAX_WEIGHT: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceValue {
    Exact(usize),
    /// No logical error up to the cap; the distance is at least `cap + 1`.
    LowerBound(usize),
    /// `L` is empty, so no error is logical.
    NoLogicalErrors,
}

impl DistanceValue {
    #[must_use]
    pub fn exact(self) -> Option<usize> {
        match self {
            DistanceValue::Exact(d) => Some(d),
            _ => None,
        }
    }

    /// Ordering key: exact values by size, bounds after any smaller exact value.
    fn key(self) -> usize {
        match self {
            DistanceValue::Exact(d) | DistanceValue::LowerBound(d) => d,
            DistanceValue::NoLogicalErrors => usize::MAX,
        }
    }
}

impl fmt::Display for DistanceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceValue::Exact(d) => write!(f, "{d}"),
            DistanceValue::LowerBound(d) => write!(f, ">= {d}"),
            DistanceValue::NoLogicalErrors => write!(f, "none (no logical errors)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceResult {
    pub value: DistanceValue,
    /// A minimum-weight logical error, lexicographically first among them.
    pub witness: Option<BitVector>,
    pub max_weight: usize,
    /// Number of candidate errors a sequential scan would have visited.
    pub enumerated: u128,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DistanceError {
    #[error("matrices have {0} and {1} columns")]
    Shape(usize, usize),
    #[error("G_X·G_Zᵀ ≠ 0")]
    NotOrthogonal,
    #[error("witness failed re-verification")]
    BadWitness,
}

/// `min |e|` over `e ∈ ker B` with `L·eᵀ ≠ 0`, searched up to `max_weight`.
pub fn circuit_distance(b: &BitMatrix, l: &BitMatrix, max_weight: usize) -> Result<DistanceResult, DistanceError> {
    if b.n_cols() != l.n_cols() {
        return Err(DistanceError::Shape(b.n_cols(), l.n_cols()));
    }
    let n = b.n_cols();
    if l.n_rows() == 0 || l.is_zero() {
        return Ok(DistanceResult { value: DistanceValue::NoLogicalErrors, witness: None, max_weight, enumerated: 0 });
    }
    let bt = b.transpose();
    let lt = l.transpose();
    let nb = b.n_rows();
    let syndromes: Vec<BitVector> = (0..n).map(|j| bt.row(j).concat(lt.row(j))).collect();
    let nb_idx: Vec<usize> = (0..nb).collect();
    let nl_idx: Vec<usize> = (nb..nb + l.n_rows()).collect();
    let accept = |_: &[usize], s: &BitVector| s.select(&nb_idx).is_zero() && !s.select(&nl_idx).is_zero();
    let mut visited: u128 = 0;
    for w in 1..=max_weight.min(n) {
        let hit = (0..=n - w).into_par_iter().find_map_first(|first| first_combination_from(&syndromes, w, first, &accept).0);
        if let Some(idx) = hit {
            let witness = BitVector::from_support(n, &idx);
            if !b.mul_vec(&witness).is_zero() || l.mul_vec(&witness).is_zero() {
                return Err(DistanceError::BadWitness);
            }
            visited += combination_rank(n, &idx) + 1;
            return Ok(DistanceResult { value: DistanceValue::Exact(w), witness: Some(witness), max_weight, enumerated: visited });
        }
        visited += binomial(n, w);
    }
    Ok(DistanceResult { value: DistanceValue::LowerBound(max_weight + 1), witness: None, max_weight, enumerated: visited })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssDistance {
    /// Errors undetected by `G_X` and outside `rowsp(G_Z)`.
    pub d_x: DistanceResult,
    /// Errors undetected by `G_Z` and outside `rowsp(G_X)`.
    pub d_z: DistanceResult,
    pub d_css: DistanceValue,
}

pub fn css_distance(gx: &BitMatrix, gz: &BitMatrix, max_weight: usize) -> Result<CssDistance, DistanceError> {
    if gx.n_cols() != gz.n_cols() {
        return Err(DistanceError::Shape(gx.n_cols(), gz.n_cols()));
    }
    if !gx.mul_transpose(gz).is_zero() {
        return Err(DistanceError::NotOrthogonal);
    }
    let d_x = circuit_distance(gx, &gz.kernel_basis(), max_weight)?;
    let d_z = circuit_distance(gz, &gx.kernel_basis(), max_weight)?;
    let d_css = if d_x.value.key() <= d_z.value.key() { d_x.value } else { d_z.value };
    Ok(CssDistance { d_x, d_z, d_css })
}

/// `⌈d/2⌉`: single-qubit errors needed to cause a logical error.
#[must_use]
pub fn half_distance_bound(d: usize) -> usize {
    d.div_ceil(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamming() -> BitMatrix {
        BitMatrix::from_strs(&["1010101", "0110011", "0001111"])
    }

    /// Oracle: scan all 2^n vectors.
    fn brute(b: &BitMatrix, l: &BitMatrix) -> Option<usize> {
        let n = b.n_cols();
        (1u32..1 << n)
            .map(|m| BitVector::from_support(n, &(0..n).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>()))
            .filter(|e| b.mul_vec(e).is_zero() && !l.mul_vec(e).is_zero())
            .map(|e| e.weight())
            .min()
    }

    #[test]
    fn steane() {
        let h = hamming();
        let r = css_distance(&h, &h, 6).unwrap();
        assert_eq!(r.d_css, DistanceValue::Exact(3));
        assert_eq!(brute(&h, &h.kernel_basis()), Some(3));
        assert_eq!(r.d_x.witness.as_ref().unwrap().weight(), 3);
    }

    #[test]
    fn two_qubit_code() {
        let gx = BitMatrix::empty(2);
        let gz = BitMatrix::from_strs(&["11"]);
        let r = css_distance(&gx, &gz, 6).unwrap();
        assert_eq!(r.d_css, DistanceValue::Exact(1));
        assert_eq!(r.d_z.value, DistanceValue::Exact(2));
    }

    #[test]
    fn repetition() {
        let gz = BitMatrix::from_strs(&["110", "011"]);
        let gx = BitMatrix::empty(3);
        let r = css_distance(&gx, &gz, 6).unwrap();
        assert_eq!(r.d_z.value, DistanceValue::Exact(3));
        assert_eq!(r.d_x.value, DistanceValue::Exact(1));
        assert_eq!(r.d_css, DistanceValue::Exact(1));
        assert!(css_distance(&BitMatrix::from_strs(&["100"]), &BitMatrix::from_strs(&["100"]), 3).is_err());
    }

    #[test]
    fn caps_and_empty() {
        let h = hamming();
        let r = circuit_distance(&h, &h.kernel_basis(), 2).unwrap();
        assert_eq!(r.value, DistanceValue::LowerBound(3));
        assert_eq!(r.enumerated, 7 + 21);
        let r = circuit_distance(&h, &BitMatrix::empty(7), 6).unwrap();
        assert_eq!(r.value, DistanceValue::NoLogicalErrors);
        assert!(circuit_distance(&h, &BitMatrix::empty(6), 6).is_err());
    }

    #[test]
    fn half_bound() {
        assert_eq!(half_distance_bound(3), 2);
        assert_eq!(half_distance_bound(1), 1);
        assert_eq!(half_distance_bound(4), 2);
    }

    #[test]
    fn matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let n = rng.gen_range(1..=10);
            let rand_m = |rng: &mut rand_chacha::ChaCha8Rng, r: usize| {
                BitMatrix::from_rows(n, (0..r).map(|_| BitVector::from_bools(&(0..n).map(|_| rng.gen_bool(0.4)).collect::<Vec<_>>())).collect())
            };
            let rb = rng.gen_range(0..4);
            let rl = rng.gen_range(1..3);
            let b = rand_m(&mut rng, rb);
            let l = rand_m(&mut rng, rl);
            let got = circuit_distance(&b, &l, n).unwrap();
            match brute(&b, &l) {
                Some(d) => assert_eq!(got.value, DistanceValue::Exact(d)),
                None => assert!(matches!(got.value, DistanceValue::LowerBound(_) | DistanceValue::NoLogicalErrors)),
            }
        }
    }
}
