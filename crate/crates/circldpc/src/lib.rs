//! Stabiliser circuits as classical LDPC codes.
//!
//! A circuit of initialisations, Clifford gates and measurements is mapped to a
//! Tanner graph whose codewords describe the circuit's Pauli correlations. The
//! crate builds these graphs, classifies codewords, derives error-correction
//! and logical matrices, computes circuit code distance, verifies every
//! codeword equation against a stabiliser tableau, and synthesises circuits
//! back from symmetric Tanner graphs.

pub mod gf2;
pub mod circuit;
pub mod tanner;
pub mod codewords;
pub mod pauli_sim;
pub mod distance;
pub mod splitting;
pub mod synthesis;
pub mod css;
