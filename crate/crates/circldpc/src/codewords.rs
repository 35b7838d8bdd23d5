//! Pauli operators, layer projections, codeword classes, and the
//! error-correction matrices `B` and `L` of a circuit.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gf2::{row_space_member, span_union, BitMatrix, BitVector};
use crate::tanner::{Component, TannerGraph};

/// `i^phase · σ(x, z)` where `σ(x, z) = i^{|x⊙z|} X^x Z^z`.
///
/// With `phase = 0` the operator is Hermitian; `σ(1, 1) = Y`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    pub phase: u8,
    pub x: BitVector,
    pub z: BitVector,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PauliError {
    #[error("cannot parse Pauli string `{0}`")]
    Parse(String),
    #[error("operators act on {0} and {1} qubits")]
    Length(usize, usize),
}

impl PauliOperator {
    #[must_use]
    pub fn identity(n: usize) -> Self {
        Self { phase: 0, x: BitVector::zeros(n), z: BitVector::zeros(n) }
    }

    #[must_use]
    pub fn from_xz(x: BitVector, z: BitVector) -> Self {
        assert_eq!(x.len(), z.len(), "x and z strings differ in length");
        Self { phase: 0, x, z }
    }

    /// From a symplectic vector `(x | z)` of length `2n`.
    #[must_use]
    pub fn from_symplectic(v: &BitVector) -> Self {
        let n = v.len() / 2;
        let x = v.select(&(0..n).collect::<Vec<_>>());
        let z = v.select(&(n..2 * n).collect::<Vec<_>>());
        Self::from_xz(x, z)
    }

    /// Single-qubit operator `X`, `Y` or `Z` on 1-based qubit `q`.
    #[must_use]
    pub fn single(n: usize, q: usize, p: char) -> Self {
        let mut out = Self::identity(n);
        match p {
            'X' => out.x.set(q - 1, true),
            'Z' => out.z.set(q - 1, true),
            'Y' => {
                out.x.set(q - 1, true);
                out.z.set(q - 1, true);
            }
            _ => panic!("unknown Pauli `{p}`"),
        }
        out
    }

    #[must_use]
    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    #[must_use]
    pub fn symplectic(&self) -> BitVector {
        self.x.concat(&self.z)
    }

    #[must_use]
    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    #[must_use]
    pub fn weight(&self) -> usize {
        (0..self.n_qubits()).filter(|&i| self.x.get(i) || self.z.get(i)).count()
    }

    #[must_use]
    pub fn commutes_with(&self, other: &PauliOperator) -> bool {
        !(self.x.dot(&other.z) ^ self.z.dot(&other.x))
    }

    /// Sign as ±1 when the phase is real.
    #[must_use]
    pub fn sign(&self) -> Option<i8> {
        match self.phase % 4 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    #[must_use]
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.phase = (out.phase + 2) % 4;
        out
    }

    /// Operator product `self · other` with exact phase.
    #[must_use]
    pub fn mul(&self, other: &PauliOperator) -> PauliOperator {
        assert_eq!(self.n_qubits(), other.n_qubits(), "operators differ in length");
        // σ(a)σ(b) = i^{Σ a_x a_z + b_x b_z + 2 a_z b_x - c_x c_z} σ(c)
        let mut e = u32::from(self.phase) + u32::from(other.phase);
        for q in 0..self.n_qubits() {
            let (ax, az, bx, bz) = (self.x.get(q), self.z.get(q), other.x.get(q), other.z.get(q));
            let (cx, cz) = (ax ^ bx, az ^ bz);
            let plus = u32::from(ax && az) + u32::from(bx && bz) + 2 * u32::from(az && bx);
            e += plus + 4 - u32::from(cx && cz);
        }
        PauliOperator { phase: (e % 4) as u8, x: self.x.xor(&other.x), z: self.z.xor(&other.z) }
    }

    /// Restrict or pad to `n` qubits (extra qubits act as identity).
    #[must_use]
    pub fn resized(&self, n: usize) -> PauliOperator {
        let mut out = PauliOperator::identity(n);
        out.phase = self.phase;
        for q in 0..n.min(self.n_qubits()) {
            out.x.set(q, self.x.get(q));
            out.z.set(q, self.z.get(q));
        }
        out
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["+", "+i", "-", "-i"][usize::from(self.phase % 4)];
        f.write_str(prefix)?;
        for q in 0..self.n_qubits() {
            let c = match (self.x.get(q), self.z.get(q)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for PauliOperator {
    type Err = PauliError;

    /// Dense form such as `+XIZ`, `-iYY` or `ZZI`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (phase, body) = if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix("+i") {
            (1, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else {
            (0, s)
        };
        if body.is_empty() {
            return Err(PauliError::Parse(s.to_string()));
        }
        let n = body.chars().count();
        let mut p = PauliOperator::identity(n);
        p.phase = phase;
        for (q, c) in body.chars().enumerate() {
            match c {
                'I' | '_' => {}
                'X' | 'Y' | 'Z' => p = p.with(q, c),
                _ => return Err(PauliError::Parse(s.to_string())),
            }
        }
        Ok(p)
    }
}

impl PauliOperator {
    fn with(mut self, q: usize, c: char) -> Self {
        self.x.set(q, c != 'Z');
        self.z.set(q, c != 'X');
        self
    }
}

/// Symplectic matrix of a generator list (rows `(x | z)`).
#[must_use]
pub fn generator_matrix(gens: &[PauliOperator], n: usize) -> BitMatrix {
    BitMatrix::from_rows(2 * n, gens.iter().map(|p| p.resized(n).symplectic()).collect())
}

// ---------------------------------------------------------------------------
// Layer projections

/// `P_t` as a `2n × |V_B|` matrix: row `q-1` is `x_q^{(t)}`, row `n+q-1` is `z_q^{(t)}`.
#[must_use]
pub fn layer_projection(g: &TannerGraph, t: usize) -> BitMatrix {
    let n = g.n_qubits;
    let mut p = BitMatrix::zeros(2 * n, g.n_bits());
    for (row, bit) in g.layer_slots(t).into_iter().enumerate() {
        if let Some(b) = bit {
            p.set(row, b, true);
        }
    }
    p
}

/// `P_t cᵀ` as a symplectic vector.
#[must_use]
pub fn project(g: &TannerGraph, c: &BitVector, t: usize) -> BitVector {
    let n = g.n_qubits;
    let mut out = BitVector::zeros(2 * n);
    for (row, bit) in g.layer_slots(t).into_iter().enumerate() {
        if let Some(b) = bit {
            out.set(row, c.get(b));
        }
    }
    out
}

/// `σ(P_t cᵀ)` with phase `+1`.
#[must_use]
pub fn sigma_at_layer(g: &TannerGraph, c: &BitVector, t: usize) -> PauliOperator {
    PauliOperator::from_symplectic(&project(g, c, t))
}

#[must_use]
pub fn sigma_in(g: &TannerGraph, c: &BitVector) -> PauliOperator {
    sigma_at_layer(g, c, 0)
}

#[must_use]
pub fn sigma_out(g: &TannerGraph, c: &BitVector) -> PauliOperator {
    sigma_at_layer(g, c, g.depth)
}

// ---------------------------------------------------------------------------
// Classification

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CodewordClass {
    Checker,
    Detector,
    Emitter,
    PseudoPropagator,
    GenuinePropagator,
}

impl fmt::Display for CodewordClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodewordClass::Checker => "checker",
            CodewordClass::Detector => "detector",
            CodewordClass::Emitter => "emitter",
            CodewordClass::PseudoPropagator => "pseudo-propagator",
            CodewordClass::GenuinePropagator => "genuine-propagator",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodewordError {
    #[error("vector is not a codeword (A·cᵀ ≠ 0)")]
    NotCodeword,
    #[error("vector has length {got}, graph has {expected} bits")]
    Length { expected: usize, got: usize },
    #[error("generators {0} and {1} do not commute")]
    NonCommuting(usize, usize),
    #[error("generators are linearly dependent")]
    Dependent,
    #[error("generator acts on {got} qubits, circuit has {expected}")]
    GeneratorLength { expected: usize, got: usize },
    #[error("B rows {0} and {1} have anticommuting {2} operators")]
    InvalidB(usize, usize, &'static str),
    #[error("codeword is not a genuine propagator")]
    NotGenuine,
    #[error("no anticommuting partner exists; the kernel basis is inconsistent")]
    NoPartner,
}

/// Bases of the codeword subspaces of one graph.
#[derive(Clone, Debug)]
pub struct CodeSpaces {
    pub a: BitMatrix,
    pub kernel: BitMatrix,
    /// Checkers: `ker A ∩ ker P_0 ∩ ker P_T`.
    pub c_c: BitMatrix,
    /// Checkers and detectors: `ker A ∩ ker P_T`.
    pub c_cd: BitMatrix,
    /// Checkers and emitters: `ker A ∩ ker P_0`.
    pub c_ce: BitMatrix,
    /// `Span(C_cd ∪ C_ce)`.
    pub c_cde: BitMatrix,
}

impl CodeSpaces {
    #[must_use]
    pub fn new(g: &TannerGraph) -> Self {
        let a = g.check_matrix();
        let p0 = layer_projection(g, 0);
        let pt = layer_projection(g, g.depth);
        let stack = |parts: &[&BitMatrix]| BitMatrix::vstack(parts).expect("same column count").kernel_basis();
        let kernel = a.kernel_basis();
        let c_c = stack(&[&a, &p0, &pt]);
        let c_cd = stack(&[&a, &pt]);
        let c_ce = stack(&[&a, &p0]);
        let c_cde = span_union(&c_cd, &c_ce).expect("same column count");
        Self { a, kernel, c_c, c_cd, c_ce, c_cde }
    }

    pub fn classify(&self, c: &BitVector) -> Result<CodewordClass, CodewordError> {
        if c.len() != self.a.n_cols() {
            return Err(CodewordError::Length { expected: self.a.n_cols(), got: c.len() });
        }
        if !self.a.mul_vec(c).is_zero() {
            return Err(CodewordError::NotCodeword);
        }
        let in_cd = row_space_member(&self.c_cd, c);
        let in_ce = row_space_member(&self.c_ce, c);
        Ok(match (in_cd, in_ce) {
            (true, true) => CodewordClass::Checker,
            (true, false) => CodewordClass::Detector,
            (false, true) => CodewordClass::Emitter,
            (false, false) if row_space_member(&self.c_cde, c) => CodewordClass::PseudoPropagator,
            (false, false) => CodewordClass::GenuinePropagator,
        })
    }
}

pub fn classify(g: &TannerGraph, c: &BitVector) -> Result<CodewordClass, CodewordError> {
    CodeSpaces::new(g).classify(c)
}

/// Indices (in circuit order) of the measurements whose bits are set in `c`.
#[must_use]
pub fn relevant_measurements(g: &TannerGraph, c: &BitVector) -> Vec<usize> {
    g.meas_bits
        .iter()
        .enumerate()
        .filter_map(|(k, b)| b.filter(|&b| c.get(b)).map(|_| k))
        .collect()
}

/// `e1 + e2 ∈ rowsp(A)`.
#[must_use]
pub fn errors_equivalent(a: &BitMatrix, e1: &BitVector, e2: &BitVector) -> bool {
    row_space_member(a, &e1.xor(e2))
}

/// A genuine propagator whose input and output operators anticommute with
/// those of `c`.
pub fn find_anticommuting_partner(g: &TannerGraph, spaces: &CodeSpaces, c: &BitVector) -> Result<BitVector, CodewordError> {
    if spaces.classify(c)? != CodewordClass::GenuinePropagator {
        return Err(CodewordError::NotGenuine);
    }
    let s_in = sigma_in(g, c);
    let s_out = sigma_out(g, c);
    let mut only_in = None;
    let mut only_out = None;
    for k in spaces.kernel.rows() {
        let a_in = !s_in.commutes_with(&sigma_in(g, k));
        let a_out = !s_out.commutes_with(&sigma_out(g, k));
        match (a_in, a_out) {
            (true, true) => return Ok(k.clone()),
            (true, false) if only_in.is_none() => only_in = Some(k),
            (false, true) if only_out.is_none() => only_out = Some(k),
            _ => {}
        }
    }
    match (only_in, only_out) {
        (Some(a), Some(b)) => Ok(a.xor(b)),
        _ => Err(CodewordError::NoPartner),
    }
}

// ---------------------------------------------------------------------------
// Error-correction structure

/// Error-correction check matrix `B`, logical generator matrix `L`, and the
/// codes they induce on the circuit boundary.
#[derive(Clone, Debug)]
pub struct EcStructure {
    pub a: BitMatrix,
    pub b: BitMatrix,
    pub l: BitMatrix,
    /// Bits of measurements and initialisations.
    pub meas_bits: Vec<usize>,
    pub init_bits: Vec<usize>,
    pub s_in: Vec<PauliOperator>,
    pub s_out: Vec<PauliOperator>,
    pub l_in: Vec<PauliOperator>,
    pub l_out: Vec<PauliOperator>,
}

fn check_generators(gens: &[PauliOperator], n: usize) -> Result<BitMatrix, CodewordError> {
    for p in gens {
        if p.n_qubits() != n {
            return Err(CodewordError::GeneratorLength { expected: n, got: p.n_qubits() });
        }
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            if !gens[i].commutes_with(&gens[j]) {
                return Err(CodewordError::NonCommuting(i, j));
            }
        }
    }
    let m = generator_matrix(gens, n);
    if m.rank() != gens.len() {
        return Err(CodewordError::Dependent);
    }
    Ok(m)
}

/// Swap the x and z halves of each row, so `S Λ v` is the symplectic product.
fn lambda(m: &BitMatrix, n: usize) -> BitMatrix {
    let cols: Vec<usize> = (n..2 * n).chain(0..n).collect();
    m.select_columns(&cols)
}

/// Extend the rows of `b` to a basis of `span`, keeping only the added rows.
pub(crate) fn extend_basis(b: &BitMatrix, span: &BitMatrix) -> BitMatrix {
    let mut acc = b.clone();
    let mut added = BitMatrix::empty(span.n_cols());
    for r in span.rows() {
        if !row_space_member(&acc, r) {
            acc.push_row(r.clone());
            added.push_row(r.clone());
        }
    }
    added
}

/// Pauli generators spanning `{P_t c : c ∈ rowsp(m)}`, outside `exclude`.
fn boundary_generators(g: &TannerGraph, m: &BitMatrix, t: usize, exclude: &BitMatrix) -> Vec<PauliOperator> {
    let p = layer_projection(g, t);
    let images = BitMatrix::from_rows(2 * g.n_qubits, m.rows().iter().map(|r| p.mul_vec(r)).collect());
    extend_basis(exclude, &images.rref().0).rows().iter().map(PauliOperator::from_symplectic).collect()
}

fn check_b(g: &TannerGraph, b: &BitMatrix) -> Result<(), CodewordError> {
    for i in 0..b.n_rows() {
        for j in i + 1..b.n_rows() {
            if !sigma_in(g, b.row(i)).commutes_with(&sigma_in(g, b.row(j))) {
                return Err(CodewordError::InvalidB(i, j, "input"));
            }
            if !sigma_out(g, b.row(i)).commutes_with(&sigma_out(g, b.row(j))) {
                return Err(CodewordError::InvalidB(i, j, "output"));
            }
        }
    }
    Ok(())
}

/// Build `B` and `L` for boundary codes with stabiliser generators `s_in`, `s_out`.
///
/// `B` is a basis of the codewords whose boundary operators lie in the
/// stabiliser groups up to sign; `L` extends it to a basis of the codewords
/// whose boundary operators commute with the stabilisers.
pub fn build_ec_structure(g: &TannerGraph, s_in: &[PauliOperator], s_out: &[PauliOperator]) -> Result<EcStructure, CodewordError> {
    let n = g.n_qubits;
    let a = g.check_matrix();
    let m_in = check_generators(s_in, n)?;
    let m_out = check_generators(s_out, n)?;
    let p0 = layer_projection(g, 0);
    let pt = layer_projection(g, g.depth);
    let h_in = m_in.kernel_basis().mul(&p0);
    let h_out = m_out.kernel_basis().mul(&pt);
    let b = BitMatrix::vstack(&[&a, &h_in, &h_out]).expect("same column count").kernel_basis();
    check_b(g, &b)?;
    let n_in = lambda(&m_in, n).mul(&p0);
    let n_out = lambda(&m_out, n).mul(&pt);
    let logical = BitMatrix::vstack(&[&a, &n_in, &n_out]).expect("same column count").kernel_basis();
    let l = extend_basis(&b, &logical);
    let l_in = boundary_generators(g, &l, 0, &m_in);
    let l_out = boundary_generators(g, &l, g.depth, &m_out);
    Ok(EcStructure {
        meas_bits: g.meas_bits.iter().flatten().copied().collect(),
        init_bits: g.init_bits.iter().flatten().copied().collect(),
        a,
        b,
        l,
        s_in: s_in.to_vec(),
        s_out: s_out.to_vec(),
        l_in,
        l_out,
    })
}

/// Stabiliser generators of the boundary codes implied by `B`.
pub fn derive_codes_from_b(g: &TannerGraph, b: &BitMatrix) -> Result<(Vec<PauliOperator>, Vec<PauliOperator>), CodewordError> {
    let a = g.check_matrix();
    if b.rows().iter().any(|r| !a.mul_vec(r).is_zero()) {
        return Err(CodewordError::NotCodeword);
    }
    check_b(g, b)?;
    let none = BitMatrix::empty(2 * g.n_qubits);
    Ok((boundary_generators(g, b, 0, &none), boundary_generators(g, b, g.depth, &none)))
}

/// True if the bit carries a measurement outcome.
#[must_use]
pub fn is_measurement_bit(g: &TannerGraph, b: usize) -> bool {
    g.bits[b].meas.is_some()
}

/// Physical description of a bit: `X`/`Z` error kind it represents, qubit, layer.
#[must_use]
pub fn error_site(g: &TannerGraph, b: usize) -> Option<(char, usize, usize)> {
    let slot = g.bits[b].slot?;
    // an x-bit error is a Z error and vice versa
    let p = if slot.comp == Component::X { 'Z' } else { 'X' };
    Some((p, slot.qubit, slot.layer))
}
