//! Stabiliser tableau simulation, codeword signs, and checks of the codeword
//! equations with and without spacetime errors.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::circuit::{Basis, Circuit, Gate, Op};
use crate::codewords::{classify, relevant_measurements, sigma_in, sigma_out, CodewordClass, CodewordError, PauliOperator};
use crate::gf2::BitVector;
use crate::tanner::{Component, TannerGraph};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimError {
    #[error("forced outcome contradicts a deterministic measurement at layer {layer}, qubit {qubit}")]
    ForcedContradiction { layer: usize, qubit: usize },
    #[error("operation `{0}` is not a gate")]
    NotAGate(String),
    #[error("operator acts on {got} qubits, state has {expected}")]
    Length { expected: usize, got: usize },
    #[error("conjugated operator {got} differs from the codeword's output {expected}")]
    OutputMismatch { expected: String, got: String },
    #[error(transparent)]
    Codeword(#[from] CodewordError),
}

/// Conjugate a Hermitian Pauli by one gate (0-based qubits), tracking the sign.
pub fn conjugate_gate(p: &mut PauliOperator, gate: Gate) {
    let flip = |p: &mut PauliOperator, b: bool| {
        if b {
            p.phase = (p.phase + 2) % 4;
        }
    };
    match gate {
        Gate::H(q) => {
            let (x, z) = (p.x.get(q), p.z.get(q));
            flip(p, x && z);
            p.x.set(q, z);
            p.z.set(q, x);
        }
        Gate::S(q) => {
            let (x, z) = (p.x.get(q), p.z.get(q));
            flip(p, x && z);
            p.z.set(q, z ^ x);
        }
        Gate::Sx(q) => {
            for g in [Gate::H(q), Gate::S(q), Gate::H(q)] {
                conjugate_gate(p, g);
            }
        }
        Gate::Cz(a, b) => {
            for g in [Gate::H(b), Gate::Cnot(a, b), Gate::H(b)] {
                conjugate_gate(p, g);
            }
        }
        Gate::Xcx(a, b) => {
            for g in [Gate::H(a), Gate::Cnot(a, b), Gate::H(a)] {
                conjugate_gate(p, g);
            }
        }
        Gate::Cnot(a, b) => {
            let (xa, za, xb, zb) = (p.x.get(a), p.z.get(a), p.x.get(b), p.z.get(b));
            flip(p, xa && zb && !(xb ^ za));
            p.x.set(b, xb ^ xa);
            p.z.set(a, za ^ zb);
        }
        Gate::X(q) => {
            let z = p.z.get(q);
            flip(p, z);
        }
        Gate::Z(q) => {
            let x = p.x.get(q);
            flip(p, x);
        }
        Gate::Y(q) => {
            let b = p.x.get(q) ^ p.z.get(q);
            flip(p, b);
        }
        Gate::Swap(a, b) => {
            let (xa, za, xb, zb) = (p.x.get(a), p.z.get(a), p.x.get(b), p.z.get(b));
            p.x.set(a, xb);
            p.z.set(a, zb);
            p.x.set(b, xa);
            p.z.set(b, za);
        }
    }
}

/// Gate with 1-based qubits shifted to 0-based.
fn zero_based(g: Gate) -> Gate {
    match g {
        Gate::Cnot(a, b) => Gate::Cnot(a - 1, b - 1),
        Gate::Swap(a, b) => Gate::Swap(a - 1, b - 1),
        Gate::Cz(a, b) => Gate::Cz(a - 1, b - 1),
        Gate::Xcx(a, b) => Gate::Xcx(a - 1, b - 1),
        Gate::Sx(q) => Gate::Sx(q - 1),
        Gate::H(q) => Gate::H(q - 1),
        Gate::S(q) => Gate::S(q - 1),
        Gate::X(q) => Gate::X(q - 1),
        Gate::Y(q) => Gate::Y(q - 1),
        Gate::Z(q) => Gate::Z(q - 1),
    }
}

fn op_gate(op: Op) -> Option<Gate> {
    Some(match op {
        Op::Cnot(a, b) => Gate::Cnot(a, b),
        Op::Cz(a, b) => Gate::Cz(a, b),
        Op::Xcx(a, b) => Gate::Xcx(a, b),
        Op::Sx(q) => Gate::Sx(q),
        Op::H(q) => Gate::H(q),
        Op::S(q) => Gate::S(q),
        Op::X(q) => Gate::X(q),
        Op::Y(q) => Gate::Y(q),
        Op::Z(q) => Gate::Z(q),
        _ => return None,
    })
}

/// `[U] p` for a gate-only circuit, with exact sign.
pub fn conjugate_pauli(c: &Circuit, p: &PauliOperator) -> Result<PauliOperator, SimError> {
    if p.n_qubits() != c.n_qubits {
        return Err(SimError::Length { expected: c.n_qubits, got: p.n_qubits() });
    }
    let mut out = p.clone();
    for layer in &c.layers {
        for &op in layer {
            match op {
                Op::I(_) => {}
                Op::Init(..) | Op::Meas(..) => return Err(SimError::NotAGate(op.to_string())),
                _ => conjugate_gate(&mut out, zero_based(op_gate(op).expect("gate"))),
            }
        }
    }
    Ok(out)
}

/// Stabiliser state with destabilisers. Qubits are 0-based internally; the
/// public gate methods take 1-based qubits like the circuit IR.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    n: usize,
    destab: Vec<PauliOperator>,
    stab: Vec<PauliOperator>,
}

impl Tableau {
    /// `|0…0⟩`.
    #[must_use]
    pub fn new(n: usize) -> Self {
        Self {
            n,
            destab: (1..=n).map(|q| PauliOperator::single(n, q, 'X')).collect(),
            stab: (1..=n).map(|q| PauliOperator::single(n, q, 'Z')).collect(),
        }
    }

    /// A random stabiliser state prepared by a random Clifford circuit.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut t = Self::new(n);
        for _ in 0..(2 * n * n + 4 * n) {
            let q = rng.gen_range(1..=n);
            match rng.gen_range(0..4) {
                0 => t.apply(Gate::H(q)),
                1 => t.apply(Gate::S(q)),
                2 => t.apply(Gate::X(q)),
                _ if n > 1 => {
                    let mut r = rng.gen_range(1..n);
                    if r >= q {
                        r += 1;
                    }
                    t.apply(Gate::Cnot(q, r));
                }
                _ => t.apply(Gate::Z(q)),
            }
        }
        t
    }

    #[must_use]
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    #[must_use]
    pub fn stabilisers(&self) -> &[PauliOperator] {
        &self.stab
    }

    /// Apply a gate (1-based qubits).
    pub fn apply(&mut self, gate: Gate) {
        let g = zero_based(gate);
        for row in self.destab.iter_mut().chain(self.stab.iter_mut()) {
            conjugate_gate(row, g);
        }
    }

    /// Apply a Pauli operator as a gate.
    pub fn apply_pauli(&mut self, p: &PauliOperator) {
        for row in self.destab.iter_mut().chain(self.stab.iter_mut()) {
            if !row.commutes_with(p) {
                row.phase = (row.phase + 2) % 4;
            }
        }
    }

    /// Eigenvalue sign of `p` if it is determined: `Some(false)` for `+1`.
    #[must_use]
    pub fn expectation(&self, p: &PauliOperator) -> Option<bool> {
        if self.stab.iter().any(|s| !s.commutes_with(p)) {
            return None;
        }
        let mut acc = PauliOperator::identity(self.n);
        for (d, s) in self.destab.iter().zip(&self.stab) {
            if !d.commutes_with(p) {
                acc = acc.mul(s);
            }
        }
        debug_assert!(acc.x == p.x && acc.z == p.z, "stabiliser product must reproduce the operator");
        Some((acc.phase + 4 - p.phase) % 4 == 2)
    }

    /// Measure a Hermitian Pauli. Returns `true` for outcome `-1`.
    ///
    /// `forced` fixes a random outcome; it is an error when it contradicts a
    /// deterministic one (reported with `site`).
    pub fn measure_pauli<R: Rng + ?Sized>(
        &mut self,
        p: &PauliOperator,
        forced: Option<bool>,
        rng: &mut R,
        site: (usize, usize),
    ) -> Result<bool, SimError> {
        if p.n_qubits() != self.n {
            return Err(SimError::Length { expected: self.n, got: p.n_qubits() });
        }
        let Some(k) = self.stab.iter().position(|s| !s.commutes_with(p)) else {
            let det = self.expectation(p).expect("commuting operator is determined");
            if forced.is_some_and(|f| f != det) {
                return Err(SimError::ForcedContradiction { layer: site.0, qubit: site.1 });
            }
            return Ok(det);
        };
        let pivot = self.stab[k].clone();
        for (i, row) in self.stab.iter_mut().enumerate() {
            if i != k && !row.commutes_with(p) {
                *row = row.mul(&pivot);
            }
        }
        for (i, row) in self.destab.iter_mut().enumerate() {
            if i != k && !row.commutes_with(p) {
                *row = row.mul(&pivot);
            }
        }
        let outcome = forced.unwrap_or_else(|| rng.gen_bool(0.5));
        self.destab[k] = pivot;
        let mut new = p.clone();
        new.phase = if outcome { (p.phase + 2) % 4 } else { p.phase };
        self.stab[k] = new;
        Ok(outcome)
    }

    fn basis_pauli(&self, basis: Basis, q: usize) -> PauliOperator {
        PauliOperator::single(self.n, q, if basis == Basis::Z { 'Z' } else { 'X' })
    }

    /// Single-qubit measurement (1-based qubit).
    pub fn measure<R: Rng + ?Sized>(&mut self, basis: Basis, q: usize, forced: Option<bool>, rng: &mut R) -> Result<bool, SimError> {
        let p = self.basis_pauli(basis, q);
        self.measure_pauli(&p, forced, rng, (0, q))
    }

    /// Reset a qubit to `|0⟩` or `|+⟩`.
    pub fn reset<R: Rng + ?Sized>(&mut self, basis: Basis, q: usize, rng: &mut R) {
        if self.measure(basis, q, None, rng).expect("unforced measurement") {
            self.apply(if basis == Basis::Z { Gate::X(q) } else { Gate::Z(q) });
        }
    }

    /// Make `+p` a stabiliser: measure it with forced `+1`, or flip the sign
    /// with an anticommuting single-qubit Pauli if `-p` is already stabilised.
    pub fn force_eigenstate<R: Rng + ?Sized>(&mut self, p: &PauliOperator, rng: &mut R) {
        if p.is_identity() {
            return;
        }
        match self.expectation(p) {
            Some(false) => {}
            Some(true) => {
                let q = (0..self.n).find(|&q| p.x.get(q) || p.z.get(q)).expect("non-identity");
                let flip = if p.x.get(q) { 'Z' } else { 'X' };
                self.apply_pauli(&PauliOperator::single(self.n, q + 1, flip));
            }
            None => {
                self.measure_pauli(p, Some(false), rng, (0, 0)).expect("random outcome can be forced");
            }
        }
    }

    /// Tableau invariants: stabilisers commute, destabiliser `i` anticommutes
    /// exactly with stabiliser `i`, destabilisers commute, and stabiliser
    /// phases are real.
    #[must_use]
    pub fn is_consistent(&self) -> bool {
        for i in 0..self.n {
            if self.stab[i].sign().is_none() {
                return false;
            }
            for j in 0..self.n {
                if !self.stab[i].commutes_with(&self.stab[j]) || !self.destab[i].commutes_with(&self.destab[j]) {
                    return false;
                }
                if self.destab[i].commutes_with(&self.stab[j]) == (i == j) {
                    return false;
                }
            }
        }
        true
    }
}

/// Pauli errors of a spacetime error vector, one per layer boundary `0..=T`.
///
/// A set x-bit is a `Z` error, a set z-bit an `X` error, applied after the
/// layer's operations.
#[must_use]
pub fn error_layers(g: &TannerGraph, e: &BitVector) -> Vec<PauliOperator> {
    let n = g.n_qubits;
    let mut out = vec![PauliOperator::identity(n); g.depth + 1];
    for b in e.ones() {
        let Some(slot) = g.bits[b].slot else { continue };
        let p = &mut out[slot.layer];
        match slot.comp {
            Component::X => p.z.flip(slot.qubit - 1),
            Component::Z => p.x.flip(slot.qubit - 1),
        }
    }
    out
}

/// Run a circuit on a state. Returns measurement outcomes in canonical order
/// (`true` for `-1`). Errors from `errors` are applied after each layer.
pub fn run<R: Rng + ?Sized>(
    c: &Circuit,
    state: &mut Tableau,
    forced: Option<&[bool]>,
    errors: Option<&[PauliOperator]>,
    rng: &mut R,
) -> Result<Vec<bool>, SimError> {
    let meas = c.measurements();
    let mut outcomes = vec![false; meas.len()];
    let apply_errors = |state: &mut Tableau, t: usize| {
        if let Some(p) = errors.and_then(|e| e.get(t)) {
            if !p.is_identity() {
                state.apply_pauli(p);
            }
        }
    };
    apply_errors(state, 0);
    for t in 1..=c.depth() {
        for &op in &c.layers[t - 1] {
            match op {
                Op::I(_) => {}
                Op::Init(b, q) => state.reset(b, q, rng),
                Op::Meas(b, q) => {
                    let k = meas.iter().position(|r| r.layer == t && r.qubit == q).expect("indexed measurement");
                    let p = state.basis_pauli(b, q);
                    outcomes[k] = state.measure_pauli(&p, forced.map(|f| f[k]), rng, (t, q))?;
                }
                _ => state.apply(op_gate(op).expect("gate")),
            }
        }
        apply_errors(state, t);
    }
    Ok(outcomes)
}

/// Sign `ν(c)` of a codeword (`true` for `-1`), by conjugating its layer-1
/// operator through the unitary middle of the extended circuit.
pub fn nu(c: &Circuit, g: &TannerGraph, cw: &BitVector) -> Result<bool, SimError> {
    let a = g.check_matrix();
    if cw.len() != g.n_bits() || !a.mul_vec(cw).is_zero() {
        return Err(CodewordError::NotCodeword.into());
    }
    let ext = c.extend();
    let total = ext.n_total;
    let inits = c.initialisations();
    let meas = c.measurements();
    let bit_value = |b: Option<usize>| b.is_some_and(|b| cw.get(b));
    let set = |p: &mut PauliOperator, q: usize, basis: Basis, v: bool| {
        if v {
            if basis == Basis::Z {
                p.z.flip(q - 1);
            } else {
                p.x.flip(q - 1);
            }
        }
    };
    let init_value = |r: &crate::circuit::OpRef| {
        let k = inits.iter().position(|x| x == r).expect("indexed initialisation");
        bit_value(g.init_bits[k])
    };
    let meas_value = |r: &crate::circuit::OpRef| {
        let k = meas.iter().position(|x| x == r).expect("indexed measurement");
        bit_value(g.meas_bits[k])
    };

    let mut p = sigma_in(g, cw).resized(total);
    for r in &ext.single_inits {
        set(&mut p, r.qubit, r.basis, init_value(r));
    }
    for pair in &ext.pairs {
        set(&mut p, pair.ancilla, pair.init.basis, init_value(&pair.init));
    }
    for layer in &ext.middle {
        for &gate in layer {
            conjugate_gate(&mut p, zero_based(gate));
        }
    }

    let mut expected = sigma_out(g, cw).resized(total);
    for r in &ext.single_meas {
        set(&mut expected, r.qubit, r.basis, meas_value(r));
    }
    for pair in &ext.pairs {
        set(&mut expected, pair.ancilla, pair.meas.basis, meas_value(&pair.meas));
    }
    if p.x != expected.x || p.z != expected.z {
        return Err(SimError::OutputMismatch { expected: expected.to_string(), got: p.to_string() });
    }
    Ok(p.phase == 2)
}

/// A failed codeword equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub circuit: String,
    pub class: CodewordClass,
    pub codeword: Vec<u8>,
    pub error: Vec<u8>,
    pub outcomes: Vec<bool>,
    pub expected_sign: i8,
    /// Observed sign; `None` when the output operator was not determined.
    pub actual_sign: Option<i8>,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits = |v: &[u8]| v.iter().map(|b| char::from(b'0' + b)).collect::<String>();
        writeln!(f, "codeword equation violated ({})", self.class)?;
        writeln!(f, "codeword: {}", bits(&self.codeword))?;
        writeln!(f, "error:    {}", bits(&self.error))?;
        let mu: String = self.outcomes.iter().map(|&m| if m { '-' } else { '+' }).collect();
        writeln!(f, "outcomes: {mu}")?;
        writeln!(f, "expected sign: {:+}", self.expected_sign)?;
        match self.actual_sign {
            Some(s) => writeln!(f, "actual sign:   {s:+}")?,
            None => writeln!(f, "actual sign:   undetermined")?,
        }
        write!(f, "circuit:\n{}", self.circuit)
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{0}")]
    Violated(Box<Counterexample>),
}

impl From<CodewordError> for VerifyError {
    fn from(e: CodewordError) -> Self {
        VerifyError::Sim(SimError::Codeword(e))
    }
}

/// Check the codeword equation on one run from a random stabiliser input.
///
/// The input is made a `+1` eigenstate of `σ_in(c)`; after running with the
/// error injected, `(-1)^{c·e} ν μ_R σ_out` must stabilise the output (or equal
/// `+1` when `σ_out` is the identity).
pub fn verify_codeword_equation<R: Rng + ?Sized>(
    c: &Circuit,
    g: &TannerGraph,
    cw: &BitVector,
    e: Option<&BitVector>,
    rng: &mut R,
) -> Result<(), VerifyError> {
    let class = classify(g, cw)?;
    let nu_minus = nu(c, g, cw)?;
    let mut state = Tableau::random(c.n_qubits, rng);
    state.force_eigenstate(&sigma_in(g, cw), rng);
    let errs = e.map(|e| error_layers(g, e));
    let outcomes = run(c, &mut state, None, errs.as_deref(), rng)?;
    let mu_minus = mu_r(g, cw, &outcomes);
    let ce = e.is_some_and(|e| e.dot(cw));
    let expected = nu_minus ^ mu_minus ^ ce;
    let out = sigma_out(g, cw);
    let actual = if out.is_identity() { Some(false) } else { state.expectation(&out) };
    if actual == Some(expected) {
        return Ok(());
    }
    let sign = |m: bool| if m { -1 } else { 1 };
    Err(VerifyError::Violated(Box::new(Counterexample {
        circuit: c.serialize(),
        class,
        codeword: cw.to_bits(),
        error: e.map_or_else(|| vec![0; cw.len()], BitVector::to_bits),
        outcomes,
        expected_sign: sign(expected),
        actual_sign: actual.map(sign),
    })))
}

/// `μ_R(c, μ)` as a sign bit: parity of the relevant outcomes.
#[must_use]
pub fn mu_r(g: &TannerGraph, cw: &BitVector, outcomes: &[bool]) -> bool {
    relevant_measurements(g, cw).iter().fold(false, |acc, &k| acc ^ outcomes[k])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_circuit, random_circuit, GateSet};
    use crate::tanner::build_plain;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const ZZ: &str = "qubits 3\nrz 3\ntick\ncnot 1 3\ntick\ncnot 2 3\ntick\nmz 3\ntick\nrz 3\ntick\ncnot 1 3\ntick\ncnot 2 3\ntick\nmz 3\ntick\n";

    fn p(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn native_gates_match_decompositions() {
        let pairs = [
            ("qubits 2\ncz 1 2", "qubits 2\nh 2\ntick\ncnot 1 2\ntick\nh 2"),
            ("qubits 2\nxcx 1 2", "qubits 2\nh 1\ntick\ncnot 1 2\ntick\nh 1"),
            ("qubits 2\nsx 2", "qubits 2\nh 2\ntick\ns 2\ntick\nh 2"),
        ];
        for (native, composite) in pairs {
            let (a, b) = (parse_circuit(native).unwrap(), parse_circuit(composite).unwrap());
            for s in ["XI", "IX", "ZI", "IZ", "YI", "IY", "YY", "XZ"] {
                assert_eq!(conjugate_pauli(&a, &p(s)).unwrap(), conjugate_pauli(&b, &p(s)).unwrap(), "{native} on {s}");
            }
        }
        // both controlled gates are symmetric in their qubits
        let (cz12, cz21) = (parse_circuit("qubits 2\ncz 1 2").unwrap(), parse_circuit("qubits 2\ncz 2 1").unwrap());
        assert_eq!(conjugate_pauli(&cz12, &p("XY")).unwrap(), conjugate_pauli(&cz21, &p("XY")).unwrap());
    }

    #[test]
    fn conjugation_signs() {
        let s = parse_circuit("qubits 1\ns 1").unwrap();
        assert_eq!(conjugate_pauli(&s, &p("X")).unwrap(), p("Y"));
        assert_eq!(conjugate_pauli(&s, &p("Y")).unwrap(), p("-X"));
        let cx = parse_circuit("qubits 2\ncnot 1 2").unwrap();
        assert_eq!(conjugate_pauli(&cx, &p("XI")).unwrap(), p("XX"));
        assert_eq!(conjugate_pauli(&cx, &p("IZ")).unwrap(), p("ZZ"));
        assert_eq!(conjugate_pauli(&cx, &p("YY")).unwrap(), p("-XZ"));
        let h = parse_circuit("qubits 1\nh 1").unwrap();
        assert_eq!(conjugate_pauli(&h, &p("Y")).unwrap(), p("-Y"));
        let m = parse_circuit("qubits 1\nmz 1").unwrap();
        assert!(matches!(conjugate_pauli(&m, &p("Z")), Err(SimError::NotAGate(_))));
    }

    #[test]
    fn measurements() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut t = Tableau::new(1);
        assert!(!t.measure(Basis::Z, 1, None, &mut rng).unwrap());
        assert_eq!(t.measure(Basis::Z, 1, Some(true), &mut rng), Err(SimError::ForcedContradiction { layer: 0, qubit: 1 }));
        t.apply(Gate::H(1));
        assert!(t.measure(Basis::Z, 1, Some(true), &mut rng).unwrap());
        assert_eq!(t.expectation(&p("Z")), Some(true));
        assert_eq!(t.expectation(&p("X")), None);
        assert!(t.is_consistent());
    }

    #[test]
    fn zz_outcomes_agree() {
        let c = parse_circuit(ZZ).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let mut t = Tableau::random(3, &mut rng);
            t.force_eigenstate(&p("ZZI"), &mut rng);
            let mu = run(&c, &mut t, None, None, &mut rng).unwrap();
            assert_eq!(mu[0], mu[1]);
            assert!(t.is_consistent());
        }
    }

    #[test]
    fn nu_examples() {
        let s = parse_circuit("qubits 1\ns 1").unwrap();
        let g = build_plain(&s);
        // bits: x0 z0 x1 z1
        assert!(!nu(&s, &g, &BitVector::from_bits(&[1, 0, 1, 1])).unwrap());
        assert!(nu(&s, &g, &BitVector::from_bits(&[1, 1, 1, 0])).unwrap());
        let cx = parse_circuit("qubits 2\ncnot 1 2\ntick\ncnot 2 1").unwrap();
        let g = build_plain(&cx);
        for k in g.check_matrix().kernel_basis().rows() {
            assert!(!nu(&cx, &g, k).unwrap());
        }
    }

    #[test]
    fn zz_checker_detects_data_error() {
        let c = parse_circuit(ZZ).unwrap();
        let g = build_plain(&c);
        let sp = crate::codewords::CodeSpaces::new(&g);
        let checker = sp.c_c.rows().iter().find(|r| relevant_measurements(&g, r) == [0, 1]).cloned().unwrap_or_else(|| {
            // combine basis rows until both outcomes are relevant
            let rows = sp.c_c.rows();
            rows.iter().fold(BitVector::zeros(g.n_bits()), |acc, r| if relevant_measurements(&g, &acc.xor(r)).len() > relevant_measurements(&g, &acc).len() { acc.xor(r) } else { acc })
        });
        assert_eq!(relevant_measurements(&g, &checker), vec![0, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        verify_codeword_equation(&c, &g, &checker, None, &mut rng).unwrap();
        // X error on qubit 1 between the cycles: the z-bit of qubit 1 at layer 4
        let zbit = g.bit_at(crate::tanner::Slot { comp: Component::Z, qubit: 1, layer: 4 }).unwrap();
        let e = BitVector::unit(g.n_bits(), zbit);
        assert!(e.dot(&checker));
        verify_codeword_equation(&c, &g, &checker, Some(&e), &mut rng).unwrap();
        // the same error fed as error-free must fail
        let mut t = Tableau::random(3, &mut rng);
        let mu = run(&c, &mut t, None, Some(&error_layers(&g, &e)), &mut rng).unwrap();
        assert_ne!(mu[0], mu[1]);
    }

    #[test]
    fn random_codeword_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..40 {
            let n = rng.gen_range(1..=4);
            let depth = rng.gen_range(1..=6);
            let c = random_circuit(&mut rng, n, depth, GateSet::Full);
            let g = build_plain(&c);
            let a = g.check_matrix();
            for k in a.kernel_basis().rows() {
                verify_codeword_equation(&c, &g, k, None, &mut rng).unwrap_or_else(|e| panic!("{e}"));
                let mut e = BitVector::zeros(g.n_bits());
                for _ in 0..rng.gen_range(1..=3) {
                    e.flip(rng.gen_range(0..g.n_bits()));
                }
                verify_codeword_equation(&c, &g, k, Some(&e), &mut rng).unwrap_or_else(|e| panic!("{e}"));
                // an equivalent error gives the same verdict
                let e2 = e.xor(a.row(rng.gen_range(0..a.n_rows())));
                verify_codeword_equation(&c, &g, k, Some(&e2), &mut rng).unwrap_or_else(|e| panic!("{e}"));
            }
        }
    }
}
