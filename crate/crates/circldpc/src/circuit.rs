//! Layered stabiliser circuits, their text format, and the extended circuit
//! with all initialisations first and all measurements last.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use rand::Rng;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    Z,
    X,
}

/// A primitive operation. Qubits are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Op {
    Init(Basis, usize),
    Meas(Basis, usize),
    Cnot(usize, usize),
    /// `H_b Λ_{a,b} H_b`.
    Cz(usize, usize),
    /// `H_a Λ_{a,b} H_a`: X-controlled X, symmetric in its qubits.
    Xcx(usize, usize),
    H(usize),
    S(usize),
    /// `H S H`.
    Sx(usize),
    I(usize),
    X(usize),
    Y(usize),
    Z(usize),
}

impl Op {
    #[must_use]
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Op::Cnot(c, t) | Op::Cz(c, t) | Op::Xcx(c, t) => vec![c, t],
            Op::Init(_, q)
            | Op::Meas(_, q)
            | Op::H(q)
            | Op::S(q)
            | Op::Sx(q)
            | Op::I(q)
            | Op::X(q)
            | Op::Y(q)
            | Op::Z(q) => vec![q],
        }
    }

    /// Identity and Pauli gates leave the LDPC description unchanged.
    #[must_use]
    pub fn is_trivial(&self) -> bool {
        matches!(self, Op::I(_) | Op::X(_) | Op::Y(_) | Op::Z(_))
    }

    #[must_use]
    pub fn mnemonic(&self) -> &'static str {
        match self {
            Op::Init(Basis::Z, _) => "rz",
            Op::Init(Basis::X, _) => "rx",
            Op::Meas(Basis::Z, _) => "mz",
            Op::Meas(Basis::X, _) => "mx",
            Op::Cnot(..) => "cnot",
            Op::Cz(..) => "cz",
            Op::Xcx(..) => "xcx",
            Op::H(_) => "h",
            Op::S(_) => "s",
            Op::Sx(_) => "sx",
            Op::I(_) => "i",
            Op::X(_) => "x",
            Op::Y(_) => "y",
            Op::Z(_) => "z",
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Op::Cnot(a, b) | Op::Cz(a, b) | Op::Xcx(a, b) => write!(f, "{} {a} {b}", self.mnemonic()),
            op => write!(f, "{} {}", op.mnemonic(), op.qubits()[0]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ViolationKind {
    QubitOutOfRange(usize),
    ControlEqualsTarget(usize),
    DuplicateQubit(usize),
    /// A non-trivial operation other than an initialisation follows a measurement.
    GateAfterMeasurement(usize),
    /// An initialisation on a qubit that is neither fresh nor just measured.
    InitOnLiveQubit(usize),
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::QubitOutOfRange(q) => write!(f, "qubit {q} out of range"),
            ViolationKind::ControlEqualsTarget(q) => write!(f, "cnot control equals target ({q})"),
            ViolationKind::DuplicateQubit(q) => write!(f, "qubit {q} used twice in one layer"),
            ViolationKind::GateAfterMeasurement(q) => write!(f, "qubit {q} used after measurement without re-initialisation"),
            ViolationKind::InitOnLiveQubit(q) => write!(f, "qubit {q} initialised while still in use"),
        }
    }
}

/// A rule violation at a 1-based layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub layer: usize,
    pub kind: ViolationKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CircuitError {
    #[error("line {line}: unknown mnemonic `{word}`")]
    UnknownMnemonic { line: usize, word: String },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: {kind}")]
    Invalid { line: usize, kind: ViolationKind },
    #[error("circuit invalid: {0:?}")]
    Violations(Vec<Violation>),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Circuit {
    pub n_qubits: usize,
    pub layers: Vec<Vec<Op>>,
}

/// Where a qubit stands while scanning its operations.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Track {
    Fresh,
    Live,
    Measured,
}

impl Circuit {
    #[must_use]
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, layers: Vec::new() }
    }

    #[must_use]
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn push_layer(&mut self, ops: Vec<Op>) {
        self.layers.push(ops);
    }

    /// Operation acting on `q` in layer `t` (1-based), if any.
    #[must_use]
    pub fn op_at(&self, q: usize, t: usize) -> Option<Op> {
        self.layers[t - 1].iter().copied().find(|op| op.qubits().contains(&q))
    }

    /// Sort each layer by smallest qubit.
    pub fn canonicalize(&mut self) {
        for layer in &mut self.layers {
            layer.sort_by_key(|op| op.qubits().into_iter().min().unwrap_or(0));
        }
    }

    /// Check every structural rule and report all violations.
    #[must_use]
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut track = vec![Track::Fresh; self.n_qubits + 1];
        for (ti, layer) in self.layers.iter().enumerate() {
            let t = ti + 1;
            let mut seen = BTreeSet::new();
            for op in layer {
                let qs = op.qubits();
                let mut ok = true;
                for &q in &qs {
                    if q == 0 || q > self.n_qubits {
                        out.push(Violation { layer: t, kind: ViolationKind::QubitOutOfRange(q) });
                        ok = false;
                    } else if !seen.insert(q) {
                        out.push(Violation { layer: t, kind: ViolationKind::DuplicateQubit(q) });
                        ok = false;
                    }
                }
                if let Op::Cnot(c, tg) | Op::Cz(c, tg) | Op::Xcx(c, tg) = *op {
                    if c == tg {
                        out.push(Violation { layer: t, kind: ViolationKind::ControlEqualsTarget(c) });
                        ok = false;
                    }
                }
                if !ok {
                    continue;
                }
                for &q in &qs {
                    if let Some(kind) = step_track(&mut track[q], op, q) {
                        out.push(Violation { layer: t, kind });
                    }
                }
            }
        }
        out
    }

    #[must_use]
    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Measurements in canonical order: by layer, then by qubit.
    #[must_use]
    pub fn measurements(&self) -> Vec<OpRef> {
        self.collect_refs(|op| match op {
            Op::Meas(b, q) => Some((q, b)),
            _ => None,
        })
    }

    #[must_use]
    pub fn initialisations(&self) -> Vec<OpRef> {
        self.collect_refs(|op| match op {
            Op::Init(b, q) => Some((q, b)),
            _ => None,
        })
    }

    fn collect_refs(&self, f: impl Fn(Op) -> Option<(usize, Basis)>) -> Vec<OpRef> {
        let mut out = Vec::new();
        for (ti, layer) in self.layers.iter().enumerate() {
            let mut here: Vec<OpRef> = layer
                .iter()
                .filter_map(|&op| f(op))
                .map(|(qubit, basis)| OpRef { layer: ti + 1, qubit, basis })
                .collect();
            here.sort_by_key(|r| r.qubit);
            out.extend(here);
        }
        out
    }

    /// Per-qubit liveness: `live[q][t]` says whether qubit `q` carries a state
    /// at the boundary after layer `t` (t = 0 is the circuit input).
    #[must_use]
    pub fn liveness(&self) -> Vec<Vec<bool>> {
        let t_max = self.depth();
        let mut live = vec![vec![false; t_max + 1]; self.n_qubits + 1];
        for q in 1..=self.n_qubits {
            let first = (1..=t_max).find_map(|t| self.op_at(q, t).filter(|op| !op.is_trivial()));
            let mut state = !matches!(first, Some(Op::Init(..)));
            live[q][0] = state;
            for t in 1..=t_max {
                match self.op_at(q, t) {
                    Some(Op::Init(..)) => state = true,
                    Some(Op::Meas(..)) => state = false,
                    _ => {}
                }
                live[q][t] = state;
            }
        }
        live
    }

    /// Emit the text format. Each layer is followed by a `tick` line.
    #[must_use]
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        writeln!(s, "qubits {}", self.n_qubits).expect("string write");
        for layer in &self.layers {
            for op in layer {
                writeln!(s, "{op}").expect("string write");
            }
            writeln!(s, "tick").expect("string write");
        }
        s
    }

    /// Build the extended circuit: initialisations in one leading layer,
    /// measurements in one trailing layer, and each measurement followed by a
    /// re-initialisation replaced by a swap with a fresh ancilla.
    ///
    /// # Panics
    /// Panics on an invalid circuit.
    #[must_use]
    pub fn extend(&self) -> ExtendedCircuit {
        assert!(self.is_valid(), "extend requires a valid circuit");
        let n = self.n_qubits;
        let live = self.liveness();
        let mut pairs = Vec::new();
        let mut single_inits = Vec::new();
        let mut single_meas = Vec::new();
        let mut pending: Vec<Option<OpRef>> = vec![None; n + 1];
        for t in 1..=self.depth() {
            for op in self.layers[t - 1].iter().copied() {
                match op {
                    Op::Meas(basis, q) => pending[q] = Some(OpRef { layer: t, qubit: q, basis }),
                    Op::Init(basis, q) => {
                        let init = OpRef { layer: t, qubit: q, basis };
                        if let Some(meas) = pending[q].take() {
                            pairs.push(Pair { label: pairs.len() + 1, ancilla: 0, meas, init });
                        } else {
                            single_inits.push(init);
                        }
                    }
                    _ => {}
                }
            }
        }
        for m in pending.into_iter().flatten() {
            single_meas.push(m);
        }
        pairs.sort_by_key(|p| (p.meas.layer, p.meas.qubit));
        for (i, p) in pairs.iter_mut().enumerate() {
            p.label = i + 1;
            p.ancilla = n + i + 1;
        }
        single_inits.sort_by_key(|r| (r.layer, r.qubit));
        single_meas.sort_by_key(|r| (r.layer, r.qubit));

        let mut middle = Vec::with_capacity(self.depth());
        for t in 1..=self.depth() {
            let mut gates = Vec::new();
            for op in self.layers[t - 1].iter().copied() {
                let q0 = op.qubits()[0];
                let live_here = live[q0][t - 1];
                match op {
                    Op::Cnot(c, tg) => gates.push(Gate::Cnot(c, tg)),
                    Op::Cz(a, b) => gates.push(Gate::Cz(a, b)),
                    Op::Xcx(a, b) => gates.push(Gate::Xcx(a, b)),
                    Op::H(q) => gates.push(Gate::H(q)),
                    Op::S(q) => gates.push(Gate::S(q)),
                    Op::Sx(q) => gates.push(Gate::Sx(q)),
                    Op::X(q) if live_here => gates.push(Gate::X(q)),
                    Op::Y(q) if live_here => gates.push(Gate::Y(q)),
                    Op::Z(q) if live_here => gates.push(Gate::Z(q)),
                    Op::Meas(_, q) => {
                        if let Some(p) = pairs.iter().find(|p| p.meas.layer == t && p.meas.qubit == q) {
                            gates.push(Gate::Swap(q, p.ancilla));
                        }
                    }
                    _ => {}
                }
            }
            middle.push(gates);
        }
        ExtendedCircuit { n_original: n, n_total: n + pairs.len(), middle, single_inits, single_meas, pairs }
    }
}

fn step_track(state: &mut Track, op: &Op, q: usize) -> Option<ViolationKind> {
    if op.is_trivial() {
        return None;
    }
    match (*state, op) {
        (Track::Measured, Op::Init(..)) | (Track::Fresh, Op::Init(..)) => {
            *state = Track::Live;
            None
        }
        (Track::Live, Op::Init(..)) => Some(ViolationKind::InitOnLiveQubit(q)),
        (Track::Measured, _) => Some(ViolationKind::GateAfterMeasurement(q)),
        (_, Op::Meas(..)) => {
            *state = Track::Measured;
            None
        }
        _ => {
            *state = Track::Live;
            None
        }
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// An initialisation or measurement at a 1-based layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OpRef {
    pub layer: usize,
    pub qubit: usize,
    pub basis: Basis,
}

/// A measurement followed by a re-initialisation of the same qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pair {
    /// 1-based pair label `l`.
    pub label: usize,
    /// Ancilla qubit `n + l`.
    pub ancilla: usize,
    pub meas: OpRef,
    pub init: OpRef,
}

/// Unitary gates of the extended circuit. Qubits are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    Cnot(usize, usize),
    Cz(usize, usize),
    Xcx(usize, usize),
    H(usize),
    S(usize),
    Sx(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Swap(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedCircuit {
    pub n_original: usize,
    /// `n + n_P`.
    pub n_total: usize,
    /// Unitary layers, one per original layer; Paulis on dead qubits dropped.
    pub middle: Vec<Vec<Gate>>,
    /// Initialisations not preceded by a measurement (`V_{I,S}`).
    pub single_inits: Vec<OpRef>,
    /// Measurements not followed by a re-initialisation (`V_{M,S}`).
    pub single_meas: Vec<OpRef>,
    pub pairs: Vec<Pair>,
}

impl ExtendedCircuit {
    #[must_use]
    pub fn n_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// The leading initialisation layer as (qubit, basis): original qubits of
    /// `V_{I,S}` and one ancilla per pair, prepared in the pair's init basis.
    #[must_use]
    pub fn init_layer(&self) -> Vec<(usize, Basis)> {
        let mut v: Vec<(usize, Basis)> = self.single_inits.iter().map(|r| (r.qubit, r.basis)).collect();
        v.extend(self.pairs.iter().map(|p| (p.ancilla, p.init.basis)));
        v
    }

    /// The trailing measurement layer as (qubit, basis).
    #[must_use]
    pub fn measurement_layer(&self) -> Vec<(usize, Basis)> {
        let mut v: Vec<(usize, Basis)> = self.single_meas.iter().map(|r| (r.qubit, r.basis)).collect();
        v.extend(self.pairs.iter().map(|p| (p.ancilla, p.meas.basis)));
        v
    }

    /// Express the extended circuit as an ordinary circuit of depth `T + 2`,
    /// with each swap realised as three CNOTs spread over sub-layers.
    #[must_use]
    pub fn to_circuit(&self) -> Circuit {
        let mut c = Circuit::new(self.n_total);
        c.push_layer(self.init_layer().into_iter().map(|(q, b)| Op::Init(b, q)).collect());
        for layer in &self.middle {
            let mut main = Vec::new();
            let mut swaps = Vec::new();
            for g in layer {
                match *g {
                    Gate::Cnot(a, b) => main.push(Op::Cnot(a, b)),
                    Gate::Cz(a, b) => main.push(Op::Cz(a, b)),
                    Gate::Xcx(a, b) => main.push(Op::Xcx(a, b)),
                    Gate::H(q) => main.push(Op::H(q)),
                    Gate::S(q) => main.push(Op::S(q)),
                    Gate::Sx(q) => main.push(Op::Sx(q)),
                    Gate::X(q) => main.push(Op::X(q)),
                    Gate::Y(q) => main.push(Op::Y(q)),
                    Gate::Z(q) => main.push(Op::Z(q)),
                    Gate::Swap(a, b) => swaps.push((a, b)),
                }
            }
            c.push_layer(main);
            if !swaps.is_empty() {
                c.push_layer(swaps.iter().map(|&(a, b)| Op::Cnot(a, b)).collect());
                c.push_layer(swaps.iter().map(|&(a, b)| Op::Cnot(b, a)).collect());
                c.push_layer(swaps.iter().map(|&(a, b)| Op::Cnot(a, b)).collect());
            }
        }
        c.push_layer(self.measurement_layer().into_iter().map(|(q, b)| Op::Meas(b, q)).collect());
        c
    }
}

/// Parse the text format. The result is validated.
pub fn parse_circuit(text: &str) -> Result<Circuit, CircuitError> {
    let mut n: Option<usize> = None;
    let mut layers: Vec<Vec<Op>> = Vec::new();
    let mut current: Vec<Op> = Vec::new();
    let mut current_lines: Vec<usize> = Vec::new();
    let mut op_lines: Vec<Vec<usize>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let words: Vec<&str> = content.split_whitespace().collect();
        let arg = |k: usize| -> Result<usize, CircuitError> {
            words
                .get(k)
                .ok_or(CircuitError::Syntax { line, msg: format!("`{}` needs more arguments", words[0]) })?
                .parse()
                .map_err(|_| CircuitError::Syntax { line, msg: format!("bad qubit index `{}`", words[k]) })
        };
        let arity = |k: usize| -> Result<(), CircuitError> {
            if words.len() == k + 1 {
                Ok(())
            } else {
                Err(CircuitError::Syntax { line, msg: format!("`{}` takes {k} argument(s)", words[0]) })
            }
        };
        if words[0] == "qubits" {
            if n.is_some() {
                return Err(CircuitError::Syntax { line, msg: "duplicate `qubits` header".into() });
            }
            arity(1)?;
            n = Some(arg(1)?);
            continue;
        }
        let Some(nq) = n else {
            return Err(CircuitError::Syntax { line, msg: "missing `qubits` header".into() });
        };
        if words[0] == "tick" {
            arity(0)?;
            layers.push(std::mem::take(&mut current));
            op_lines.push(std::mem::take(&mut current_lines));
            continue;
        }
        let op = match words[0] {
            "cnot" | "cz" | "xcx" => {
                arity(2)?;
                let make = match words[0] {
                    "cnot" => Op::Cnot,
                    "cz" => Op::Cz,
                    _ => Op::Xcx,
                };
                make(arg(1)?, arg(2)?)
            }
            w => {
                let make: fn(usize) -> Op = match w {
                    "rz" => |q| Op::Init(Basis::Z, q),
                    "rx" => |q| Op::Init(Basis::X, q),
                    "mz" => |q| Op::Meas(Basis::Z, q),
                    "mx" => |q| Op::Meas(Basis::X, q),
                    "h" => Op::H,
                    "s" => Op::S,
                    "sx" => Op::Sx,
                    "i" => Op::I,
                    "x" => Op::X,
                    "y" => Op::Y,
                    "z" => Op::Z,
                    _ => return Err(CircuitError::UnknownMnemonic { line, word: w.to_string() }),
                };
                arity(1)?;
                make(arg(1)?)
            }
        };
        for q in op.qubits() {
            if q == 0 || q > nq {
                return Err(CircuitError::Invalid { line, kind: ViolationKind::QubitOutOfRange(q) });
            }
        }
        current.push(op);
        current_lines.push(line);
    }
    let Some(n_qubits) = n else {
        return Err(CircuitError::Syntax { line: 1, msg: "missing `qubits` header".into() });
    };
    if !current.is_empty() {
        layers.push(current);
        op_lines.push(current_lines);
    }
    let c = Circuit { n_qubits, layers };
    if let Some(v) = c.validate().into_iter().next() {
        let q = match v.kind {
            ViolationKind::QubitOutOfRange(q)
            | ViolationKind::ControlEqualsTarget(q)
            | ViolationKind::DuplicateQubit(q)
            | ViolationKind::GateAfterMeasurement(q)
            | ViolationKind::InitOnLiveQubit(q) => q,
        };
        let layer = &c.layers[v.layer - 1];
        let pos = layer.iter().rposition(|op| op.qubits().contains(&q)).unwrap_or(0);
        let line = op_lines[v.layer - 1].get(pos).copied().unwrap_or(0);
        return Err(CircuitError::Invalid { line, kind: v.kind });
    }
    Ok(c)
}

/// Which operations a random circuit may contain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateSet {
    /// Z-basis initialisation and measurement, CNOT, H, S, identity.
    ZBasis,
    /// Everything the IR supports, including X-basis operations and Paulis.
    Full,
    /// Gates only: CNOT, H, S, identity and Paulis.
    Unitary,
}

/// A random valid circuit on `n` qubits with `depth` layers.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R, n: usize, depth: usize, set: GateSet) -> Circuit {
    let mut c = Circuit::new(n);
    let mut track = vec![Track::Fresh; n + 1];
    // a measurement right after an initialisation carries no information
    let mut just_init = vec![false; n + 1];
    let basis = |rng: &mut R| if set == GateSet::Full && rng.gen_bool(0.5) { Basis::X } else { Basis::Z };
    for _ in 0..depth {
        let mut order: Vec<usize> = (1..=n).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, rng.gen_range(0..=i));
        }
        let mut used = vec![false; n + 1];
        let mut layer = Vec::new();
        for &q in &order {
            if used[q] {
                continue;
            }
            let roll: f64 = rng.gen();
            let op = match track[q] {
                Track::Measured => {
                    if roll < 0.5 {
                        Some(Op::Init(basis(rng), q))
                    } else if roll < 0.65 && set == GateSet::Full {
                        Some(Op::X(q))
                    } else {
                        None
                    }
                }
                Track::Fresh if roll < 0.15 && set != GateSet::Unitary => Some(Op::Init(basis(rng), q)),
                _ => {
                    let partner = order.iter().copied().find(|&p| p != q && !used[p] && track[p] != Track::Measured);
                    let roll: f64 = rng.gen();
                    if roll < 0.35 {
                        partner.map(|p| if rng.gen_bool(0.5) { Op::Cnot(q, p) } else { Op::Cnot(p, q) })
                    } else if roll < 0.5 {
                        Some(Op::H(q))
                    } else if roll < 0.65 {
                        Some(Op::S(q))
                    } else if roll < 0.75 && set != GateSet::Unitary {
                        Some(if just_init[q] { Op::I(q) } else { Op::Meas(basis(rng), q) })
                    } else if roll < 0.85 && set != GateSet::ZBasis {
                        Some(match rng.gen_range(0..3) {
                            0 => Op::X(q),
                            1 => Op::Y(q),
                            _ => Op::Z(q),
                        })
                    } else if roll < 0.9 {
                        Some(Op::I(q))
                    } else {
                        None
                    }
                }
            };
            if let Some(op) = op {
                for p in op.qubits() {
                    used[p] = true;
                    just_init[p] = matches!(op, Op::Init(..));
                    let _ = step_track(&mut track[p], &op, p);
                }
                layer.push(op);
            }
        }
        for q in 1..=n {
            just_init[q] &= used[q];
        }
        c.push_layer(layer);
    }
    debug_assert!(c.is_valid(), "generator produced an invalid circuit:\n{c}");
    c
}
