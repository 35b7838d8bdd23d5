//! Tanner graphs of stabiliser circuits, bit splitting, and bit-check symmetry.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use rand::Rng;
use thiserror::Error;

use crate::circuit::{Basis, Circuit, Op};
use crate::gf2::{BitMatrix, BitVector};

/// Pauli component carried by a bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    X,
    Z,
}

impl Component {
    #[must_use]
    pub fn other(self) -> Self {
        match self {
            Component::X => Component::Z,
            Component::Z => Component::X,
        }
    }
}

/// Physical position of a bit: component, 1-based qubit, layer boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub comp: Component,
    pub qubit: usize,
    pub layer: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BitKind {
    /// `x[q,t]` or `z[q,t]`, as given by `slot`.
    Primary,
    /// Added by splitting, or an unlabelled column; named `s<serial>`.
    Aux,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BitLabel {
    pub kind: BitKind,
    /// For aux bits, the slot of the bit they were split from, if any.
    pub slot: Option<Slot>,
    pub serial: usize,
    /// Index into the circuit's measurement list.
    pub meas: Option<usize>,
    /// Index into the circuit's initialisation list.
    pub init: Option<usize>,
}

impl BitLabel {
    #[must_use]
    pub fn primary(slot: Slot) -> Self {
        Self { kind: BitKind::Primary, slot: Some(slot), serial: 0, meas: None, init: None }
    }

    #[must_use]
    pub fn aux(serial: usize, slot: Option<Slot>) -> Self {
        Self { kind: BitKind::Aux, slot, serial, meas: None, init: None }
    }

    #[must_use]
    pub fn name(&self) -> String {
        match (self.kind, self.slot) {
            (BitKind::Primary, Some(s)) => {
                let c = if s.comp == Component::X { 'x' } else { 'z' };
                format!("{c}[{},{}]", s.qubit, s.layer)
            }
            _ => format!("s{}", self.serial),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CheckKind {
    Gadget,
    Aux,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CheckLabel {
    pub kind: CheckKind,
    /// Layer of the gadget (0 for unlabelled checks).
    pub layer: usize,
    /// Smallest qubit of the gadget (0 for unlabelled checks).
    pub qubit: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TannerError {
    #[error("split partition of bit {bit} does not match its neighbourhood")]
    BadPartition { bit: usize },
    #[error("qubit {qubit} is measured right after its initialisation at layer {layer}; the line carries no bit to split")]
    Unsymmetrizable { qubit: usize, layer: usize },
    #[error("label file line {line}: {msg}")]
    Labels { line: usize, msg: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
}

/// Bipartite graph of bits and checks with vertex metadata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TannerGraph {
    pub n_qubits: usize,
    pub depth: usize,
    pub bits: Vec<BitLabel>,
    pub checks: Vec<CheckLabel>,
    /// Sorted bit neighbours of each check.
    pub check_bits: Vec<Vec<usize>>,
    /// Bit of each circuit measurement, in circuit order (None if removed).
    pub meas_bits: Vec<Option<usize>>,
    /// Bit of each circuit initialisation, in circuit order (None if removed).
    pub init_bits: Vec<Option<usize>>,
    next_serial: usize,
}

impl TannerGraph {
    /// Graph of an arbitrary check matrix, with unlabelled vertices.
    #[must_use]
    pub fn from_matrix(a: &BitMatrix) -> Self {
        Self {
            n_qubits: 0,
            depth: 0,
            bits: (0..a.n_cols()).map(|i| BitLabel::aux(i, None)).collect(),
            checks: vec![CheckLabel { kind: CheckKind::Aux, layer: 0, qubit: 0 }; a.n_rows()],
            check_bits: a.rows().iter().map(|r| r.ones().collect()).collect(),
            meas_bits: Vec::new(),
            init_bits: Vec::new(),
            next_serial: a.n_cols(),
        }
    }

    /// Graph of a check matrix with explicit bit labels.
    ///
    /// # Panics
    /// Panics if the label count differs from the column count.
    #[must_use]
    pub fn with_labels(a: &BitMatrix, bits: Vec<BitLabel>, n_qubits: usize, depth: usize) -> Self {
        assert_eq!(bits.len(), a.n_cols(), "one label per column");
        let next_serial = bits.iter().map(|b| b.serial + 1).max().unwrap_or(0);
        let n_meas = bits.iter().filter_map(|b| b.meas).map(|m| m + 1).max().unwrap_or(0);
        let n_init = bits.iter().filter_map(|b| b.init).map(|m| m + 1).max().unwrap_or(0);
        let mut meas_bits = vec![None; n_meas];
        let mut init_bits = vec![None; n_init];
        for (i, b) in bits.iter().enumerate() {
            if let Some(m) = b.meas {
                meas_bits[m] = Some(i);
            }
            if let Some(m) = b.init {
                init_bits[m] = Some(i);
            }
        }
        Self {
            n_qubits,
            depth,
            bits,
            checks: vec![CheckLabel { kind: CheckKind::Aux, layer: 0, qubit: 0 }; a.n_rows()],
            check_bits: a.rows().iter().map(|r| r.ones().collect()).collect(),
            meas_bits,
            init_bits,
            next_serial,
        }
    }

    #[must_use]
    pub fn n_bits(&self) -> usize {
        self.bits.len()
    }

    #[must_use]
    pub fn n_checks(&self) -> usize {
        self.checks.len()
    }

    #[must_use]
    pub fn n_edges(&self) -> usize {
        self.check_bits.iter().map(Vec::len).sum()
    }

    /// Check matrix: rows are checks, columns are bits.
    #[must_use]
    pub fn check_matrix(&self) -> BitMatrix {
        let mut a = BitMatrix::zeros(self.n_checks(), self.n_bits());
        for (r, bits) in self.check_bits.iter().enumerate() {
            for &b in bits {
                a.set(r, b, true);
            }
        }
        a
    }

    /// Checks adjacent to each bit, sorted.
    #[must_use]
    pub fn bit_checks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_bits()];
        for (c, bits) in self.check_bits.iter().enumerate() {
            for &b in bits {
                out[b].push(c);
            }
        }
        out
    }

    #[must_use]
    pub fn max_degree(&self) -> usize {
        let bit_max = self.bit_checks().iter().map(Vec::len).max().unwrap_or(0);
        let check_max = self.check_bits.iter().map(Vec::len).max().unwrap_or(0);
        bit_max.max(check_max)
    }

    #[must_use]
    pub fn bit_name(&self, b: usize) -> String {
        self.bits[b].name()
    }

    #[must_use]
    pub fn check_name(&self, c: usize) -> String {
        format!("c{c}")
    }

    #[must_use]
    pub fn find_bit(&self, name: &str) -> Option<usize> {
        self.bits.iter().position(|b| b.name() == name)
    }

    #[must_use]
    pub fn find_check(&self, name: &str) -> Option<usize> {
        let k: usize = name.strip_prefix('c')?.parse().ok()?;
        (k < self.n_checks()).then_some(k)
    }

    /// Bit sitting at a primary slot, if present.
    #[must_use]
    pub fn bit_at(&self, slot: Slot) -> Option<usize> {
        self.bits.iter().position(|b| b.kind == BitKind::Primary && b.slot == Some(slot))
    }

    /// For layer `t`, the bit index of each of the `2n` slots `(x_1..x_n, z_1..z_n)`.
    #[must_use]
    pub fn layer_slots(&self, t: usize) -> Vec<Option<usize>> {
        let n = self.n_qubits;
        let mut out = vec![None; 2 * n];
        for (i, b) in self.bits.iter().enumerate() {
            if b.kind != BitKind::Primary {
                continue;
            }
            if let Some(s) = b.slot {
                if s.layer == t {
                    let off = if s.comp == Component::X { 0 } else { n };
                    out[off + s.qubit - 1] = Some(i);
                }
            }
        }
        out
    }

    /// Append a bit and return its index.
    pub fn add_bit(&mut self, label: BitLabel) -> usize {
        self.bits.push(label);
        self.bits.len() - 1
    }

    pub fn add_aux_bit(&mut self, slot: Option<Slot>) -> usize {
        let serial = self.next_serial;
        self.next_serial += 1;
        self.add_bit(BitLabel::aux(serial, slot))
    }

    /// Append a check with the given neighbours and return its index.
    pub fn add_check(&mut self, label: CheckLabel, mut bits: Vec<usize>) -> usize {
        bits.sort_unstable();
        bits.dedup();
        self.checks.push(label);
        self.check_bits.push(bits);
        self.checks.len() - 1
    }

    /// Deterministic Graphviz rendering, bits ranked by layer.
    #[must_use]
    pub fn export_dot(&self) -> String {
        let mut s = String::from("graph tanner {\n");
        if self.n_bits() == 0 && self.n_checks() == 0 {
            s.push_str("}\n");
            return s;
        }
        for b in &self.bits {
            writeln!(s, "  \"{}\" [shape=ellipse];", b.name()).expect("string write");
        }
        for c in 0..self.n_checks() {
            writeln!(s, "  \"{}\" [shape=box];", self.check_name(c)).expect("string write");
        }
        for (c, bits) in self.check_bits.iter().enumerate() {
            for &b in bits {
                writeln!(s, "  \"{}\" -- \"{}\";", self.check_name(c), self.bits[b].name()).expect("string write");
            }
        }
        let mut layers: std::collections::BTreeMap<usize, Vec<String>> = std::collections::BTreeMap::new();
        for b in &self.bits {
            if let (BitKind::Primary, Some(slot)) = (b.kind, b.slot) {
                layers.entry(slot.layer).or_default().push(format!("\"{}\"", b.name()));
            }
        }
        for names in layers.values() {
            writeln!(s, "  {{ rank=same; {}; }}", names.join("; ")).expect("string write");
        }
        s.push_str("}\n");
        s
    }

    /// Sidecar label file: header comment then `col kind q t flags` per bit.
    #[must_use]
    pub fn labels_text(&self) -> String {
        let mut s = format!("# qubits {} depth {}\n", self.n_qubits, self.depth);
        for (i, b) in self.bits.iter().enumerate() {
            let (kind, q, t) = match (b.kind, b.slot) {
                (BitKind::Primary, Some(sl)) => (if sl.comp == Component::X { "x" } else { "z" }, sl.qubit, sl.layer),
                (_, Some(sl)) => ("s", sl.qubit, sl.layer),
                (_, None) => ("s", 0, 0),
            };
            let mut flags = Vec::new();
            if b.kind == BitKind::Aux {
                flags.push(format!("n{}", b.serial));
                if let Some(sl) = b.slot {
                    flags.push(if sl.comp == Component::X { "ox".into() } else { "oz".into() });
                }
            }
            if let Some(m) = b.meas {
                flags.push(format!("m{m}"));
            }
            if let Some(m) = b.init {
                flags.push(format!("i{m}"));
            }
            let flags = if flags.is_empty() { "-".to_string() } else { flags.join(",") };
            writeln!(s, "{i} {kind} {q} {t} {flags}").expect("string write");
        }
        s
    }

    /// Rebuild a labelled graph from a check matrix and its sidecar label file.
    pub fn from_matrix_and_labels(a: &BitMatrix, text: &str) -> Result<Self, TannerError> {
        let mut n_qubits = 0;
        let mut depth = 0;
        let mut labels = vec![None; a.n_cols()];
        for (i, line) in text.lines().enumerate() {
            let ln = i + 1;
            let line = line.trim();
            if let Some(rest) = line.strip_prefix('#') {
                let w: Vec<&str> = rest.split_whitespace().collect();
                if let ["qubits", n, "depth", t] = w[..] {
                    n_qubits = n.parse().map_err(|_| TannerError::Labels { line: ln, msg: "bad header".into() })?;
                    depth = t.parse().map_err(|_| TannerError::Labels { line: ln, msg: "bad header".into() })?;
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let w: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| TannerError::Labels { line: ln, msg: msg.to_string() };
            if w.len() != 5 {
                return Err(bad("expected `col kind q t flags`"));
            }
            let col: usize = w[0].parse().map_err(|_| bad("bad column"))?;
            let q: usize = w[2].parse().map_err(|_| bad("bad qubit"))?;
            let t: usize = w[3].parse().map_err(|_| bad("bad layer"))?;
            if col >= a.n_cols() {
                return Err(bad("column out of range"));
            }
            let mut label = match w[1] {
                "x" => BitLabel::primary(Slot { comp: Component::X, qubit: q, layer: t }),
                "z" => BitLabel::primary(Slot { comp: Component::Z, qubit: q, layer: t }),
                "s" => BitLabel::aux(col, None),
                _ => return Err(bad("kind must be x, z or s")),
            };
            if w[4] != "-" {
                for f in w[4].split(',') {
                    let num = |s: &str| s.parse::<usize>().map_err(|_| bad("bad flag"));
                    if let Some(v) = f.strip_prefix('n') {
                        label.serial = num(v)?;
                    } else if f == "ox" || f == "oz" {
                        let comp = if f == "ox" { Component::X } else { Component::Z };
                        label.slot = Some(Slot { comp, qubit: q, layer: t });
                    } else if let Some(v) = f.strip_prefix('m') {
                        label.meas = Some(num(v)?);
                    } else if let Some(v) = f.strip_prefix('i') {
                        label.init = Some(num(v)?);
                    } else {
                        return Err(bad("unknown flag"));
                    }
                }
            }
            labels[col] = Some(label);
        }
        let bits = labels
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or(TannerError::Labels { line: 0, msg: format!("column {i} has no label") }))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::with_labels(a, bits, n_qubits, depth))
    }
}

impl fmt::Display for TannerGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TannerGraph: {} bits, {} checks", self.n_bits(), self.n_checks())?;
        for (c, bits) in self.check_bits.iter().enumerate() {
            let names: Vec<String> = bits.iter().map(|&b| self.bit_name(b)).collect();
            writeln!(f, "  c{c}: {}", names.join(" "))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Linear maps between codes

/// A code isomorphism `ker A → ker A′` together with an error embedding.
///
/// `value_of[u]` lists the source bits whose sum gives the image's bit `u`;
/// `err_target[v]` is the bit that carries an error placed on source bit `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeMap {
    pub src_bits: usize,
    pub dst_bits: usize,
    pub value_of: Vec<Vec<usize>>,
    pub err_target: Vec<usize>,
}

impl CodeMap {
    #[must_use]
    pub fn identity(n: usize) -> Self {
        Self { src_bits: n, dst_bits: n, value_of: (0..n).map(|i| vec![i]).collect(), err_target: (0..n).collect() }
    }

    #[must_use]
    pub fn map_codeword(&self, c: &BitVector) -> BitVector {
        assert_eq!(c.len(), self.src_bits, "codeword length mismatch");
        let mut out = BitVector::zeros(self.dst_bits);
        for (u, srcs) in self.value_of.iter().enumerate() {
            if srcs.iter().fold(false, |acc, &v| acc ^ c.get(v)) {
                out.set(u, true);
            }
        }
        out
    }

    #[must_use]
    pub fn map_error(&self, e: &BitVector) -> BitVector {
        assert_eq!(e.len(), self.src_bits, "error length mismatch");
        let mut out = BitVector::zeros(self.dst_bits);
        for v in e.ones() {
            out.set(self.err_target[v], true);
        }
        out
    }

    #[must_use]
    pub fn map_rows(&self, m: &BitMatrix) -> BitMatrix {
        BitMatrix::from_rows(self.dst_bits, m.rows().iter().map(|r| self.map_codeword(r)).collect())
    }

    /// Recover the source codeword from its image.
    #[must_use]
    pub fn invert_codeword(&self, c: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.src_bits);
        for (v, &u) in self.err_target.iter().enumerate() {
            if c.get(u) {
                out.set(v, true);
            }
        }
        out
    }

    /// `self` followed by `next`.
    #[must_use]
    pub fn then(&self, next: &CodeMap) -> CodeMap {
        assert_eq!(self.dst_bits, next.src_bits, "map composition mismatch");
        let value_of = next
            .value_of
            .iter()
            .map(|mid| {
                let mut acc = BTreeSet::new();
                for &m in mid {
                    for &s in &self.value_of[m] {
                        if !acc.insert(s) {
                            acc.remove(&s);
                        }
                    }
                }
                acc.into_iter().collect()
            })
            .collect();
        CodeMap {
            src_bits: self.src_bits,
            dst_bits: next.dst_bits,
            value_of,
            err_target: self.err_target.iter().map(|&m| next.err_target[m]).collect(),
        }
    }

    /// Check that the map is a code isomorphism compatible with the error
    /// embedding: images of a kernel basis lie in `ker a_dst` and stay
    /// independent, dimensions agree, and `ψ(c)` restricted to the error
    /// carriers equals `c`.
    pub fn verify(&self, a_src: &BitMatrix, a_dst: &BitMatrix) -> Result<(), String> {
        if a_src.n_cols() != self.src_bits || a_dst.n_cols() != self.dst_bits {
            return Err("matrix shapes do not match the map".into());
        }
        let mut seen = BTreeSet::new();
        for &t in &self.err_target {
            if !seen.insert(t) {
                return Err(format!("error embedding is not injective at bit {t}"));
            }
        }
        let k = a_src.kernel_basis();
        let k_dst = a_dst.kernel_basis();
        if k.n_rows() != k_dst.n_rows() {
            return Err(format!("kernel dimensions differ: {} vs {}", k.n_rows(), k_dst.n_rows()));
        }
        let images = self.map_rows(&k);
        for (i, img) in images.rows().iter().enumerate() {
            if !a_dst.mul_vec(img).is_zero() {
                return Err(format!("image of kernel basis row {i} is not a codeword"));
            }
            if self.invert_codeword(img) != *k.row(i) {
                return Err(format!("image of kernel basis row {i} disagrees on the error carriers"));
            }
        }
        if images.rank() != k.n_rows() {
            return Err("images of the kernel basis are dependent".into());
        }
        Ok(())
    }

    /// Build the map from anchors alone: the unique `c′ ∈ ker a_dst` whose
    /// values on `anchors` reproduce `c`.
    pub fn from_anchors(a_src: &BitMatrix, a_dst: &BitMatrix, anchors: Vec<usize>) -> Result<CodeMap, String> {
        let k = a_src.kernel_basis();
        let (_, pivots) = k.rref();
        let k_dst = a_dst.kernel_basis();
        if k.n_rows() != k_dst.n_rows() {
            return Err(format!("kernel dimensions differ: {} vs {}", k.n_rows(), k_dst.n_rows()));
        }
        // projection of ker a_dst onto the anchors must be a bijection onto ker a_src
        let proj = k_dst.select_columns(&anchors);
        let dim = k.n_rows();
        // solve coeffs · proj = k_i for each source basis row
        let aug = BitMatrix::hstack(&[&proj.transpose(), &k.transpose()]);
        let (r, piv) = aug.rref();
        if piv.iter().any(|&p| p >= dim) || piv.len() != dim {
            return Err("anchor projection is not a bijection onto the source kernel".into());
        }
        // after reduction the first `dim` columns are the identity
        let mut images = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut img = BitVector::zeros(a_dst.n_cols());
            for (row, &p) in r.rows().iter().zip(&piv) {
                if row.get(dim + i) {
                    img.xor_assign(k_dst.row(p));
                }
            }
            images.push(img);
        }
        for (i, img) in images.iter().enumerate() {
            if img.select(&anchors) != *k.row(i) {
                return Err("anchor projection is not a bijection onto the source kernel".into());
            }
        }
        let mut value_of = vec![Vec::new(); a_dst.n_cols()];
        for (i, img) in images.iter().enumerate() {
            for u in img.ones() {
                value_of[u].push(pivots[i]);
            }
        }
        let map = CodeMap { src_bits: a_src.n_cols(), dst_bits: a_dst.n_cols(), value_of, err_target: anchors };
        map.verify(a_src, a_dst)?;
        Ok(map)
    }
}

// ---------------------------------------------------------------------------
// Gadget templates

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Local {
    out: bool,
    slot: usize,
    comp: Component,
}

const fn loc(out: bool, slot: usize, comp: Component) -> Local {
    Local { out, slot, comp }
}

const XI: Local = loc(false, 0, Component::X);
const ZI: Local = loc(false, 0, Component::Z);
const XO: Local = loc(true, 0, Component::X);
const ZO: Local = loc(true, 0, Component::Z);
const XI1: Local = loc(false, 1, Component::X);
const ZI1: Local = loc(false, 1, Component::Z);
const XO1: Local = loc(true, 1, Component::X);
const ZO1: Local = loc(true, 1, Component::Z);

/// Check rows, long terminals, and the dual pairing (short bit, check index).
struct Template {
    checks: &'static [&'static [Local]],
    long: &'static [Local],
    pairs: &'static [(Local, usize)],
}

impl Template {
    fn long_at(&self, out: bool, slot: usize) -> Option<Component> {
        self.long.iter().find(|l| l.out == out && l.slot == slot).map(|l| l.comp)
    }
}

const ID_CHECKS: &[&[Local]] = &[&[XI, XO], &[ZI, ZO]];
/// Identity with long input z and long output x.
const T_ID_ZX: Template = Template { checks: ID_CHECKS, long: &[ZI, XO], pairs: &[(XI, 1), (ZO, 0)] };
/// Identity with long input x and long output z.
const T_ID_XZ: Template = Template { checks: ID_CHECKS, long: &[XI, ZO], pairs: &[(ZI, 0), (XO, 1)] };
const T_H: Template = Template { checks: &[&[ZI, XO], &[XI, ZO]], long: &[XI, XO], pairs: &[(ZI, 1), (ZO, 0)] };
const T_S: Template = Template { checks: &[&[XI, XO], &[XI, ZI, ZO]], long: &[ZI, XO], pairs: &[(XI, 1), (ZO, 0)] };
const T_CNOT: Template = Template {
    checks: &[&[XI, XO], &[XI, XI1, XO1], &[ZI, ZI1, ZO], &[ZI1, ZO1]],
    long: &[XO, ZO1, XI1, ZI],
    pairs: &[(ZO, 0), (XO1, 3), (ZI1, 1), (XI, 2)],
};
const T_SX: Template = Template { checks: &[&[ZI, ZO], &[ZI, XI, XO]], long: &[XI, ZO], pairs: &[(ZI, 1), (XO, 0)] };
const T_CZ: Template = Template {
    checks: &[&[XI, XO], &[XI1, XO1], &[ZI, XI1, ZO], &[ZI1, XI, ZO1]],
    long: &[ZI, ZI1, XO, XO1],
    pairs: &[(ZO, 0), (ZO1, 1), (XI, 2), (XI1, 3)],
};
const T_XCX: Template = Template {
    checks: &[&[ZI, ZO], &[ZI1, ZO1], &[XI, ZI1, XO], &[XI1, ZI, XO1]],
    long: &[XI, XI1, ZO, ZO1],
    pairs: &[(XO, 0), (XO1, 1), (ZI, 2), (ZI1, 3)],
};
const T_INIT_Z: Template = Template { checks: &[&[XO]], long: &[XO], pairs: &[(ZO, 0)] };
const T_INIT_X: Template = Template { checks: &[&[ZO]], long: &[ZO], pairs: &[(XO, 0)] };
const T_MEAS_Z: Template = Template { checks: &[&[XI]], long: &[XI], pairs: &[(ZI, 0)] };
const T_MEAS_X: Template = Template { checks: &[&[ZI]], long: &[ZI], pairs: &[(XI, 0)] };

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum GadgetKind {
    Identity,
    H,
    S,
    Sx,
    Cnot,
    Cz,
    Xcx,
    Init(Basis),
    Meas(Basis),
}

struct Gadget {
    kind: GadgetKind,
    layer: usize,
    qubits: Vec<usize>,
    template: &'static Template,
    check_ids: Vec<usize>,
}

impl Gadget {
    fn has_inputs(&self) -> bool {
        !matches!(self.kind, GadgetKind::Init(_))
    }

    fn has_outputs(&self) -> bool {
        !matches!(self.kind, GadgetKind::Meas(_))
    }

    fn slot_of(&self, l: Local) -> Slot {
        Slot { comp: l.comp, qubit: self.qubits[l.slot], layer: if l.out { self.layer } else { self.layer - 1 } }
    }

    fn slot_index(&self, q: usize) -> usize {
        self.qubits.iter().position(|&x| x == q).expect("qubit in gadget")
    }
}

fn fixed_template(kind: GadgetKind) -> Option<&'static Template> {
    match kind {
        GadgetKind::Identity => None,
        GadgetKind::H => Some(&T_H),
        GadgetKind::S => Some(&T_S),
        GadgetKind::Sx => Some(&T_SX),
        GadgetKind::Cnot => Some(&T_CNOT),
        GadgetKind::Cz => Some(&T_CZ),
        GadgetKind::Xcx => Some(&T_XCX),
        GadgetKind::Init(Basis::Z) => Some(&T_INIT_Z),
        GadgetKind::Init(Basis::X) => Some(&T_INIT_X),
        GadgetKind::Meas(Basis::Z) => Some(&T_MEAS_Z),
        GadgetKind::Meas(Basis::X) => Some(&T_MEAS_X),
    }
}

/// Long-terminal component of a non-identity operation on `qubit`, at its
/// input (`output = false`) or output side. `None` for trivial operations
/// and for the missing side of initialisations and measurements.
#[must_use]
pub fn op_long_terminal(op: Op, qubit: usize, output: bool) -> Option<Component> {
    let (kind, qubits) = match op {
        Op::Cnot(a, b) => (GadgetKind::Cnot, vec![a, b]),
        Op::Cz(a, b) => (GadgetKind::Cz, vec![a, b]),
        Op::Xcx(a, b) => (GadgetKind::Xcx, vec![a, b]),
        Op::H(q) => (GadgetKind::H, vec![q]),
        Op::S(q) => (GadgetKind::S, vec![q]),
        Op::Sx(q) => (GadgetKind::Sx, vec![q]),
        Op::Init(b, q) => (GadgetKind::Init(b), vec![q]),
        Op::Meas(b, q) => (GadgetKind::Meas(b), vec![q]),
        Op::I(_) | Op::X(_) | Op::Y(_) | Op::Z(_) => return None,
    };
    let slot = qubits.iter().position(|&x| x == qubit)?;
    fixed_template(kind)?.long_at(output, slot)
}

/// Plain graph plus the gadget bookkeeping needed for symmetrisation.
struct Assembly {
    graph: TannerGraph,
    gadgets: Vec<Gadget>,
    /// Compact bit index of every full-array slot (None if isolated).
    slot_bit: std::collections::HashMap<Slot, usize>,
}

fn assemble(c: &Circuit) -> Assembly {
    assert!(c.is_valid(), "Tanner graph construction requires a valid circuit");
    let n = c.n_qubits;
    let depth = c.depth();
    let live = c.liveness();

    // step 2: gadgets per layer, ordered by smallest qubit
    let mut gadgets: Vec<Gadget> = Vec::new();
    for t in 1..=depth {
        let mut here: Vec<(GadgetKind, Vec<usize>)> = Vec::new();
        for q in 1..=n {
            match c.op_at(q, t) {
                Some(Op::Cnot(ctl, tgt)) => {
                    if q == ctl.min(tgt) {
                        here.push((GadgetKind::Cnot, vec![ctl, tgt]));
                    }
                }
                Some(Op::Cz(a, b)) => {
                    if q == a.min(b) {
                        here.push((GadgetKind::Cz, vec![a, b]));
                    }
                }
                Some(Op::Xcx(a, b)) => {
                    if q == a.min(b) {
                        here.push((GadgetKind::Xcx, vec![a, b]));
                    }
                }
                Some(Op::Sx(_)) => here.push((GadgetKind::Sx, vec![q])),
                Some(Op::H(_)) => here.push((GadgetKind::H, vec![q])),
                Some(Op::S(_)) => here.push((GadgetKind::S, vec![q])),
                Some(Op::Init(b, _)) => here.push((GadgetKind::Init(b), vec![q])),
                Some(Op::Meas(b, _)) => here.push((GadgetKind::Meas(b), vec![q])),
                _ => {
                    if live[q][t - 1] {
                        here.push((GadgetKind::Identity, vec![q]));
                    }
                }
            }
        }
        for (kind, qubits) in here {
            let template = fixed_template(kind).unwrap_or(&T_ID_ZX);
            gadgets.push(Gadget { kind, layer: t, qubits, template, check_ids: Vec::new() });
        }
    }

    // identity variants: follow the predecessor's long output, or for a
    // leading run match the first non-identity successor
    let mut per_qubit: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for (gi, g) in gadgets.iter().enumerate() {
        for &q in &g.qubits {
            per_qubit[q].push(gi);
        }
    }
    for q in 1..=n {
        let line = &per_qubit[q];
        for (k, &gi) in line.iter().enumerate() {
            if gadgets[gi].kind != GadgetKind::Identity {
                continue;
            }
            let prev = (k > 0).then(|| line[k - 1]).filter(|&p| gadgets[p].has_outputs() && gadgets[p].layer + 1 == gadgets[gi].layer);
            let in_long = if let Some(p) = prev {
                let pg = &gadgets[p];
                pg.template.long_at(true, pg.slot_index(q)).expect("output long terminal").other()
            } else {
                let next = line[k + 1..]
                    .iter()
                    .copied()
                    .find(|&s| gadgets[s].kind != GadgetKind::Identity)
                    .filter(|&s| gadgets[s].has_inputs());
                match next {
                    Some(s) => {
                        let sg = &gadgets[s];
                        sg.template.long_at(false, sg.slot_index(q)).expect("input long terminal")
                    }
                    None => Component::Z,
                }
            };
            gadgets[gi].template = if in_long == Component::Z { &T_ID_ZX } else { &T_ID_XZ };
        }
    }

    // full bit array, then checks
    let mut all_slots = Vec::with_capacity(2 * n * (depth + 1));
    for t in 0..=depth {
        for comp in [Component::X, Component::Z] {
            for q in 1..=n {
                all_slots.push(Slot { comp, qubit: q, layer: t });
            }
        }
    }
    let mut used: std::collections::HashSet<Slot> = std::collections::HashSet::new();
    for g in &gadgets {
        for row in g.template.checks {
            for &l in *row {
                used.insert(g.slot_of(l));
            }
        }
    }
    // step 3: drop isolated bits
    let mut slot_bit = std::collections::HashMap::new();
    let mut bits = Vec::new();
    for s in all_slots {
        if used.contains(&s) {
            slot_bit.insert(s, bits.len());
            bits.push(BitLabel::primary(s));
        }
    }
    let meas = c.measurements();
    let inits = c.initialisations();
    let mut meas_bits = vec![None; meas.len()];
    let mut init_bits = vec![None; inits.len()];
    for (k, m) in meas.iter().enumerate() {
        let comp = if m.basis == Basis::Z { Component::Z } else { Component::X };
        if let Some(&b) = slot_bit.get(&Slot { comp, qubit: m.qubit, layer: m.layer - 1 }) {
            bits[b].meas = Some(k);
            meas_bits[k] = Some(b);
        }
    }
    for (k, m) in inits.iter().enumerate() {
        let comp = if m.basis == Basis::Z { Component::Z } else { Component::X };
        if let Some(&b) = slot_bit.get(&Slot { comp, qubit: m.qubit, layer: m.layer }) {
            bits[b].init = Some(k);
            init_bits[k] = Some(b);
        }
    }
    let mut graph = TannerGraph {
        n_qubits: n,
        depth,
        bits,
        checks: Vec::new(),
        check_bits: Vec::new(),
        meas_bits,
        init_bits,
        next_serial: 0,
    };
    for g in &mut gadgets {
        let qmin = *g.qubits.iter().min().expect("gadget has qubits");
        for row in g.template.checks {
            let nbrs: Vec<usize> = row.iter().map(|&l| slot_bit[&g.slot_of(l)]).collect();
            let id = graph.add_check(CheckLabel { kind: CheckKind::Gadget, layer: g.layer, qubit: qmin }, nbrs);
            g.check_ids.push(id);
        }
    }
    Assembly { graph, gadgets, slot_bit }
}

/// Plain Tanner graph of a valid circuit.
///
/// Idle qubits carrying a state get identity gadgets, Pauli gates are drawn as
/// identities, and qubits before their first initialisation or after a final
/// measurement carry no bits.
#[must_use]
pub fn build_plain(c: &Circuit) -> TannerGraph {
    assemble(c).graph
}

/// Split bit `v`: it keeps the checks in `n1`, a new bit `v′` takes the checks
/// in `n2`, and a new degree-2 check joins `v` and `v′`.
pub fn bit_split(g: &TannerGraph, v: usize, n1: &[usize], n2: &[usize]) -> Result<(TannerGraph, CodeMap, usize, usize), TannerError> {
    let nbrs: BTreeSet<usize> = g.bit_checks()[v].iter().copied().collect();
    let a: BTreeSet<usize> = n1.iter().copied().collect();
    let b: BTreeSet<usize> = n2.iter().copied().collect();
    if a.len() != n1.len() || b.len() != n2.len() || !a.is_disjoint(&b) || a.union(&b).copied().collect::<BTreeSet<_>>() != nbrs {
        return Err(TannerError::BadPartition { bit: v });
    }
    let mut out = g.clone();
    let slot = g.bits[v].slot;
    let v2 = out.add_aux_bit(slot);
    for &c in n2 {
        let row = &mut out.check_bits[c];
        row.retain(|&x| x != v);
        row.push(v2);
        row.sort_unstable();
    }
    let layer = g.bits[v].slot.map_or(0, |s| s.layer);
    let qubit = g.bits[v].slot.map_or(0, |s| s.qubit);
    let c = out.add_check(CheckLabel { kind: CheckKind::Aux, layer, qubit }, vec![v, v2]);
    let mut value_of: Vec<Vec<usize>> = (0..g.n_bits()).map(|i| vec![i]).collect();
    value_of.push(vec![v]);
    let map = CodeMap { src_bits: g.n_bits(), dst_bits: out.n_bits(), value_of, err_target: (0..g.n_bits()).collect() };
    Ok((out, map, v2, c))
}

// ---------------------------------------------------------------------------
// Bit-check symmetry

/// Dual pairing of checks with non-terminal bits, plus the long terminals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryWitness {
    /// `check_dual[a]` is the bit paired with check `a`.
    pub check_dual: Vec<usize>,
    /// Long terminals, sorted.
    pub long: Vec<usize>,
}

impl SymmetryWitness {
    /// Deleting matrix `D` (bits × checks): `D[v][a] = 1` iff `v` is dual to `a`.
    #[must_use]
    pub fn deleting_matrix(&self, n_bits: usize) -> BitMatrix {
        let mut d = BitMatrix::zeros(n_bits, self.check_dual.len());
        for (a, &v) in self.check_dual.iter().enumerate() {
            d.set(v, a, true);
        }
        d
    }

    /// Read a witness back from a deleting matrix; long terminals are the zero rows.
    pub fn from_deleting_matrix(d: &BitMatrix) -> Result<Self, SymmetryViolation> {
        let t = d.transpose();
        let mut check_dual = Vec::with_capacity(t.n_rows());
        for (a, col) in t.rows().iter().enumerate() {
            if col.weight() != 1 {
                return Err(SymmetryViolation::NotBijection { detail: format!("column {a} of D has weight {}", col.weight()) });
            }
            check_dual.push(col.first_one().expect("weight one"));
        }
        let long = (0..d.n_rows()).filter(|&v| d.row(v).is_zero()).collect();
        Ok(Self { check_dual, long })
    }

    /// Check dual to each bit (None for long terminals).
    #[must_use]
    pub fn bit_dual(&self, n_bits: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n_bits];
        for (a, &v) in self.check_dual.iter().enumerate() {
            out[v] = Some(a);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SymmetryViolation {
    #[error("dual pairing is not a bijection: {detail}")]
    NotBijection { detail: String },
    #[error("condition (i) fails: A·D is not symmetric at checks c{a}, c{b}")]
    Asymmetric { a: usize, b: usize },
    #[error("condition (ii) fails: long terminal {bit} has degree {degree}")]
    LongDegree { bit: usize, degree: usize },
    #[error("condition (iii) fails: long terminals {first} and {second} share check c{check}")]
    SharedCheck { first: usize, second: usize, check: usize },
}

/// Verify the three conditions of bit-check symmetry under the witness.
pub fn verify_symmetry(g: &TannerGraph, w: &SymmetryWitness) -> Result<(), SymmetryViolation> {
    if w.check_dual.len() != g.n_checks() {
        return Err(SymmetryViolation::NotBijection { detail: format!("{} duals for {} checks", w.check_dual.len(), g.n_checks()) });
    }
    let long: BTreeSet<usize> = w.long.iter().copied().collect();
    let mut dual_of_bit = vec![None; g.n_bits()];
    for (a, &v) in w.check_dual.iter().enumerate() {
        if v >= g.n_bits() || long.contains(&v) {
            return Err(SymmetryViolation::NotBijection { detail: format!("check c{a} is paired with a long terminal or unknown bit") });
        }
        if let Some(prev) = dual_of_bit[v].replace(a) {
            return Err(SymmetryViolation::NotBijection { detail: format!("bit {} paired with c{prev} and c{a}", g.bit_name(v)) });
        }
    }
    if let Some(v) = (0..g.n_bits()).find(|&v| dual_of_bit[v].is_none() && !long.contains(&v)) {
        return Err(SymmetryViolation::NotBijection { detail: format!("bit {} has no dual check", g.bit_name(v)) });
    }
    // (i): A[a][D(b)] = A[b][D(a)]
    for (a, bits) in g.check_bits.iter().enumerate() {
        for &u in bits {
            if let Some(b) = dual_of_bit[u] {
                let da = w.check_dual[a];
                if g.check_bits[b].binary_search(&da).is_err() {
                    return Err(SymmetryViolation::Asymmetric { a, b });
                }
            }
        }
    }
    let bit_checks = g.bit_checks();
    let mut owner: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for &v in &w.long {
        let deg = bit_checks[v].len();
        if deg != 1 {
            return Err(SymmetryViolation::LongDegree { bit: v, degree: deg });
        }
        let c = bit_checks[v][0];
        if let Some(first) = owner.insert(c, v) {
            return Err(SymmetryViolation::SharedCheck { first, second: v, check: c });
        }
    }
    Ok(())
}

/// Outcome of [`symmetrize`].
#[derive(Clone, Debug)]
pub struct Symmetrized {
    pub graph: TannerGraph,
    pub witness: SymmetryWitness,
    /// Map from the plain graph's code to the symmetric graph's code.
    pub map: CodeMap,
    /// Number of bit splits applied.
    pub splits: usize,
}

/// Bit-split the plain graph at every asymmetric merge and return the
/// symmetric graph with its witness.
pub fn symmetrize(g: &TannerGraph, c: &Circuit) -> Result<Symmetrized, TannerError> {
    let asm = assemble(c);
    debug_assert_eq!(asm.graph, *g, "graph must be the plain graph of the circuit");
    let mut graph = g.clone();
    let mut map = CodeMap::identity(g.n_bits());
    let mut dual_bit: Vec<Option<usize>> = vec![None; g.n_checks()];
    let mut refs = vec![0usize; g.n_bits()];
    let mut long_refs = vec![0usize; g.n_bits()];
    let mut paired_long = vec![false; g.n_bits()];

    for gd in &asm.gadgets {
        let mut seen = BTreeSet::new();
        for row in gd.template.checks {
            for &l in *row {
                seen.insert(asm.slot_bit[&gd.slot_of(l)]);
            }
        }
        for (l, _) in gd.template.pairs {
            if let Some(&b) = asm.slot_bit.get(&gd.slot_of(*l)) {
                seen.insert(b);
            }
        }
        for &b in &seen {
            refs[b] += 1;
        }
        for &l in gd.template.long {
            long_refs[asm.slot_bit[&gd.slot_of(l)]] += 1;
        }
        for &(l, ci) in gd.template.pairs {
            let check = gd.check_ids[ci];
            match asm.slot_bit.get(&gd.slot_of(l)) {
                Some(&b) => dual_bit[check] = Some(b),
                None => {
                    // dangling initialisation or measurement: its short bit was
                    // removed, so the check pairs with its own long bit
                    let lb = asm.slot_bit[&gd.slot_of(gd.template.checks[ci][0])];
                    dual_bit[check] = Some(lb);
                    paired_long[lb] = true;
                }
            }
        }
    }

    // asymmetric merges
    let mut splits = 0;
    for q in 1..=c.n_qubits {
        let line: Vec<&Gadget> = asm.gadgets.iter().filter(|gd| gd.qubits.contains(&q)).collect();
        for w in line.windows(2) {
            let (ga, gb) = (w[0], w[1]);
            if !(ga.has_outputs() && gb.has_inputs() && ga.layer + 1 == gb.layer) {
                continue;
            }
            let out_long = ga.template.long_at(true, ga.slot_index(q)).expect("output long terminal");
            let in_long = gb.template.long_at(false, gb.slot_index(q)).expect("input long terminal");
            if out_long != in_long {
                continue;
            }
            let t = ga.layer;
            let short = Slot { comp: out_long.other(), qubit: q, layer: t };
            let long_bit = asm.slot_bit[&Slot { comp: out_long, qubit: q, layer: t }];
            let Some(&v) = asm.slot_bit.get(&short) else {
                return Err(TannerError::Unsymmetrizable { qubit: q, layer: t });
            };
            let nbrs = graph.bit_checks()[v].clone();
            let n1: Vec<usize> = nbrs.iter().copied().filter(|x| ga.check_ids.contains(x)).collect();
            let n2: Vec<usize> = nbrs.iter().copied().filter(|x| gb.check_ids.contains(x)).collect();
            let (next, step, v2, new_check) = bit_split(&graph, v, &n1, &n2)?;
            debug_assert_eq!(new_check, dual_bit.len());
            map = map.then(&step);
            graph = next;
            for &ci in &gb.check_ids {
                if dual_bit[ci] == Some(v) {
                    dual_bit[ci] = Some(v2);
                }
            }
            dual_bit.push(Some(long_bit));
            paired_long[long_bit] = true;
            splits += 1;
        }
    }

    let long: Vec<usize> = (0..g.n_bits()).filter(|&b| refs[b] == 1 && long_refs[b] == 1 && !paired_long[b]).collect();
    let witness = SymmetryWitness {
        check_dual: dual_bit.into_iter().map(|d| d.expect("every check has a dual")).collect(),
        long,
    };
    Ok(Symmetrized { graph, witness, map, splits })
}

/// Random graph with bit-check symmetry: `pairs` dual pairs whose symmetric
/// block has rows of weight at most `max_row_weight`, plus up to `n_long`
/// long terminals on distinct checks.
pub fn random_symmetric_graph<R: Rng + ?Sized>(
    rng: &mut R,
    pairs: usize,
    max_row_weight: usize,
    n_long: usize,
    density: f64,
) -> (TannerGraph, SymmetryWitness) {
    let mut m = vec![vec![false; pairs]; pairs];
    let mut weight = vec![0usize; pairs];
    for i in 0..pairs {
        for j in i..pairs {
            if !rng.gen_bool(density) {
                continue;
            }
            if weight[i] >= max_row_weight || weight[j] >= max_row_weight {
                continue;
            }
            m[i][j] = true;
            m[j][i] = true;
            weight[i] += 1;
            if i != j {
                weight[j] += 1;
            }
        }
    }
    let n_long = n_long.min(pairs);
    let mut checks_with_long: Vec<usize> = (0..pairs).collect();
    for i in (1..checks_with_long.len()).rev() {
        checks_with_long.swap(i, rng.gen_range(0..=i));
    }
    checks_with_long.truncate(n_long);
    checks_with_long.sort_unstable();
    let n_bits = pairs + n_long;
    let mut a = BitMatrix::zeros(pairs, n_bits);
    for i in 0..pairs {
        for j in 0..pairs {
            if m[i][j] {
                a.set(i, j, true);
            }
        }
    }
    for (k, &c) in checks_with_long.iter().enumerate() {
        a.set(c, pairs + k, true);
    }
    let g = TannerGraph::from_matrix(&a);
    let w = SymmetryWitness { check_dual: (0..pairs).collect(), long: (pairs..n_bits).collect() };
    (g, w)
}
