//! Stabiliser circuits from symmetric Tanner graphs.
//!
//! A path partition of the symmetric subgraph fixes the qubits (one pair of
//! dual paths per qubit) and time labels fix the windows. Every inter-path
//! edge becomes a gate; path ends become initialisations and measurements
//! unless a long terminal makes the qubit an open input or output.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::circuit::{Basis, Circuit, Op};
use crate::codewords::extend_basis;
use crate::distance::{circuit_distance, DistanceError, DistanceValue};
use crate::gf2::{rank, BitMatrix, BitVector};
use crate::tanner::{
    build_plain, op_long_terminal, symmetrize, verify_symmetry, CodeMap, Component, Slot, SymmetryWitness, TannerError, TannerGraph,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Bit(usize),
    Check(usize),
}

impl Vertex {
    #[must_use]
    pub fn name(self, g: &TannerGraph) -> String {
        match self {
            Vertex::Bit(b) => g.bit_name(b),
            Vertex::Check(c) => g.check_name(c),
        }
    }

    #[must_use]
    pub fn parse(name: &str, g: &TannerGraph) -> Option<Self> {
        g.find_check(name).map(Vertex::Check).or_else(|| g.find_bit(name).map(Vertex::Bit))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub qubit: usize,
    pub role: Component,
    pub vertices: Vec<Vertex>,
}

/// Dual path pairs with time labels. Time labels increase along each
/// path in the listed order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathPartition {
    pub paths: Vec<Path>,
    pub tau: BTreeMap<Vertex, usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PartitionViolation {
    #[error("graph is not symmetric: {0}")]
    Symmetry(String),
    #[error("coverage: {0}")]
    Coverage(String),
    #[error("not a path: {0}")]
    NotAPath(String),
    #[error("qubit assignment: {0}")]
    Qubits(String),
    #[error("paths are not dual: {0}")]
    NotDual(String),
    #[error("long terminal away from a path end: {0}")]
    LongTerminal(String),
    #[error("inter-path edge joins different time labels: {0}")]
    InterPathTime(String),
    #[error("time labels do not increase along the path: {0}")]
    Monotone(String),
    #[error("dual vertices with different time labels: {0}")]
    DualTime(String),
    #[error("missing time label: {0}")]
    MissingTime(String),
    #[error("partition line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error(transparent)]
    Partition(#[from] PartitionViolation),
    #[error(transparent)]
    Tanner(#[from] TannerError),
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error("no bit of the circuit graph at {0}")]
    Anchor(String),
    #[error("code map: {0}")]
    Map(String),
}

/// Duality and neighbourhoods restricted to the symmetric subgraph.
struct Sym<'a> {
    g: &'a TannerGraph,
    w: &'a SymmetryWitness,
    bit_checks: Vec<Vec<usize>>,
    dual_of_bit: Vec<Option<usize>>,
    long: BTreeSet<usize>,
    long_of_check: Vec<Option<usize>>,
}

impl<'a> Sym<'a> {
    fn new(g: &'a TannerGraph, w: &'a SymmetryWitness) -> Self {
        let bit_checks = g.bit_checks();
        let mut long_of_check = vec![None; g.n_checks()];
        for &l in &w.long {
            for &c in &bit_checks[l] {
                long_of_check[c] = Some(l);
            }
        }
        Self { g, w, dual_of_bit: w.bit_dual(g.n_bits()), long: w.long.iter().copied().collect(), bit_checks, long_of_check }
    }

    fn dual(&self, v: Vertex) -> Vertex {
        match v {
            Vertex::Bit(b) => Vertex::Check(self.dual_of_bit[b].expect("symmetric bit")),
            Vertex::Check(c) => Vertex::Bit(self.w.check_dual[c]),
        }
    }

    fn neighbours(&self, v: Vertex) -> Vec<Vertex> {
        match v {
            Vertex::Bit(b) => self.bit_checks[b].iter().map(|&c| Vertex::Check(c)).collect(),
            Vertex::Check(c) => {
                self.g.check_bits[c].iter().filter(|b| !self.long.contains(b)).map(|&b| Vertex::Bit(b)).collect()
            }
        }
    }

    fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        match (u, v) {
            (Vertex::Bit(b), Vertex::Check(c)) | (Vertex::Check(c), Vertex::Bit(b)) => {
                self.g.check_bits[c].binary_search(&b).is_ok()
            }
            _ => false,
        }
    }

    fn vertices(&self) -> Vec<Vertex> {
        let bits = (0..self.g.n_bits()).filter(|b| !self.long.contains(b)).map(Vertex::Bit);
        bits.chain((0..self.g.n_checks()).map(Vertex::Check)).collect()
    }

    fn has_long(&self, v: Vertex) -> bool {
        matches!(v, Vertex::Check(c) if self.long_of_check[c].is_some())
    }
}

impl PathPartition {
    #[must_use]
    pub fn n_qubits(&self) -> usize {
        self.paths.iter().map(|p| p.qubit).max().unwrap_or(0)
    }

    /// `path <q> <X|Z> : <vertices>` lines, then `tau <vertex> <value>` lines.
    #[must_use]
    pub fn to_text(&self, g: &TannerGraph) -> String {
        let mut s = String::new();
        let mut paths: Vec<&Path> = self.paths.iter().collect();
        paths.sort_by_key(|p| (p.qubit, p.role));
        for p in paths {
            let names: Vec<String> = p.vertices.iter().map(|v| v.name(g)).collect();
            let role = if p.role == Component::X { 'X' } else { 'Z' };
            writeln!(s, "path {} {role} : {}", p.qubit, names.join(" ")).expect("string write");
        }
        for (v, t) in &self.tau {
            writeln!(s, "tau {} {t}", v.name(g)).expect("string write");
        }
        s
    }

    pub fn parse(text: &str, g: &TannerGraph) -> Result<Self, PartitionViolation> {
        let mut out = PathPartition::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| PartitionViolation::Parse { line: i + 1, msg: msg.to_string() };
            let vertex = |name: &str| Vertex::parse(name, g).ok_or_else(|| bad(&format!("unknown vertex `{name}`")));
            let words: Vec<&str> = line.split_whitespace().collect();
            match words.first().copied() {
                Some("path") => {
                    if words.len() < 4 || words[3] != ":" {
                        return Err(bad("expected `path <q> <X|Z> : <vertices>`"));
                    }
                    let qubit: usize = words[1].parse().map_err(|_| bad("bad qubit"))?;
                    let role = match words[2] {
                        "X" => Component::X,
                        "Z" => Component::Z,
                        _ => return Err(bad("role must be X or Z")),
                    };
                    let vertices = words[4..].iter().map(|n| vertex(n)).collect::<Result<_, _>>()?;
                    out.paths.push(Path { qubit, role, vertices });
                }
                Some("tau") => {
                    let [_, name, value] = words[..] else { return Err(bad("expected `tau <vertex> <value>`")) };
                    let t = value.parse().map_err(|_| bad("bad time label"))?;
                    out.tau.insert(vertex(name)?, t);
                }
                _ => return Err(bad("expected `path` or `tau`")),
            }
        }
        Ok(out)
    }
}

/// One vertex per path, all time labels 1. Qubits follow the bit index of
/// each dual pair; the bit's path is `X_q`.
pub fn trivial_partition(g: &TannerGraph, w: &SymmetryWitness) -> Result<PathPartition, PartitionViolation> {
    verify_symmetry(g, w).map_err(|e| PartitionViolation::Symmetry(e.to_string()))?;
    let mut pairs: Vec<(usize, usize)> = w.check_dual.iter().enumerate().map(|(a, &v)| (v, a)).collect();
    pairs.sort_unstable();
    let mut p = PathPartition::default();
    for (k, &(v, a)) in pairs.iter().enumerate() {
        p.paths.push(Path { qubit: k + 1, role: Component::X, vertices: vec![Vertex::Bit(v)] });
        p.paths.push(Path { qubit: k + 1, role: Component::Z, vertices: vec![Vertex::Check(a)] });
        p.tau.insert(Vertex::Bit(v), 1);
        p.tau.insert(Vertex::Check(a), 1);
    }
    Ok(p)
}

/// Where each vertex sits: (path index, position).
fn locate(sym: &Sym, p: &PathPartition) -> Result<BTreeMap<Vertex, (usize, usize)>, PartitionViolation> {
    let g = sym.g;
    let mut at = BTreeMap::new();
    for (pi, path) in p.paths.iter().enumerate() {
        for (pos, &v) in path.vertices.iter().enumerate() {
            let in_range = match v {
                Vertex::Bit(b) => b < g.n_bits() && !sym.long.contains(&b),
                Vertex::Check(c) => c < g.n_checks(),
            };
            if !in_range {
                return Err(PartitionViolation::Coverage(format!("{v:?} is not a vertex of the symmetric subgraph")));
            }
            if at.insert(v, (pi, pos)).is_some() {
                return Err(PartitionViolation::Coverage(format!("{} is on two paths", v.name(g))));
            }
        }
    }
    for v in sym.vertices() {
        if !at.contains_key(&v) {
            return Err(PartitionViolation::Coverage(format!("{} is on no path", v.name(g))));
        }
    }
    Ok(at)
}

fn path_adjacent(at: &BTreeMap<Vertex, (usize, usize)>, u: Vertex, v: Vertex) -> bool {
    let (pu, iu) = at[&u];
    let (pv, iv) = at[&v];
    pu == pv && iu.abs_diff(iv) == 1
}

/// Per qubit: indices of its `X` and `Z` paths.
fn qubit_paths(p: &PathPartition) -> Result<Vec<(usize, usize)>, PartitionViolation> {
    let n = p.n_qubits();
    let mut slots: Vec<[Option<usize>; 2]> = vec![[None, None]; n];
    for (i, path) in p.paths.iter().enumerate() {
        if path.qubit == 0 {
            return Err(PartitionViolation::Qubits("qubits are numbered from 1".into()));
        }
        if path.vertices.is_empty() {
            return Err(PartitionViolation::NotAPath(format!("empty path for qubit {}", path.qubit)));
        }
        let k = usize::from(path.role == Component::Z);
        if slots[path.qubit - 1][k].replace(i).is_some() {
            return Err(PartitionViolation::Qubits(format!("qubit {} has two {:?} paths", path.qubit, path.role)));
        }
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(q, s)| match s {
            [Some(x), Some(z)] => Ok((x, z)),
            _ => Err(PartitionViolation::Qubits(format!("qubit {} needs one X and one Z path", q + 1))),
        })
        .collect()
}

pub fn validate_partition(g: &TannerGraph, w: &SymmetryWitness, p: &PathPartition) -> Result<(), PartitionViolation> {
    verify_symmetry(g, w).map_err(|e| PartitionViolation::Symmetry(e.to_string()))?;
    let sym = Sym::new(g, w);
    let at = locate(&sym, p)?;
    for path in &p.paths {
        for pair in path.vertices.windows(2) {
            if !sym.adjacent(pair[0], pair[1]) {
                return Err(PartitionViolation::NotAPath(format!("{} and {} are not adjacent", pair[0].name(g), pair[1].name(g))));
            }
        }
    }
    for (x, z) in qubit_paths(p)? {
        let (xp, zp) = (&p.paths[x].vertices, &p.paths[z].vertices);
        let dual: Vec<Vertex> = xp.iter().map(|&v| sym.dual(v)).collect();
        if dual != *zp {
            return Err(PartitionViolation::NotDual(format!("qubit {}", p.paths[x].qubit)));
        }
    }
    for v in sym.vertices() {
        let Some(&t) = p.tau.get(&v) else { return Err(PartitionViolation::MissingTime(v.name(g))) };
        if t == 0 {
            return Err(PartitionViolation::MissingTime(format!("{} has label 0", v.name(g))));
        }
        if p.tau.get(&sym.dual(v)) != Some(&t) {
            return Err(PartitionViolation::DualTime(v.name(g)));
        }
    }
    for path in &p.paths {
        for pair in path.vertices.windows(2) {
            if p.tau[&pair[0]] >= p.tau[&pair[1]] {
                return Err(PartitionViolation::Monotone(format!("{} then {}", pair[0].name(g), pair[1].name(g))));
            }
        }
    }
    for v in sym.vertices() {
        for u in sym.neighbours(v) {
            if !path_adjacent(&at, u, v) && p.tau[&u] != p.tau[&v] {
                return Err(PartitionViolation::InterPathTime(format!("{} - {}", v.name(g), u.name(g))));
            }
        }
    }
    for (c, l) in sym.long_of_check.iter().enumerate() {
        if l.is_some() {
            let (pi, pos) = at[&Vertex::Check(c)];
            if pos != 0 && pos + 1 != p.paths[pi].vertices.len() {
                return Err(PartitionViolation::LongTerminal(g.check_name(c)));
            }
        }
    }
    Ok(())
}

/// Smallest time labels consistent with the paths: dual and inter-path
/// neighbours share a label, labels increase along each path. `None` when
/// the constraints are cyclic.
#[must_use]
pub fn assign_time_labels(g: &TannerGraph, w: &SymmetryWitness, paths: &[Path]) -> Option<BTreeMap<Vertex, usize>> {
    let sym = Sym::new(g, w);
    let p = PathPartition { paths: paths.to_vec(), tau: BTreeMap::new() };
    let at = locate(&sym, &p).ok()?;
    let verts: Vec<Vertex> = at.keys().copied().collect();
    let index: BTreeMap<Vertex, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..verts.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let union = |a: usize, b: usize, parent: &mut Vec<usize>| {
        let (ra, rb) = (find(parent, a), find(parent, b));
        parent[ra] = rb;
    };
    for &v in &verts {
        union(index[&v], index[&sym.dual(v)], &mut parent);
        for u in sym.neighbours(v) {
            if !path_adjacent(&at, u, v) {
                union(index[&v], index[&u], &mut parent);
            }
        }
    }
    let n = verts.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut indeg = vec![0usize; n];
    for path in paths {
        for pair in path.vertices.windows(2) {
            let (a, b) = (find(&mut parent, index[&pair[0]]), find(&mut parent, index[&pair[1]]));
            if a == b {
                return None;
            }
            succ[a].push(b);
            indeg[b] += 1;
        }
    }
    let roots: Vec<usize> = (0..n).filter(|&i| find(&mut parent, i) == i).collect();
    let mut level = vec![1usize; n];
    let mut queue: Vec<usize> = roots.iter().copied().filter(|&r| indeg[r] == 0).collect();
    let mut done = 0;
    while let Some(x) = queue.pop() {
        done += 1;
        for &y in &succ[x] {
            level[y] = level[y].max(level[x] + 1);
            indeg[y] -= 1;
            if indeg[y] == 0 {
                queue.push(y);
            }
        }
    }
    if done != roots.len() {
        return None;
    }
    Some(verts.iter().map(|&v| (v, level[find(&mut parent, index[&v])])).collect())
}

/// Grow paths greedily by joining path ends of different qubits while the
/// result stays a valid partition. Paths never exceed `max_len` vertices.
pub fn greedy_partition(g: &TannerGraph, w: &SymmetryWitness, max_len: usize) -> Result<PathPartition, PartitionViolation> {
    let trivial = trivial_partition(g, w)?;
    let sym = Sym::new(g, w);
    let mut xs: Vec<Vec<Vertex>> = trivial.paths.iter().filter(|p| p.role == Component::X).map(|p| p.vertices.clone()).collect();
    let dual_of = |path: &[Vertex]| path.iter().map(|&v| sym.dual(v)).collect::<Vec<_>>();
    let build = |xs: &[Vec<Vertex>]| {
        xs.iter()
            .enumerate()
            .flat_map(|(k, x)| {
                [
                    Path { qubit: k + 1, role: Component::X, vertices: x.clone() },
                    Path { qubit: k + 1, role: Component::Z, vertices: dual_of(x) },
                ]
            })
            .collect::<Vec<_>>()
    };
    let long_inside = |path: &[Vertex]| path.iter().enumerate().any(|(i, &v)| i != 0 && i + 1 != path.len() && sym.has_long(v));
    let oriented = |p: &[Vertex], rev: bool| if rev { p.iter().rev().copied().collect() } else { p.to_vec() };
    loop {
        let mut accepted = None;
        'search: for i in 0..xs.len() {
            for j in 0..xs.len() {
                if i == j || xs[i].len() + xs[j].len() > max_len {
                    continue;
                }
                for rev_i in [false, true] {
                    let head: Vec<Vertex> = oriented(&xs[i], rev_i);
                    for use_dual in [false, true] {
                        let base = if use_dual { dual_of(&xs[j]) } else { xs[j].clone() };
                        for rev_j in [false, true] {
                            let tail = oriented(&base, rev_j);
                            if !sym.adjacent(*head.last().expect("nonempty"), tail[0]) {
                                continue;
                            }
                            let joined: Vec<Vertex> = head.iter().chain(&tail).copied().collect();
                            if long_inside(&joined) || long_inside(&dual_of(&joined)) {
                                continue;
                            }
                            let mut trial = xs.clone();
                            trial[i] = joined;
                            trial.remove(j);
                            if let Some(tau) = assign_time_labels(g, w, &build(&trial)) {
                                accepted = Some((trial, tau));
                                break 'search;
                            }
                        }
                    }
                }
            }
        }
        match accepted {
            Some((trial, _)) => xs = trial,
            None => break,
        }
    }
    // qubits in order of each pair's smallest vertex
    xs.sort_by_key(|x| x.iter().chain(&dual_of(x)).min().copied());
    let paths = build(&xs);
    let tau = assign_time_labels(g, w, &paths).unwrap_or_default();
    let p = PathPartition { paths, tau };
    validate_partition(g, w, &p)?;
    Ok(p)
}

/// A gate of one time window, before decomposition into circuit operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WindowGate {
    S(usize),
    /// `H S H`.
    Hsh(usize),
    Cnot(usize, usize),
    /// `H_b Λ_{a,b} H_b`, symmetric in its qubits.
    Cz(usize, usize),
    /// `H_a Λ_{a,b} H_a`, symmetric in its qubits.
    Cxx(usize, usize),
}

impl WindowGate {
    #[must_use]
    pub fn qubits(self) -> Vec<usize> {
        match self {
            WindowGate::S(q) | WindowGate::Hsh(q) => vec![q],
            WindowGate::Cnot(a, b) | WindowGate::Cz(a, b) | WindowGate::Cxx(a, b) => vec![a, b],
        }
    }

    /// Circuit layers realising the gate.
    #[must_use]
    pub fn steps(self) -> Vec<Vec<Op>> {
        match self {
            WindowGate::S(q) => vec![vec![Op::S(q)]],
            WindowGate::Hsh(q) => vec![vec![Op::Sx(q)]],
            WindowGate::Cnot(a, b) => vec![vec![Op::Cnot(a, b)]],
            WindowGate::Cz(a, b) => vec![vec![Op::Cz(a, b)]],
            WindowGate::Cxx(a, b) => vec![vec![Op::Xcx(a, b)]],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub tau: usize,
    /// Circuit layers before the window; the window covers boundaries
    /// `start..=start + len`.
    pub start: usize,
    pub len: usize,
    pub gates: Vec<WindowGate>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schedule {
    pub windows: Vec<Window>,
    /// `(qubit, basis, layer)` with 1-based layers.
    pub inits: Vec<(usize, Basis, usize)>,
    pub measurements: Vec<(usize, Basis, usize)>,
    /// Qubits left open at the input or output, with their long terminal.
    pub inputs: Vec<(usize, usize)>,
    pub outputs: Vec<(usize, usize)>,
    /// Layers of identity-equivalent frame gates at the open boundaries.
    pub frame_layers: usize,
}

impl Schedule {
    #[must_use]
    pub fn gate_count(&self) -> usize {
        self.windows.iter().map(|w| w.gates.len()).sum()
    }

    /// Window length that always suffices for `n` qubits.
    #[must_use]
    pub fn safe_window(n: usize) -> usize {
        1 + n * n.saturating_sub(1) / 2
    }
}

#[derive(Clone, Debug)]
pub struct Synthesis {
    pub circuit: Circuit,
    /// Symmetric Tanner graph of `circuit`.
    pub graph: TannerGraph,
    pub witness: SymmetryWitness,
    /// From the input graph's code to `graph`'s code.
    pub maps: CodeMap,
    pub schedule: Schedule,
}

struct QubitEnds {
    tau_min: usize,
    tau_max: usize,
    init: Option<Basis>,
    meas: Option<Basis>,
    input: Option<usize>,
    output: Option<usize>,
}

fn basis(c: Component) -> Basis {
    match c {
        Component::X => Basis::X,
        Component::Z => Basis::Z,
    }
}

/// Greedy placement: single-qubit gates first, each gate on the earliest
/// steps where its qubits are free.
fn schedule_window(gates: &[WindowGate]) -> Vec<Vec<Op>> {
    let mut order = gates.to_vec();
    order.sort_by_key(|g| (g.qubits().len(), *g));
    let mut steps: Vec<Vec<Op>> = Vec::new();
    let mut free: BTreeMap<usize, usize> = BTreeMap::new();
    for g in order {
        let qs = g.qubits();
        let start = qs.iter().map(|q| free.get(q).copied().unwrap_or(0)).max().unwrap_or(0);
        let seq = g.steps();
        for (k, ops) in seq.iter().enumerate() {
            if steps.len() <= start + k {
                steps.resize(start + k + 1, Vec::new());
            }
            steps[start + k].extend(ops.iter().copied());
        }
        for q in qs {
            free.insert(q, start + seq.len());
        }
    }
    if steps.is_empty() {
        steps.push(Vec::new());
    }
    steps
}

pub fn synthesize(g: &TannerGraph, w: &SymmetryWitness, p: &PathPartition) -> Result<Synthesis, SynthesisError> {
    validate_partition(g, w, p)?;
    let sym = Sym::new(g, w);
    let at = locate(&sym, p)?;
    let qpaths = qubit_paths(p)?;
    let n = qpaths.len();
    let role_of = |v: Vertex| {
        let path = &p.paths[at[&v].0];
        (path.qubit, path.role)
    };

    let mut ends = Vec::with_capacity(n);
    for &(x, z) in &qpaths {
        let (xp, zp) = (&p.paths[x].vertices, &p.paths[z].vertices);
        let first = [xp[0], zp[0]];
        let last = [*xp.last().expect("nonempty"), *zp.last().expect("nonempty")];
        let split = |pair: [Vertex; 2]| if matches!(pair[0], Vertex::Bit(_)) { (pair[0], pair[1]) } else { (pair[1], pair[0]) };
        let (bit_min, check_min) = split(first);
        let (bit_max, check_max) = split(last);
        let long_min = match check_min {
            Vertex::Check(c) => sym.long_of_check[c],
            Vertex::Bit(_) => None,
        };
        let long_max = match check_max {
            Vertex::Check(c) if check_max != check_min => sym.long_of_check[c],
            _ => None,
        };
        ends.push(QubitEnds {
            tau_min: p.tau[&xp[0]],
            tau_max: p.tau[&last[0]],
            init: long_min.is_none().then(|| basis(role_of(bit_min).1)),
            meas: long_max.is_none().then(|| basis(role_of(bit_max).1)),
            input: long_min,
            output: long_max,
        });
    }

    let mut by_window: BTreeMap<usize, BTreeSet<WindowGate>> = BTreeMap::new();
    for (c, bits) in g.check_bits.iter().enumerate() {
        let a = Vertex::Check(c);
        for &b in bits.iter().filter(|b| !sym.long.contains(b)) {
            let v = Vertex::Bit(b);
            if path_adjacent(&at, v, a) {
                continue;
            }
            let ((qv, rv), (qa, ra)) = (role_of(v), role_of(a));
            let gate = match (rv, ra) {
                _ if qv == qa && rv == ra => {
                    return Err(PartitionViolation::InterPathTime(format!("{} - {}", v.name(g), a.name(g))).into())
                }
                (Component::X, Component::Z) if qv == qa => WindowGate::S(qv),
                (Component::Z, Component::X) if qv == qa => WindowGate::Hsh(qv),
                (Component::X, Component::X) => WindowGate::Cnot(qv, qa),
                (Component::Z, Component::Z) => WindowGate::Cnot(qa, qv),
                (Component::X, Component::Z) => WindowGate::Cz(qv.min(qa), qv.max(qa)),
                (Component::Z, Component::X) => WindowGate::Cxx(qv.min(qa), qv.max(qa)),
            };
            by_window.entry(p.tau[&v]).or_default().insert(gate);
        }
    }

    let top = p.tau.values().copied().max().unwrap_or(0);
    let mut layers: Vec<Vec<Op>> = Vec::new();
    let mut schedule = Schedule::default();
    let boundary = |tau: usize, layers: &mut Vec<Vec<Op>>, schedule: &mut Schedule| {
        let mut ops = Vec::new();
        for (k, e) in ends.iter().enumerate() {
            if let Some(b) = e.meas.filter(|_| e.tau_max + 1 == tau) {
                ops.push(Op::Meas(b, k + 1));
                schedule.measurements.push((k + 1, b, layers.len() + 1));
            }
            if let Some(b) = e.init.filter(|_| e.tau_min == tau) {
                ops.push(Op::Init(b, k + 1));
                schedule.inits.push((k + 1, b, layers.len() + 1));
            }
        }
        if !ops.is_empty() {
            layers.push(ops);
        }
    };
    for tau in 1..=top {
        boundary(tau, &mut layers, &mut schedule);
        let gates: Vec<WindowGate> = by_window.get(&tau).map(|s| s.iter().copied().collect()).unwrap_or_default();
        let steps = schedule_window(&gates);
        let start = layers.len();
        let len = steps.len();
        layers.extend(steps);
        schedule.windows.push(Window { tau, start, len, gates });
    }
    boundary(top + 1, &mut layers, &mut schedule);

    // Open boundaries take their long terminal from the first or last gadget
    // on the qubit. Where that gadget disagrees with the path role of the
    // boundary check, wrap the qubit in identity-equivalent frame gates.
    let ops_on = |q: usize| layers.iter().flatten().filter(move |op| op.qubits().contains(&q) && !op.is_trivial()).copied();
    let mut prefix: Vec<Vec<Op>> = vec![Vec::new(); 3];
    let mut suffix: Vec<Vec<Op>> = vec![Vec::new(); 3];
    for (k, e) in ends.iter().enumerate() {
        let q = k + 1;
        if let Some(l) = e.input {
            let want = role_of(Vertex::Check(sym.bit_checks[l][0])).1;
            if ops_on(q).next().and_then(|op| op_long_terminal(op, q, false)) != Some(want) {
                let frame = match want {
                    Component::Z => [Op::S(q), Op::S(q), Op::Z(q)],
                    Component::X => [Op::Sx(q), Op::Sx(q), Op::X(q)],
                };
                for (layer, op) in prefix.iter_mut().zip(frame) {
                    layer.push(op);
                }
            }
        }
        if let Some(l) = e.output {
            let want = role_of(Vertex::Check(sym.bit_checks[l][0])).1;
            if ops_on(q).last().and_then(|op| op_long_terminal(op, q, true)) != Some(want) {
                let frame = match want {
                    Component::X => [Op::Z(q), Op::S(q), Op::S(q)],
                    Component::Z => [Op::X(q), Op::Sx(q), Op::Sx(q)],
                };
                for (layer, op) in suffix.iter_mut().zip(frame) {
                    layer.push(op);
                }
            }
        }
    }
    let shift = if prefix[0].is_empty() { 0 } else { prefix.len() };
    if shift > 0 {
        for w in &mut schedule.windows {
            w.start += shift;
        }
        for (_, _, t) in schedule.inits.iter_mut().chain(schedule.measurements.iter_mut()) {
            *t += shift;
        }
        schedule.frame_layers += shift;
        layers.splice(0..0, prefix);
    }
    if !suffix[0].is_empty() {
        schedule.frame_layers += suffix.len();
        layers.extend(suffix);
    }
    let mut circuit = Circuit::new(n);
    for layer in layers {
        circuit.push_layer(layer);
    }
    circuit.canonicalize();
    for (k, e) in ends.iter().enumerate() {
        if let Some(l) = e.input {
            schedule.inputs.push((k + 1, l));
        }
        if let Some(l) = e.output {
            schedule.outputs.push((k + 1, l));
        }
    }

    let plain = build_plain(&circuit);
    let s = symmetrize(&plain, &circuit)?;
    let depth = circuit.depth();
    let find = |comp: Component, qubit: usize, layers: &[usize]| {
        layers
            .iter()
            .find_map(|&layer| s.graph.bit_at(Slot { comp, qubit, layer }))
            .ok_or_else(|| SynthesisError::Anchor(format!("{comp:?} qubit {qubit} layers {layers:?}")))
    };
    let mut anchors = Vec::with_capacity(g.n_bits());
    for b in 0..g.n_bits() {
        let anchor = if sym.long.contains(&b) {
            let c = sym.bit_checks[b][0];
            let (q, role) = role_of(Vertex::Check(c));
            let layer = if ends[q - 1].input == Some(b) { 0 } else { depth };
            find(role, q, &[layer])?
        } else {
            let v = Vertex::Bit(b);
            let (q, role) = role_of(v);
            let win = &schedule.windows[p.tau[&v] - 1];
            find(role, q, &[win.start, win.start + win.len])?
        };
        anchors.push(anchor);
    }
    let maps = CodeMap::from_anchors(&g.check_matrix(), &s.graph.check_matrix(), anchors).map_err(SynthesisError::Map)?;
    Ok(Synthesis { circuit, graph: s.graph, witness: s.witness, maps, schedule })
}

/// `B` spanned by codewords that vanish on every long terminal, `L` its
/// extension to the whole code.
#[must_use]
pub fn boundary_b_l(g: &TannerGraph, w: &SymmetryWitness) -> (BitMatrix, BitMatrix) {
    let n = g.n_bits();
    let mut rows = g.check_matrix();
    for &l in &w.long {
        rows.push_row(BitVector::unit(n, l));
    }
    let b = rows.kernel_basis();
    let l = extend_basis(&b, &g.check_matrix().kernel_basis());
    (b, l)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundtripReport {
    pub n_qubits: usize,
    pub depth: usize,
    pub gates: usize,
    pub d: DistanceValue,
    pub d_circuit: DistanceValue,
    pub g_max: usize,
    pub bound_holds: bool,
    /// Transported `B`, `L` span the circuit's own boundary structure.
    pub structure_matches: bool,
}

impl RoundtripReport {
    #[must_use]
    pub fn ok(&self) -> bool {
        self.bound_holds && self.structure_matches
    }
}

fn same_span(a: &BitMatrix, b: &BitMatrix) -> bool {
    let both = BitMatrix::vstack(&[a, b]).expect("same width");
    let r = rank(&both);
    r == rank(a) && r == rank(b)
}

/// Synthesise, transport `B` and `L` through the maps, and compare with the
/// circuit's own structure and distance.
pub fn roundtrip_check(
    g: &TannerGraph,
    w: &SymmetryWitness,
    p: &PathPartition,
    max_weight: usize,
) -> Result<RoundtripReport, SynthesisError> {
    let syn = synthesize(g, w, p)?;
    let (b, l) = boundary_b_l(g, w);
    let (b2, l2) = (syn.maps.map_rows(&b), syn.maps.map_rows(&l));
    let (bc, lc) = boundary_b_l(&syn.graph, &syn.witness);
    let all = BitMatrix::vstack(&[&b2, &l2]).expect("same width");
    let all_c = BitMatrix::vstack(&[&bc, &lc]).expect("same width");
    let structure_matches = syn.witness.long.len() == w.long.len() && same_span(&b2, &bc) && same_span(&all, &all_c);
    let d = circuit_distance(&b, &l, max_weight)?.value;
    let d_circuit = circuit_distance(&b2, &l2, max_weight)?.value;
    let g_max = g.max_degree();
    let factor = (g_max / 2).max(1);
    let bound_holds = match (d, d_circuit) {
        (DistanceValue::Exact(d), DistanceValue::Exact(d2)) => d2 <= d && d2 * factor >= d,
        (DistanceValue::NoLogicalErrors, DistanceValue::NoLogicalErrors) => true,
        (DistanceValue::LowerBound(_), DistanceValue::Exact(d2)) => d2 * factor > max_weight,
        (DistanceValue::Exact(d), DistanceValue::LowerBound(_)) => d > max_weight,
        (DistanceValue::LowerBound(_), DistanceValue::LowerBound(_)) => true,
        _ => false,
    };
    Ok(RoundtripReport {
        n_qubits: syn.circuit.n_qubits,
        depth: syn.circuit.depth(),
        gates: syn.schedule.gate_count(),
        d,
        d_circuit,
        g_max,
        bound_holds,
        structure_matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::parse_circuit;
    use crate::tanner::random_symmetric_graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sym_of(text: &str) -> (TannerGraph, SymmetryWitness) {
        let c = parse_circuit(text).unwrap();
        let s = symmetrize(&build_plain(&c), &c).unwrap();
        (s.graph, s.witness)
    }

    #[test]
    fn cnot_gadget_trivial() {
        let (g, w) = sym_of("qubits 2\ncnot 1 2\n");
        let p = trivial_partition(&g, &w).unwrap();
        assert_eq!(p.paths.len(), 2 * w.check_dual.len());
        validate_partition(&g, &w, &p).unwrap();
        let syn = synthesize(&g, &w, &p).unwrap();
        assert!(syn.circuit.is_valid());
        syn.maps.verify(&g.check_matrix(), &syn.graph.check_matrix()).unwrap();
        let r = roundtrip_check(&g, &w, &p, 6).unwrap();
        assert!(r.ok(), "{r:?}");
    }

    #[test]
    fn empty_graph() {
        let g = TannerGraph::from_matrix(&BitMatrix::empty(0));
        let w = SymmetryWitness { check_dual: Vec::new(), long: Vec::new() };
        let p = trivial_partition(&g, &w).unwrap();
        assert!(p.paths.is_empty());
        let syn = synthesize(&g, &w, &p).unwrap();
        assert_eq!(syn.circuit.n_qubits, 0);
    }

    #[test]
    fn partition_text_round_trip() {
        let (g, w) = sym_of("qubits 2\ncnot 1 2\n");
        let p = trivial_partition(&g, &w).unwrap();
        assert_eq!(PathPartition::parse(&p.to_text(&g), &g).unwrap(), p);
    }

    #[test]
    fn time_label_violation() {
        let (g, w) = sym_of("qubits 2\ncnot 1 2\n");
        let mut p = trivial_partition(&g, &w).unwrap();
        // move one dual pair to window 2 while its neighbours stay in window 1
        let v = p.paths[0].vertices[0];
        let a = p.paths[1].vertices[0];
        p.tau.insert(v, 2);
        p.tau.insert(a, 2);
        assert!(matches!(validate_partition(&g, &w, &p), Err(PartitionViolation::InterPathTime(_))));
        p.tau.insert(a, 1);
        assert!(matches!(validate_partition(&g, &w, &p), Err(PartitionViolation::DualTime(_))));
    }

    #[test]
    fn single_gate_kinds() {
        for text in ["qubits 1\ns 1\n", "qubits 1\nh 1\n", "qubits 2\ncnot 2 1\n", "qubits 1\nrx 1\ntick\nh 1\ntick\nmz 1\n"] {
            let (g, w) = sym_of(text);
            let p = trivial_partition(&g, &w).unwrap();
            let r = roundtrip_check(&g, &w, &p, 6).unwrap();
            assert!(r.ok(), "{text}: {r:?}");
        }
    }

    #[test]
    fn random_symmetric_roundtrips() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..15 {
            let (g, w) = random_symmetric_graph(&mut rng, 6, 3, 2, 0.3);
            let p = trivial_partition(&g, &w).unwrap();
            let r = roundtrip_check(&g, &w, &p, 4).unwrap();
            assert!(r.ok(), "{r:?}");
        }
    }

    #[test]
    fn greedy_paths_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut longer = 0;
        for _ in 0..15 {
            let (g, w) = random_symmetric_graph(&mut rng, 6, 3, 2, 0.3);
            let p = greedy_partition(&g, &w, 4).unwrap();
            longer += usize::from(p.paths.iter().any(|x| x.vertices.len() > 1));
            let r = roundtrip_check(&g, &w, &p, 4).unwrap();
            assert!(r.ok(), "{}\n{r:?}", p.to_text(&g));
        }
        assert!(longer > 0);
    }
}
