//! Symmetric splitting: replace each dual pair of the symmetric subgraph by
//! a bit tree and a check tree built from one template tree.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::distance::{circuit_distance, DistanceError, DistanceValue};
use crate::gf2::BitMatrix;
use crate::tanner::{CheckKind, CheckLabel, CodeMap, SymmetryWitness, TannerGraph};

/// Codeword map `ψ` and error embedding `ψ_err` of a splitting.
pub type SplitMaps = CodeMap;

/// How one dual pair `(v, a)` is split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairPlan {
    pub bit: usize,
    pub check: usize,
    /// Partition of the checks around `bit`; subset `i` goes to tree vertex `i`.
    pub subsets: Vec<Vec<usize>>,
    /// Template tree on `0..subsets.len()`.
    pub tree: Vec<(usize, usize)>,
    /// Tree vertex whose check receives the long terminal of `check`, if any.
    pub long: usize,
}

/// Plan for every dual pair; pairs not listed are left unsplit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SplitPlan {
    pub pairs: Vec<PairPlan>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SplitError {
    #[error("{0} is not a dual pair of the witness")]
    NotDual(String),
    #[error("pair {0}: subsets do not partition the neighbourhood")]
    BadPartition(String),
    #[error("pair {0}: template is not a tree on the subsets")]
    NotATree(String),
    #[error("pair {0}: long-terminal vertex out of range")]
    BadLong(String),
    #[error("pair {0} appears twice")]
    Duplicate(String),
    #[error("plan line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("input graph is not symmetric under the witness: {0}")]
    Asymmetric(String),
}

fn is_tree(r: usize, edges: &[(usize, usize)]) -> bool {
    if edges.len() + 1 != r {
        return false;
    }
    let mut parent: Vec<usize> = (0..r).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b) in edges {
        if a >= r || b >= r {
            return false;
        }
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return false;
        }
        parent[ra] = rb;
    }
    true
}

impl SplitPlan {
    /// `pair <bit> <check> : subsets c1,c2;c3 ; tree 0-1 ; long 0` per line.
    #[must_use]
    pub fn to_text(&self, g: &TannerGraph) -> String {
        let mut s = String::new();
        for p in &self.pairs {
            let subsets: Vec<String> = p
                .subsets
                .iter()
                .map(|sub| sub.iter().map(|&c| g.check_name(c)).collect::<Vec<_>>().join(","))
                .collect();
            let tree: Vec<String> = p.tree.iter().map(|(a, b)| format!("{a}-{b}")).collect();
            writeln!(
                s,
                "pair {} {} : subsets {} ; tree {} ; long {}",
                g.bit_name(p.bit),
                g.check_name(p.check),
                subsets.join(";"),
                tree.join(","),
                p.long
            )
            .expect("string write");
        }
        s
    }

    pub fn parse(text: &str, g: &TannerGraph) -> Result<Self, SplitError> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let ln = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| SplitError::Parse { line: ln, msg: msg.to_string() };
            let rest = line.strip_prefix("pair ").ok_or_else(|| bad("expected `pair`"))?;
            let (head, body) = rest.split_once(':').ok_or_else(|| bad("missing `:`"))?;
            let names: Vec<&str> = head.split_whitespace().collect();
            let [bit_name, check_name] = names[..] else { return Err(bad("expected `<bit> <check>`")) };
            let bit = g.find_bit(bit_name).ok_or_else(|| bad("unknown bit"))?;
            let check = g.find_check(check_name).ok_or_else(|| bad("unknown check"))?;
            let mut subsets = Vec::new();
            let mut tree = Vec::new();
            let mut long = 0;
            // sections are separated by ` ; ` keywords; subsets use `;` internally
            let body = body.trim();
            let sub_start = body.strip_prefix("subsets").ok_or_else(|| bad("expected `subsets`"))?;
            let (subs_text, tail) = match sub_start.find("; tree") {
                Some(k) => (&sub_start[..k], &sub_start[k + 1..]),
                None => (sub_start, ""),
            };
            for part in subs_text.split(';') {
                let part = part.trim();
                let mut sub = Vec::new();
                if !part.is_empty() && part != "-" {
                    for name in part.split(',') {
                        sub.push(g.find_check(name.trim()).ok_or_else(|| bad("unknown check in subsets"))?);
                    }
                }
                subsets.push(sub);
            }
            for section in tail.split(';') {
                let section = section.trim();
                if let Some(t) = section.strip_prefix("tree") {
                    for e in t.split(',').map(str::trim).filter(|e| !e.is_empty()) {
                        let (a, b) = e.split_once('-').ok_or_else(|| bad("bad tree edge"))?;
                        let a = a.trim().parse().map_err(|_| bad("bad tree edge"))?;
                        let b = b.trim().parse().map_err(|_| bad("bad tree edge"))?;
                        tree.push((a, b));
                    }
                } else if let Some(l) = section.strip_prefix("long") {
                    long = l.trim().parse().map_err(|_| bad("bad long index"))?;
                } else if !section.is_empty() {
                    return Err(bad("unknown section"));
                }
            }
            pairs.push(PairPlan { bit, check, subsets, tree, long });
        }
        Ok(Self { pairs })
    }
}

/// Random plan: each pair's neighbourhood is split into up to `max_parts`
/// nonempty subsets joined by a random tree.
pub fn random_plan<R: Rng + ?Sized>(g: &TannerGraph, w: &SymmetryWitness, max_parts: usize, rng: &mut R) -> SplitPlan {
    let bit_checks = g.bit_checks();
    let mut pairs = Vec::new();
    for (a, &v) in w.check_dual.iter().enumerate() {
        let nb = &bit_checks[v];
        let r = rng.gen_range(1..=nb.len().clamp(1, max_parts.max(1)));
        if r == 1 {
            continue;
        }
        let mut order = nb.clone();
        order.shuffle(rng);
        let mut subsets = vec![Vec::new(); r];
        for (k, &c) in order.iter().enumerate() {
            let slot = if k < r { k } else { rng.gen_range(0..r) };
            subsets[slot].push(c);
        }
        for s in &mut subsets {
            s.sort_unstable();
        }
        let tree = (1..r).map(|i| (rng.gen_range(0..i), i)).collect();
        pairs.push(PairPlan { bit: v, check: a, subsets, tree, long: rng.gen_range(0..r) });
    }
    SplitPlan { pairs }
}

/// Path-shaped plan that splits every pair into single-check subsets,
/// ordered by check index.
#[must_use]
pub fn path_plan(g: &TannerGraph, w: &SymmetryWitness) -> SplitPlan {
    let bit_checks = g.bit_checks();
    let pairs = w
        .check_dual
        .iter()
        .enumerate()
        .filter(|(_, &v)| bit_checks[v].len() > 1)
        .map(|(a, &v)| {
            let r = bit_checks[v].len();
            PairPlan { bit: v, check: a, subsets: bit_checks[v].iter().map(|&c| vec![c]).collect(), tree: (1..r).map(|i| (i - 1, i)).collect(), long: 0 }
        })
        .collect();
    SplitPlan { pairs }
}

#[derive(Clone, Debug)]
pub struct SplitOutput {
    pub graph: TannerGraph,
    pub witness: SymmetryWitness,
    pub maps: SplitMaps,
}

struct Resolved {
    /// For each non-long bit: subset index of each neighbouring check.
    part: BTreeMap<usize, usize>,
    r: usize,
    tree: Vec<(usize, usize)>,
    long: usize,
}

pub fn symmetric_split(g: &TannerGraph, w: &SymmetryWitness, plan: &SplitPlan) -> Result<SplitOutput, SplitError> {
    crate::tanner::verify_symmetry(g, w).map_err(|e| SplitError::Asymmetric(e.to_string()))?;
    let bit_checks = g.bit_checks();
    let dual_of_bit = w.bit_dual(g.n_bits());
    let long: BTreeSet<usize> = w.long.iter().copied().collect();
    let name = |v: usize, a: usize| format!("({}, {})", g.bit_name(v), g.check_name(a));

    let mut resolved: BTreeMap<usize, Resolved> = BTreeMap::new();
    for p in &plan.pairs {
        let label = name(p.bit, p.check);
        if w.check_dual.get(p.check) != Some(&p.bit) {
            return Err(SplitError::NotDual(label));
        }
        let mut part = BTreeMap::new();
        for (i, sub) in p.subsets.iter().enumerate() {
            for &c in sub {
                if part.insert(c, i).is_some() {
                    return Err(SplitError::BadPartition(label));
                }
            }
        }
        if part.keys().copied().collect::<Vec<_>>() != bit_checks[p.bit] {
            return Err(SplitError::BadPartition(label));
        }
        let r = p.subsets.len();
        if !is_tree(r, &p.tree) {
            return Err(SplitError::NotATree(label));
        }
        if p.long >= r {
            return Err(SplitError::BadLong(label));
        }
        if resolved.insert(p.bit, Resolved { part, r, tree: p.tree.clone(), long: p.long }).is_some() {
            return Err(SplitError::Duplicate(label));
        }
    }
    for (a, &v) in w.check_dual.iter().enumerate() {
        resolved.entry(v).or_insert_with(|| Resolved {
            part: bit_checks[v].iter().map(|&c| (c, 0)).collect(),
            r: 1,
            tree: Vec::new(),
            long: 0,
        });
        debug_assert_eq!(dual_of_bit[v], Some(a));
    }

    let mut out = g.clone();
    out.check_bits = vec![Vec::new(); g.n_checks()];
    let mut hat_bit: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut hat_check: Vec<Vec<usize>> = vec![Vec::new(); g.n_checks()];
    let mut dual: Vec<Option<usize>> = vec![None; g.n_checks()];
    let mut tree_bits: Vec<(usize, usize, usize)> = Vec::new(); // (β, pair bit v, edge index)

    for (a, &v) in w.check_dual.iter().enumerate() {
        let res = &resolved[&v];
        let slot = g.bits[v].slot;
        let label = g.checks[a];
        let mut bits = vec![v];
        let mut checks = vec![a];
        dual[a] = Some(v);
        for _ in 1..res.r {
            let b = out.add_aux_bit(slot);
            let c = out.add_check(CheckLabel { kind: CheckKind::Aux, ..label }, Vec::new());
            bits.push(b);
            checks.push(c);
            dual.push(Some(b));
        }
        for (k, &(i, j)) in res.tree.iter().enumerate() {
            let beta = out.add_aux_bit(None);
            let kappa = out.add_check(CheckLabel { kind: CheckKind::Aux, ..label }, vec![bits[i], bits[j]]);
            out.check_bits[checks[i]].push(beta);
            out.check_bits[checks[j]].push(beta);
            dual.push(Some(beta));
            debug_assert_eq!(kappa + 1, dual.len());
            tree_bits.push((beta, v, k));
        }
        hat_bit.insert(v, bits);
        hat_check[a] = checks;
    }

    // inter-tree edges and long terminals
    for (b, nbrs) in g.check_bits.iter().enumerate() {
        let vb = w.check_dual[b];
        let rb = &resolved[&vb];
        for &u in nbrs {
            if long.contains(&u) {
                out.check_bits[hat_check[b][rb.long]].push(u);
            } else {
                let i = resolved[&u].part[&b];
                let au = dual_of_bit[u].expect("non-long bit has a dual");
                let j = rb.part[&au];
                out.check_bits[hat_check[b][j]].push(hat_bit[&u][i]);
            }
        }
    }
    for row in &mut out.check_bits {
        row.sort_unstable();
        row.dedup();
    }

    // ψ: tree bits copy their original; β_e sums the leaves beyond edge e
    let mut value_of: Vec<Vec<usize>> = (0..out.n_bits()).map(|i| if i < g.n_bits() { vec![i] } else { Vec::new() }).collect();
    for (v, bits) in &hat_bit {
        for &b in &bits[1..] {
            value_of[b] = vec![*v];
        }
    }
    for &(beta, v, k) in &tree_bits {
        let res = &resolved[&v];
        let a = dual_of_bit[v].expect("pair");
        let far = far_side(res.r, &res.tree, k);
        let mut acc = BTreeSet::new();
        for &u in &g.check_bits[a] {
            let idx = if long.contains(&u) { res.long } else { res.part[&dual_of_bit[u].expect("dual")] };
            if far.contains(&idx) && !acc.insert(u) {
                acc.remove(&u);
            }
        }
        value_of[beta] = acc.into_iter().collect();
    }
    let maps = CodeMap { src_bits: g.n_bits(), dst_bits: out.n_bits(), value_of, err_target: (0..g.n_bits()).collect() };
    let witness = SymmetryWitness { check_dual: dual.into_iter().map(|d| d.expect("dual assigned")).collect(), long: w.long.clone() };
    Ok(SplitOutput { graph: out, witness, maps })
}

/// Tree vertices separated from vertex 0 by removing edge `k`.
fn far_side(r: usize, tree: &[(usize, usize)], k: usize) -> BTreeSet<usize> {
    let mut adj = vec![Vec::new(); r];
    for (i, &(a, b)) in tree.iter().enumerate() {
        if i != k {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut near = vec![false; r];
    let mut stack = vec![0];
    near[0] = true;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !near[y] {
                near[y] = true;
                stack.push(y);
            }
        }
    }
    (0..r).filter(|&x| !near[x]).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceBoundReport {
    pub d: DistanceValue,
    pub d_split: DistanceValue,
    pub g_max: usize,
    /// `max(1, ⌊g_max/2⌋)`.
    pub factor: usize,
    pub holds: bool,
}

/// Compare `d(A, B, L)` with `d(A′, ψ(B), ψ(L))` against
/// `d / ⌊g_max/2⌋ ≤ d′ ≤ d`.
pub fn check_distance_bound(
    g: &TannerGraph,
    maps: &SplitMaps,
    b: &BitMatrix,
    l: &BitMatrix,
    max_weight: usize,
) -> Result<DistanceBoundReport, DistanceError> {
    let d = circuit_distance(b, l, max_weight)?.value;
    let d_split = circuit_distance(&maps.map_rows(b), &maps.map_rows(l), max_weight)?.value;
    let g_max = g.max_degree();
    let factor = (g_max / 2).max(1);
    let holds = match (d, d_split) {
        (DistanceValue::Exact(d), DistanceValue::Exact(d2)) => d2 <= d && d2 * factor >= d,
        (DistanceValue::NoLogicalErrors, DistanceValue::NoLogicalErrors) => true,
        // capped: only the parts that can be decided
        (DistanceValue::LowerBound(_), DistanceValue::Exact(d2)) => d2 * factor > max_weight,
        (DistanceValue::Exact(d), DistanceValue::LowerBound(_)) => d > max_weight,
        (DistanceValue::LowerBound(_), DistanceValue::LowerBound(_)) => true,
        _ => false,
    };
    Ok(DistanceBoundReport { d, d_split, g_max, factor, holds })
}
