//! Closed-form LDPC codes of transversal circuits on CSS codes.
//!
//! A CSS-type logical circuit is given by its two decoupled check matrices
//! `a_X`, `a_Z` with deleting blocks and code generators. Combined with the
//! code's `G_X`, `G_Z` it yields the physical check matrix `A`, deleting
//! matrix `D`, error-correction matrix `B` and logical matrix `L` directly,
//! without going through a circuit.
//!
//! Column layout of each Pauli block: `m^B` mini-blocks of `n` physical bits
//! (one per logical bit), then `m^C` mini-blocks of `r` measurement bits (one
//! per logical check). The X block comes first.

use thiserror::Error;

use crate::codewords::{build_ec_structure, extend_basis, EcStructure, PauliOperator};
use crate::distance::{circuit_distance, DistanceValue};
use crate::gf2::{rank, BitMatrix, BitVector};
use crate::synthesis::{synthesize, trivial_partition};
use crate::tanner::{BitLabel, Component, Slot, SymmetryWitness, TannerGraph};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CssError {
    #[error("G_X has {0} columns but G_Z has {1}")]
    Shape(usize, usize),
    #[error("G_X and G_Z do not commute")]
    NotOrthogonal,
    #[error("rows of G_{0} are linearly dependent")]
    Dependent(char),
    #[error("logical layer: {0}")]
    Layer(String),
    #[error("assembly check failed: {0}")]
    Assertion(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CssCode {
    pub n: usize,
    pub k: usize,
    pub r_x: usize,
    pub r_z: usize,
    pub gx: BitMatrix,
    pub gz: BitMatrix,
    pub jx: BitMatrix,
    pub jz: BitMatrix,
}

/// Pick logical operators with `J_X J_Zᵀ = 𝟙_k`.
///
/// `J_Z` extends `rowsp(G_Z)` to `ker G_X` greedily over a reduced kernel
/// basis, likewise `J_X`; then `J_X ← (J_X J_Zᵀ)⁻¹ J_X`.
pub fn derive_logicals(gx: &BitMatrix, gz: &BitMatrix) -> Result<CssCode, CssError> {
    if gx.n_cols() != gz.n_cols() {
        return Err(CssError::Shape(gx.n_cols(), gz.n_cols()));
    }
    if !gx.mul_transpose(gz).is_zero() {
        return Err(CssError::NotOrthogonal);
    }
    if rank(gx) < gx.n_rows() {
        return Err(CssError::Dependent('X'));
    }
    if rank(gz) < gz.n_rows() {
        return Err(CssError::Dependent('Z'));
    }
    let n = gx.n_cols();
    let jz = extend_basis(&gz.rref().0, &gx.kernel_basis().rref().0);
    let jx0 = extend_basis(&gx.rref().0, &gz.kernel_basis().rref().0);
    let k = jz.n_rows();
    debug_assert_eq!(k, n - gx.n_rows() - gz.n_rows());
    let jx = if k == 0 {
        BitMatrix::empty(n)
    } else {
        let inv = jx0.mul_transpose(&jz).inverse().ok_or_else(|| CssError::Assertion("J_X J_Zᵀ is singular".into()))?;
        inv.mul(&jx0)
    };
    Ok(CssCode { n, k, r_x: gx.n_rows(), r_z: gz.n_rows(), gx: gx.clone(), gz: gz.clone(), jx, jz })
}

impl CssCode {
    /// Parity-check matrix of the `[7,3]` Hamming code, used for both `G_X` and `G_Z`.
    #[must_use]
    pub fn steane() -> Self {
        let h = BitMatrix::from_strs(&["1010101", "0110011", "0001111"]);
        derive_logicals(&h, &h).expect("Steane code is CSS")
    }

    /// Stabiliser generators on block `j` of `blocks` code blocks.
    #[must_use]
    pub fn stabilisers(&self, j: usize, blocks: usize) -> Vec<PauliOperator> {
        let total = self.n * blocks;
        let lift = |row: &BitVector| BitVector::from_support(total, &row.ones().map(|q| j * self.n + q).collect::<Vec<_>>());
        let mut out: Vec<PauliOperator> =
            self.gx.rows().iter().map(|r| PauliOperator::from_xz(lift(r), BitVector::zeros(total))).collect();
        out.extend(self.gz.rows().iter().map(|r| PauliOperator::from_xz(BitVector::zeros(total), lift(r))));
        out
    }
}

/// Where a logical bit sits in the logical circuit: logical qubit and layer.
pub type BitRole = Option<(usize, usize)>;

/// A CSS-type logical circuit in Tanner-graph form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalLayer {
    pub a_x: BitMatrix,
    pub a_z: BitMatrix,
    pub d_x: BitMatrix,
    pub d_z: BitMatrix,
    pub g_x: BitMatrix,
    pub g_z: BitMatrix,
    /// Role of each X bit (and of the same-index Z bit); `None` for internal bits.
    pub roles_x: Vec<BitRole>,
    pub roles_z: Vec<BitRole>,
    pub depth: usize,
}

impl LogicalLayer {
    #[must_use]
    pub fn m_b_x(&self) -> usize {
        self.a_x.n_cols()
    }
    #[must_use]
    pub fn m_b_z(&self) -> usize {
        self.a_z.n_cols()
    }
    #[must_use]
    pub fn m_c_x(&self) -> usize {
        self.a_x.n_rows()
    }
    #[must_use]
    pub fn m_c_z(&self) -> usize {
        self.a_z.n_rows()
    }

    #[must_use]
    pub fn n_logical(&self) -> usize {
        self.roles_x.iter().chain(&self.roles_z).flatten().map(|&(j, _)| j + 1).max().unwrap_or(0)
    }

    /// Check shapes and the layer invariants.
    pub fn validate(&self) -> Result<(), CssError> {
        let bad = |s: &str| Err(CssError::Layer(s.to_string()));
        if self.d_x.n_rows() != self.m_b_x() || self.d_x.n_cols() != self.m_c_z() {
            return bad("d_X must be m_X^B × m_Z^C");
        }
        if self.d_z.n_rows() != self.m_b_z() || self.d_z.n_cols() != self.m_c_x() {
            return bad("d_Z must be m_Z^B × m_X^C");
        }
        if self.g_x.n_cols() != self.m_b_x() || self.g_z.n_cols() != self.m_b_z() {
            return bad("code generators have the wrong width");
        }
        if self.roles_x.len() != self.m_b_x() || self.roles_z.len() != self.m_b_z() {
            return bad("one role per bit");
        }
        if self.a_x.mul(&self.d_x) != self.a_z.mul(&self.d_z).transpose() {
            return bad("a_X d_X differs from (a_Z d_Z)ᵀ");
        }
        for (a, g, name) in [(&self.a_x, &self.g_x, "X"), (&self.a_z, &self.g_z, "Z")] {
            if !a.mul_transpose(g).is_zero() {
                return Err(CssError::Layer(format!("g_{name} is not in the kernel of a_{name}")));
            }
            if rank(g) != a.n_cols() - rank(a) || g.n_rows() != rank(g) {
                return Err(CssError::Layer(format!("g_{name} is not a basis of the kernel of a_{name}")));
            }
        }
        for d in [&self.d_x, &self.d_z] {
            if d.transpose().rows().iter().any(|c| c.weight() != 1) || d.rows().iter().any(|r| r.weight() > 1) {
                return bad("deleting blocks must pair each check with one bit");
            }
        }
        for roles in [&self.roles_x, &self.roles_z] {
            let mut seen = std::collections::BTreeSet::new();
            for &(j, t) in roles.iter().flatten() {
                if t > self.depth || !seen.insert((j, t)) {
                    return bad("bit roles must be distinct and within the depth");
                }
            }
        }
        Ok(())
    }
}

/// `m` rounds of stabiliser measurement on one logical qubit.
pub fn repeated_measurement_layer(m: usize) -> Result<LogicalLayer, CssError> {
    if m == 0 {
        return Err(CssError::Layer("at least one cycle is needed".into()));
    }
    let mut a = BitMatrix::zeros(m, m + 1);
    for i in 0..m {
        a.set(i, i, true);
        a.set(i, i + 1, true);
    }
    let mut d_x = BitMatrix::zeros(m + 1, m);
    let mut d_z = BitMatrix::zeros(m + 1, m);
    for i in 0..m {
        d_x.set(i, i, true);
        d_z.set(i + 1, i, true);
    }
    let ones = BitMatrix::from_rows(m + 1, vec![BitVector::from_support(m + 1, &(0..=m).collect::<Vec<_>>())]);
    let roles: Vec<BitRole> = (0..=m).map(|t| Some((0, t))).collect();
    let layer = LogicalLayer {
        a_x: a.clone(),
        a_z: a,
        d_x,
        d_z,
        g_x: ones.clone(),
        g_z: ones,
        roles_x: roles.clone(),
        roles_z: roles,
        depth: m,
    };
    layer.validate()?;
    Ok(layer)
}

/// Transversal controlled-NOT between two logical qubits (control first).
///
/// Bits are ordered `in_c, in_t, out_c, out_t` in both blocks.
#[must_use]
pub fn logical_cnot_layer() -> LogicalLayer {
    let roles = vec![Some((0, 0)), Some((1, 0)), Some((0, 1)), Some((1, 1))];
    let layer = LogicalLayer {
        a_x: BitMatrix::from_strs(&["1010", "1101"]),
        a_z: BitMatrix::from_strs(&["1110", "0101"]),
        d_x: BitMatrix::from_strs(&["10", "00", "00", "01"]),
        // Columns ordered so that a_X d_X = (a_Z d_Z)ᵀ: in_t pairs with the
        // second X check, out_c with the first.
        d_z: BitMatrix::from_strs(&["00", "01", "10", "00"]),
        g_x: BitMatrix::from_strs(&["1011", "0101"]),
        g_z: BitMatrix::from_strs(&["1010", "0111"]),
        roles_x: roles.clone(),
        roles_z: roles,
        depth: 1,
    };
    debug_assert!(layer.validate().is_ok());
    layer
}

/// Physical-circuit matrices, assembled blockwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhysicalCode {
    pub n: usize,
    pub m_b_x: usize,
    pub m_b_z: usize,
    pub a_x: BitMatrix,
    pub a_z: BitMatrix,
    pub d_x: BitMatrix,
    pub d_z: BitMatrix,
    pub b_x: BitMatrix,
    pub b_z: BitMatrix,
    pub l_x: BitMatrix,
    pub l_z: BitMatrix,
    /// `(0 A_Z ; A_X 0)`.
    pub a: BitMatrix,
    /// `diag(D_X, D_Z)`.
    pub d: BitMatrix,
    pub b: BitMatrix,
    pub l: BitMatrix,
}

impl PhysicalCode {
    #[must_use]
    pub fn x_cols(&self) -> usize {
        self.a_x.n_cols()
    }
    #[must_use]
    pub fn z_cols(&self) -> usize {
        self.a_z.n_cols()
    }

    pub fn witness(&self) -> Result<SymmetryWitness, CssError> {
        SymmetryWitness::from_deleting_matrix(&self.d).map_err(|e| CssError::Assertion(e.to_string()))
    }
}

fn block_diag(p: &BitMatrix, q: &BitMatrix) -> BitMatrix {
    let top = BitMatrix::hstack(&[p, &BitMatrix::zeros(p.n_rows(), q.n_cols())]);
    let bottom = BitMatrix::hstack(&[&BitMatrix::zeros(q.n_rows(), p.n_cols()), q]);
    BitMatrix::vstack(&[&top, &bottom]).expect("same width")
}

/// `(a ⊗ 𝟙_n | 𝟙 ⊗ Gᵀ ; dᵀ ⊗ G' | 0)` for one Pauli block.
fn a_block(a: &BitMatrix, d: &BitMatrix, g_own: &BitMatrix, g_other: &BitMatrix, n: usize) -> BitMatrix {
    let top = BitMatrix::hstack(&[&a.kron(&BitMatrix::identity(n)), &BitMatrix::identity(a.n_rows()).kron(&g_own.transpose())]);
    let low = d.transpose().kron(g_other);
    let bottom = BitMatrix::hstack(&[&low, &BitMatrix::zeros(low.n_rows(), a.n_rows() * g_own.n_rows())]);
    BitMatrix::vstack(&[&top, &bottom]).expect("same width")
}

fn d_block(d: &BitMatrix, n: usize, m_c: usize, r: usize) -> BitMatrix {
    block_diag(&d.kron(&BitMatrix::identity(n)), &BitMatrix::identity(m_c * r))
}

fn b_block(a: &BitMatrix, g: &BitMatrix) -> BitMatrix {
    BitMatrix::hstack(&[&BitMatrix::identity(a.n_cols()).kron(g), &a.transpose().kron(&BitMatrix::identity(g.n_rows()))])
}

fn l_block(gl: &BitMatrix, j: &BitMatrix, pad: usize) -> BitMatrix {
    let left = gl.kron(j);
    BitMatrix::hstack(&[&left, &BitMatrix::zeros(left.n_rows(), pad)])
}

/// Assemble `A`, `D`, `B`, `L` and check the defining relations.
pub fn assemble_physical(code: &CssCode, layer: &LogicalLayer) -> Result<PhysicalCode, CssError> {
    layer.validate()?;
    let n = code.n;
    let a_x = a_block(&layer.a_x, &layer.d_x, &code.gx, &code.gz, n);
    let a_z = a_block(&layer.a_z, &layer.d_z, &code.gz, &code.gx, n);
    let d_x = d_block(&layer.d_x, n, layer.m_c_x(), code.r_x);
    let d_z = d_block(&layer.d_z, n, layer.m_c_z(), code.r_z);
    let b_x = b_block(&layer.a_x, &code.gx);
    let b_z = b_block(&layer.a_z, &code.gz);
    let l_x = l_block(&layer.g_x, &code.jx, layer.m_c_x() * code.r_x);
    let l_z = l_block(&layer.g_z, &code.jz, layer.m_c_z() * code.r_z);

    let a = {
        let top = BitMatrix::hstack(&[&BitMatrix::zeros(a_z.n_rows(), a_x.n_cols()), &a_z]);
        let bottom = BitMatrix::hstack(&[&a_x, &BitMatrix::zeros(a_x.n_rows(), a_z.n_cols())]);
        BitMatrix::vstack(&[&top, &bottom]).expect("same width")
    };
    let out = PhysicalCode {
        n,
        m_b_x: layer.m_b_x(),
        m_b_z: layer.m_b_z(),
        d: block_diag(&d_x, &d_z),
        b: block_diag(&b_x, &b_z),
        l: block_diag(&l_x, &l_z),
        a,
        a_x,
        a_z,
        d_x,
        d_z,
        b_x,
        b_z,
        l_x,
        l_z,
    };
    let fail = |s: &str| Err(CssError::Assertion(s.to_string()));
    if !out.a.mul_transpose(&out.b).is_zero() {
        return fail("A Bᵀ ≠ 0");
    }
    if !out.a.mul_transpose(&out.l).is_zero() {
        return fail("A Lᵀ ≠ 0");
    }
    if out.a_x.mul(&out.d_x) != out.a_z.mul(&out.d_z).transpose() {
        return fail("A_X D_X ≠ (A_Z D_Z)ᵀ");
    }
    let stacked = BitMatrix::vstack(&[&out.b, &out.l]).expect("same width");
    if rank(&stacked) != rank(&out.b) + out.l.n_rows() {
        return fail("rows of L are not independent modulo B");
    }
    let g = labelled_graph(code, layer, &out);
    if let Err((i, j)) = boundary_commutation(&g, &out.b) {
        return Err(CssError::Assertion(format!("rows {i} and {j} of B anticommute on a boundary")));
    }
    Ok(out)
}

fn boundary_commutation(g: &TannerGraph, b: &BitMatrix) -> Result<(), (usize, usize)> {
    use crate::codewords::{sigma_in, sigma_out};
    let ins: Vec<PauliOperator> = b.rows().iter().map(|r| sigma_in(g, r)).collect();
    let outs: Vec<PauliOperator> = b.rows().iter().map(|r| sigma_out(g, r)).collect();
    for i in 0..b.n_rows() {
        for j in i + 1..b.n_rows() {
            if !ins[i].commutes_with(&ins[j]) || !outs[i].commutes_with(&outs[j]) {
                return Err((i, j));
            }
        }
    }
    Ok(())
}

/// Graph of `A` with mini-block bits placed on physical qubit slots.
///
/// Logical qubit `j`, physical qubit `q` becomes qubit `j·n + q + 1`; the
/// measurement mini-blocks become measurement bits.
#[must_use]
pub fn labelled_graph(code: &CssCode, layer: &LogicalLayer, phys: &PhysicalCode) -> TannerGraph {
    let n = code.n;
    let mut labels = Vec::with_capacity(phys.a.n_cols());
    let mut serial = 0;
    let mut meas = 0;
    for (comp, roles, m_c, r) in [
        (Component::X, &layer.roles_x, layer.m_c_x(), code.r_x),
        (Component::Z, &layer.roles_z, layer.m_c_z(), code.r_z),
    ] {
        for role in roles {
            for q in 0..n {
                labels.push(match role {
                    Some((j, t)) => BitLabel::primary(Slot { comp, qubit: j * n + q + 1, layer: *t }),
                    None => {
                        serial += 1;
                        BitLabel::aux(serial - 1, None)
                    }
                });
            }
        }
        for _ in 0..m_c * r {
            let mut l = BitLabel::aux(serial, None);
            l.meas = Some(meas);
            serial += 1;
            meas += 1;
            labels.push(l);
        }
    }
    TannerGraph::with_labels(&phys.a, labels, layer.n_logical() * n, layer.depth)
}

/// Generic `B` and `L` of the labelled graph with code stabilisers on every block.
pub fn generic_structure(code: &CssCode, layer: &LogicalLayer, phys: &PhysicalCode) -> Result<EcStructure, CssError> {
    let g = labelled_graph(code, layer, phys);
    let blocks = layer.n_logical();
    let s: Vec<PauliOperator> = (0..blocks).flat_map(|j| code.stabilisers(j, blocks)).collect();
    build_ec_structure(&g, &s, &s).map_err(|e| CssError::Assertion(e.to_string()))
}

fn same_span(a: &BitMatrix, b: &BitMatrix) -> bool {
    let r = rank(&BitMatrix::vstack(&[a, b]).expect("same width"));
    r == rank(a) && r == rank(b)
}

/// Compare the closed-form `B` and `B ∪ L` spans with the generic construction.
pub fn cross_validate(code: &CssCode, layer: &LogicalLayer, phys: &PhysicalCode) -> Result<bool, CssError> {
    let ec = generic_structure(code, layer, phys)?;
    let closed = BitMatrix::vstack(&[&phys.b, &phys.l]).expect("same width");
    let generic = BitMatrix::vstack(&[&ec.b, &ec.l]).expect("same width");
    Ok(same_span(&phys.b, &ec.b) && same_span(&closed, &generic))
}

/// Outcome of pushing the closed-form code through circuit synthesis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SynthesisCheck {
    pub n_qubits: usize,
    pub depth: usize,
    /// Transported rows of `B` and `L` are codewords of the synthesised circuit.
    pub codewords: bool,
    pub d: DistanceValue,
    pub d_circuit: DistanceValue,
    pub g_max: usize,
    /// `d_circuit ≤ d ≤ ⌊g_max/2⌋·d_circuit`.
    pub bound_holds: bool,
}

/// Synthesise a circuit from `(A, D)` with the trivial path partition and
/// transport `B`, `L` through the synthesis maps.
pub fn synthesis_check(phys: &PhysicalCode, max_weight: usize) -> Result<SynthesisCheck, CssError> {
    let err = |e: &dyn std::fmt::Display| CssError::Assertion(e.to_string());
    let g = TannerGraph::from_matrix(&phys.a);
    let w = phys.witness()?;
    let p = trivial_partition(&g, &w).map_err(|e| err(&e))?;
    let syn = synthesize(&g, &w, &p).map_err(|e| err(&e))?;
    let (b2, l2) = (syn.maps.map_rows(&phys.b), syn.maps.map_rows(&phys.l));
    let a2 = syn.graph.check_matrix();
    let codewords = a2.mul_transpose(&b2).is_zero() && a2.mul_transpose(&l2).is_zero();
    let d = circuit_distance(&phys.b, &phys.l, max_weight).map_err(|e| err(&e))?.value;
    let d_circuit = circuit_distance(&b2, &l2, max_weight).map_err(|e| err(&e))?.value;
    let g_max = g.max_degree();
    let bound_holds = match (d.exact(), d_circuit.exact()) {
        (Some(d), Some(d2)) => d2 <= d && d2 * (g_max / 2).max(1) >= d,
        _ => d == d_circuit,
    };
    Ok(SynthesisCheck { n_qubits: syn.circuit.n_qubits, depth: syn.circuit.depth(), codewords, d, d_circuit, g_max, bound_holds })
}

/// `(component, logical bit)` of a column in an `n`-size mini-block, or
/// `None` for measurement columns.
#[must_use]
pub fn mini_block(phys: &PhysicalCode, col: usize) -> Option<(Component, usize)> {
    let (comp, c, data) = if col < phys.x_cols() {
        (Component::X, col, phys.m_b_x * phys.n)
    } else {
        (Component::Z, col - phys.x_cols(), phys.m_b_z * phys.n)
    };
    (c < data).then(|| (comp, c / phys.n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::css_distance;
    use crate::tanner::verify_symmetry;

    fn c211() -> CssCode {
        derive_logicals(&BitMatrix::empty(2), &BitMatrix::from_strs(&["11"])).unwrap()
    }

    fn check_code(c: &CssCode) {
        assert!(c.gx.mul_transpose(&c.jz).is_zero());
        assert!(c.gz.mul_transpose(&c.jx).is_zero());
        assert_eq!(c.jx.mul_transpose(&c.jz), BitMatrix::identity(c.k));
        assert_eq!(c.k, c.n - rank(&c.gx) - rank(&c.gz));
    }

    #[test]
    fn two_qubit_code_logicals() {
        let c = c211();
        assert_eq!(c.k, 1);
        assert_eq!(c.jx, BitMatrix::from_strs(&["11"]));
        assert_eq!(c.jz, BitMatrix::from_strs(&["10"]));
        check_code(&c);
    }

    #[test]
    fn steane_and_trivial_logicals() {
        let s = CssCode::steane();
        assert_eq!(s.k, 1);
        check_code(&s);
        let t = derive_logicals(&BitMatrix::empty(1), &BitMatrix::empty(1)).unwrap();
        assert_eq!(t.jx, BitMatrix::identity(1));
        assert_eq!(t.jz, BitMatrix::identity(1));
        let rep = derive_logicals(&BitMatrix::empty(3), &BitMatrix::from_strs(&["110", "011"])).unwrap();
        check_code(&rep);
        assert_eq!(derive_logicals(&BitMatrix::from_strs(&["10"]), &BitMatrix::from_strs(&["11"])), Err(CssError::NotOrthogonal));
    }

    #[test]
    fn layers_satisfy_invariants() {
        for m in 1..=10 {
            repeated_measurement_layer(m).unwrap();
        }
        assert_eq!(repeated_measurement_layer(1).unwrap().a_x, BitMatrix::from_strs(&["11"]));
        assert_eq!(repeated_measurement_layer(2).unwrap().a_x, BitMatrix::from_strs(&["110", "011"]));
        assert!(repeated_measurement_layer(0).is_err());
        let c = logical_cnot_layer();
        c.validate().unwrap();
        assert_eq!(c.a_x.row(0).to_bits(), vec![1, 0, 1, 0]);
        let mut swapped = c.clone();
        swapped.d_z = BitMatrix::from_strs(&["00", "10", "01", "00"]);
        assert!(swapped.validate().is_err());
    }

    #[test]
    fn steane_shapes_and_symmetry() {
        let s = CssCode::steane();
        let p = assemble_physical(&s, &repeated_measurement_layer(2).unwrap()).unwrap();
        assert_eq!(p.x_cols(), 27);
        let g = TannerGraph::from_matrix(&p.a);
        verify_symmetry(&g, &p.witness().unwrap()).unwrap();
    }

    #[test]
    fn checker_pairs_two_cycles() {
        let c = c211();
        let p = assemble_physical(&c, &repeated_measurement_layer(2).unwrap()).unwrap();
        // Z block: 3 mini-blocks of 2 bits, then measurement bits of cycles 1 and 2.
        let x = p.x_cols();
        let mut v = BitVector::zeros(p.a.n_cols());
        v.set(x + 6, true);
        v.set(x + 7, true);
        v.set(x + 2, true);
        v.set(x + 3, true);
        assert!(p.a.mul_vec(&v).is_zero());
        assert!(crate::gf2::row_space_member(&p.b, &v));
    }

    #[test]
    fn closed_form_matches_generic() {
        let codes = [c211(), derive_logicals(&BitMatrix::empty(3), &BitMatrix::from_strs(&["110", "011"])).unwrap(), CssCode::steane()];
        for code in &codes {
            for layer in [1, 2, 3].map(|m| repeated_measurement_layer(m).unwrap()).into_iter().chain([logical_cnot_layer()]) {
                let p = assemble_physical(code, &layer).unwrap();
                assert!(cross_validate(code, &layer, &p).unwrap(), "n={} depth={}", code.n, layer.depth);
            }
        }
    }

    #[test]
    fn dependent_generators_rejected() {
        let g = BitMatrix::from_strs(&["11", "11"]);
        assert_eq!(derive_logicals(&BitMatrix::empty(2), &g), Err(CssError::Dependent('Z')));
    }

    #[test]
    fn zero_logical_code_has_empty_l() {
        let code = derive_logicals(&BitMatrix::empty(1), &BitMatrix::from_strs(&["1"])).unwrap();
        assert_eq!(code.k, 0);
        let p = assemble_physical(&code, &repeated_measurement_layer(2).unwrap()).unwrap();
        assert_eq!(p.l.n_rows(), 0);
    }

    #[test]
    fn steane_distance_equals_code_distance() {
        let s = CssCode::steane();
        let p = assemble_physical(&s, &repeated_measurement_layer(2).unwrap()).unwrap();
        let r = circuit_distance(&p.b, &p.l, 3).unwrap();
        assert_eq!(r.value, DistanceValue::Exact(3));
        assert_eq!(css_distance(&s.gx, &s.gz, 3).unwrap().d_css, DistanceValue::Exact(3));
        let w: Vec<usize> = r.witness.unwrap().ones().collect();
        assert_eq!(w.len(), 3);
        assert!(mini_block(&p, w[0]).is_some());
        assert!(w.iter().all(|&b| mini_block(&p, b) == mini_block(&p, w[0])), "{w:?}");
        // A code logical error on the middle mini-block alone.
        let mut e = BitVector::zeros(p.a.n_cols());
        for q in [0, 1, 2] {
            e.set(7 + q, true);
        }
        assert!(p.b.mul_vec(&e).is_zero());
        assert!(!p.l.mul_vec(&e).is_zero());
    }

    #[test]
    fn synthesised_circuits_carry_the_code() {
        let layers = [repeated_measurement_layer(1).unwrap(), repeated_measurement_layer(2).unwrap(), logical_cnot_layer()];
        for code in [c211(), CssCode::steane()] {
            for layer in &layers {
                let p = assemble_physical(&code, layer).unwrap();
                let r = synthesis_check(&p, 3).unwrap();
                assert!(r.codewords && r.bound_holds, "{r:?}");
            }
        }
    }
}
