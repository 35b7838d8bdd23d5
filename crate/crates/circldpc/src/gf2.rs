//! Dense GF(2) vectors and matrices with bit-packed rows.

use std::fmt;
use std::io::{BufRead, Write};

use thiserror::Error;

const WORD: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: expected {expected} columns, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("symplectic vectors must have even length, got {0}")]
    OddLength(usize),
    #[error("malformed matrix text at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Gf2Error {
    fn from(e: std::io::Error) -> Self {
        Gf2Error::Io(e.to_string())
    }
}

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    #[must_use]
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    #[must_use]
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    #[must_use]
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Vector of length `len` with ones at `support`.
    #[must_use]
    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in support {
            v.flip(i);
        }
        v
    }

    #[must_use]
    pub fn unit(len: usize, i: usize) -> Self {
        Self::from_support(len, &[i])
    }

    #[must_use]
    pub fn len(&self) -> usize {
        self.len
    }

    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// # Panics
    /// Panics if `i` is out of range.
    #[must_use]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    #[must_use]
    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Inner product over GF(2).
    #[must_use]
    pub fn dot(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    #[must_use]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + b)
            })
        })
    }

    #[must_use]
    pub fn first_one(&self) -> Option<usize> {
        self.ones().next()
    }

    #[must_use]
    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| u8::from(self.get(i))).collect()
    }

    /// Entries at the given positions, in order.
    #[must_use]
    pub fn select(&self, positions: &[usize]) -> BitVector {
        let mut out = BitVector::zeros(positions.len());
        for (k, &p) in positions.iter().enumerate() {
            if self.get(p) {
                out.set(k, true);
            }
        }
        out
    }

    #[must_use]
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector(")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitMatrix {
    n_cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    #[must_use]
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self { n_cols, rows: vec![BitVector::zeros(n_cols); n_rows] }
    }

    #[must_use]
    pub fn empty(n_cols: usize) -> Self {
        Self { n_cols, rows: Vec::new() }
    }

    #[must_use]
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// # Panics
    /// Panics if the rows have different lengths.
    #[must_use]
    pub fn from_rows(n_cols: usize, rows: Vec<BitVector>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), n_cols, "row length mismatch");
        }
        Self { n_cols, rows }
    }

    /// Build from a nested 0/1 array. All rows must have the same length.
    #[must_use]
    pub fn from_bits(rows: &[&[u8]]) -> Self {
        let n_cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(n_cols, rows.iter().map(|r| BitVector::from_bits(r)).collect())
    }

    /// Parse rows written as strings of `0`/`1`, e.g. `["1010", "0101"]`.
    #[must_use]
    pub fn from_strs(rows: &[&str]) -> Self {
        let n_cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            n_cols,
            rows.iter()
                .map(|r| BitVector::from_bits(&r.bytes().map(|b| b - b'0').collect::<Vec<_>>()))
                .collect(),
        )
    }

    #[must_use]
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    #[must_use]
    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    #[must_use]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.rows[r].flip(c);
    }

    #[must_use]
    pub fn row(&self, r: usize) -> &BitVector {
        &self.rows[r]
    }

    #[must_use]
    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    #[must_use]
    pub fn into_rows(self) -> Vec<BitVector> {
        self.rows
    }

    pub fn push_row(&mut self, row: BitVector) {
        assert_eq!(row.len(), self.n_cols, "row length mismatch");
        self.rows.push(row);
    }

    #[must_use]
    pub fn column(&self, c: usize) -> BitVector {
        let mut v = BitVector::zeros(self.n_rows());
        for (r, row) in self.rows.iter().enumerate() {
            if row.get(c) {
                v.set(r, true);
            }
        }
        v
    }

    #[must_use]
    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.n_cols, self.n_rows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// `self · v` for a column vector `v`.
    #[must_use]
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.n_cols, "vector length mismatch");
        BitVector::from_bools(&self.rows.iter().map(|r| r.dot(v)).collect::<Vec<_>>())
    }

    /// Matrix product `self · other`.
    #[must_use]
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.n_cols, other.n_rows(), "inner dimension mismatch");
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = BitVector::zeros(other.n_cols);
                for k in r.ones() {
                    acc.xor_assign(&other.rows[k]);
                }
                acc
            })
            .collect();
        BitMatrix { n_cols: other.n_cols, rows }
    }

    /// `self · otherᵀ`, convenient for checking `A·Bᵀ = 0`.
    #[must_use]
    pub fn mul_transpose(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.n_cols, other.n_cols, "column mismatch");
        let rows = self
            .rows
            .iter()
            .map(|r| BitVector::from_bools(&other.rows.iter().map(|o| r.dot(o)).collect::<Vec<_>>()))
            .collect();
        BitMatrix { n_cols: other.n_rows(), rows }
    }

    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    /// Vertical concatenation.
    pub fn vstack(parts: &[&BitMatrix]) -> Result<BitMatrix, Gf2Error> {
        let n_cols = parts.first().map_or(0, |m| m.n_cols);
        let mut rows = Vec::new();
        for m in parts {
            if m.n_cols != n_cols {
                return Err(Gf2Error::Dimension { expected: n_cols, found: m.n_cols });
            }
            rows.extend(m.rows.iter().cloned());
        }
        Ok(BitMatrix { n_cols, rows })
    }

    /// Horizontal concatenation. All parts need the same row count.
    ///
    /// # Panics
    /// Panics on a row count mismatch.
    #[must_use]
    pub fn hstack(parts: &[&BitMatrix]) -> BitMatrix {
        let n_rows = parts.first().map_or(0, |m| m.n_rows());
        let n_cols: usize = parts.iter().map(|m| m.n_cols).sum();
        let mut out = BitMatrix::zeros(n_rows, n_cols);
        let mut off = 0;
        for m in parts {
            assert_eq!(m.n_rows(), n_rows, "row count mismatch in hstack");
            for (r, row) in m.rows.iter().enumerate() {
                for c in row.ones() {
                    out.set(r, off + c, true);
                }
            }
            off += m.n_cols;
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    #[must_use]
    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.n_rows() * other.n_rows(), self.n_cols * other.n_cols);
        for (i, ri) in self.rows.iter().enumerate() {
            for j in ri.ones() {
                for (k, rk) in other.rows.iter().enumerate() {
                    for l in rk.ones() {
                        out.set(i * other.n_rows() + k, j * other.n_cols + l, true);
                    }
                }
            }
        }
        out
    }

    #[must_use]
    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        BitMatrix {
            n_cols: cols.len(),
            rows: self.rows.iter().map(|r| r.select(cols)).collect(),
        }
    }

    /// Reduced row echelon form (zero rows dropped) and its pivot columns.
    #[must_use]
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut rows: Vec<BitVector> = self.rows.iter().filter(|r| !r.is_zero()).cloned().collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.n_cols {
            if rank == rows.len() {
                break;
            }
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(col);
            rank += 1;
        }
        rows.truncate(rank);
        (BitMatrix { n_cols: self.n_cols, rows }, pivots)
    }

    #[must_use]
    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{v : self · v = 0}` in reduced row echelon form.
    #[must_use]
    pub fn kernel_basis(&self) -> BitMatrix {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.n_cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.n_cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVector::zeros(self.n_cols);
            v.set(free, true);
            for (i, &p) in pivots.iter().enumerate() {
                if r.rows[i].get(free) {
                    v.set(p, true);
                }
            }
            basis.push(v);
        }
        BitMatrix { n_cols: self.n_cols, rows: basis }.rref().0
    }

    /// Inverse of a square matrix, if it exists.
    #[must_use]
    pub fn inverse(&self) -> Option<BitMatrix> {
        let n = self.n_rows();
        if n != self.n_cols {
            return None;
        }
        let aug = BitMatrix::hstack(&[self, &BitMatrix::identity(n)]);
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        Some(r.select_columns(&cols))
    }

    /// Write in the plain text format: header `<rows> <cols>` then rows of `0`/`1`.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<(), Gf2Error> {
        writeln!(w, "{} {}", self.n_rows(), self.n_cols)?;
        for row in &self.rows {
            let line: Vec<&str> = (0..self.n_cols).map(|c| if row.get(c) { "1" } else { "0" }).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        Ok(())
    }

    #[must_use]
    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<BitMatrix, Gf2Error> {
        let mut lines = r
            .lines()
            .enumerate()
            .map(|(i, l)| l.map(|l| (i + 1, l)))
            .filter(|x| x.as_ref().map_or(true, |(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#')));
        let (hl, header) = lines.next().ok_or(Gf2Error::Parse { line: 1, msg: "missing header".into() })??;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| Gf2Error::Parse { line: hl, msg: "header must be `<rows> <cols>`".into() })?;
        let [n_rows, n_cols] = dims[..] else {
            return Err(Gf2Error::Parse { line: hl, msg: "header must be `<rows> <cols>`".into() });
        };
        let mut m = BitMatrix::zeros(n_rows, n_cols);
        for r in 0..n_rows {
            let (ln, line) = lines
                .next()
                .ok_or(Gf2Error::Parse { line: hl + r + 1, msg: "missing row".into() })??;
            let vals: Vec<&str> = line.split_whitespace().collect();
            if vals.len() != n_cols {
                return Err(Gf2Error::Parse { line: ln, msg: format!("expected {n_cols} entries, found {}", vals.len()) });
            }
            for (c, v) in vals.iter().enumerate() {
                match *v {
                    "0" => {}
                    "1" => m.set(r, c, true),
                    other => return Err(Gf2Error::Parse { line: ln, msg: format!("bad entry `{other}`") }),
                }
            }
        }
        Ok(m)
    }

    pub fn from_text(s: &str) -> Result<BitMatrix, Gf2Error> {
        Self::read_text(s.as_bytes())
    }

    /// Write in the alist sparse format (1-based indices, zero-padded lists).
    pub fn write_alist<W: Write>(&self, mut w: W) -> Result<(), Gf2Error> {
        let t = self.transpose();
        let col_lists: Vec<Vec<usize>> = t.rows.iter().map(|r| r.ones().collect()).collect();
        let row_lists: Vec<Vec<usize>> = self.rows.iter().map(|r| r.ones().collect()).collect();
        let max_col = col_lists.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = row_lists.iter().map(Vec::len).max().unwrap_or(0);
        writeln!(w, "{} {}", self.n_cols, self.n_rows())?;
        writeln!(w, "{max_col} {max_row}")?;
        let join = |xs: Vec<String>| xs.join(" ");
        writeln!(w, "{}", join(col_lists.iter().map(|l| l.len().to_string()).collect()))?;
        writeln!(w, "{}", join(row_lists.iter().map(|l| l.len().to_string()).collect()))?;
        for (lists, width) in [(&col_lists, max_col), (&row_lists, max_row)] {
            for l in lists.iter() {
                let mut items: Vec<String> = l.iter().map(|i| (i + 1).to_string()).collect();
                items.resize(width, "0".to_string());
                writeln!(w, "{}", join(items))?;
            }
        }
        Ok(())
    }

    #[must_use]
    pub fn to_alist(&self) -> String {
        let mut buf = Vec::new();
        self.write_alist(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii")
    }

    /// Read the alist format. Only the column lists are needed; row lists are
    /// cross-checked.
    pub fn read_alist<R: BufRead>(r: R) -> Result<BitMatrix, Gf2Error> {
        let mut nums = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            for tok in line.split_whitespace() {
                let v: usize = tok
                    .parse()
                    .map_err(|_| Gf2Error::Parse { line: i + 1, msg: format!("bad integer `{tok}`") })?;
                nums.push(v);
            }
        }
        let mut it = nums.into_iter();
        let mut next = |what: &str| it.next().ok_or(Gf2Error::Parse { line: 0, msg: format!("truncated alist ({what})") });
        let n_cols = next("n")?;
        let n_rows = next("m")?;
        let max_col = next("max col")?;
        let max_row = next("max row")?;
        let col_deg: Vec<usize> = (0..n_cols).map(|_| next("col degree")).collect::<Result<_, _>>()?;
        let row_deg: Vec<usize> = (0..n_rows).map(|_| next("row degree")).collect::<Result<_, _>>()?;
        let mut m = BitMatrix::zeros(n_rows, n_cols);
        for c in 0..n_cols {
            for k in 0..max_col {
                let v = next("col list")?;
                if k < col_deg[c] {
                    if v == 0 || v > n_rows {
                        return Err(Gf2Error::Parse { line: 0, msg: format!("row index {v} out of range") });
                    }
                    m.set(v - 1, c, true);
                }
            }
        }
        for r in 0..n_rows {
            let mut seen = 0;
            for k in 0..max_row {
                let v = next("row list")?;
                if k < row_deg[r] {
                    if v == 0 || v > n_cols || !m.get(r, v - 1) {
                        return Err(Gf2Error::Parse { line: 0, msg: format!("row list of row {} disagrees with column lists", r + 1) });
                    }
                    seen += 1;
                }
            }
            if seen != m.row(r).weight() {
                return Err(Gf2Error::Parse { line: 0, msg: format!("row degree of row {} disagrees", r + 1) });
            }
        }
        Ok(m)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.n_rows(), self.n_cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

#[must_use]
pub fn rank(m: &BitMatrix) -> usize {
    m.rank()
}

#[must_use]
pub fn kernel_basis(m: &BitMatrix) -> BitMatrix {
    m.kernel_basis()
}

/// True iff `v` is a GF(2) combination of rows of `m`.
#[must_use]
pub fn row_space_member(m: &BitMatrix, v: &BitVector) -> bool {
    assert_eq!(v.len(), m.n_cols(), "vector length mismatch");
    let (r, pivots) = m.rref();
    reduce(&r, &pivots, v).is_zero()
}

/// Reduce `v` against an RREF basis with known pivots.
#[must_use]
pub fn reduce(rref: &BitMatrix, pivots: &[usize], v: &BitVector) -> BitVector {
    let mut out = v.clone();
    for (row, &p) in rref.rows().iter().zip(pivots) {
        if out.get(p) {
            out.xor_assign(row);
        }
    }
    out
}

/// Basis of the intersection of the kernels of all matrices.
pub fn stack_kernel(ms: &[&BitMatrix]) -> Result<BitMatrix, Gf2Error> {
    Ok(BitMatrix::vstack(ms)?.kernel_basis())
}

/// Basis of `rowsp(a) + rowsp(b)`.
pub fn span_union(a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
    Ok(BitMatrix::vstack(&[a, b])?.rref().0)
}

/// Symplectic form on `(x | z)` vectors. Returns true iff the Paulis anticommute.
pub fn symplectic_product(b1: &BitVector, b2: &BitVector) -> Result<bool, Gf2Error> {
    if b1.len() % 2 == 1 {
        return Err(Gf2Error::OddLength(b1.len()));
    }
    if b1.len() != b2.len() {
        return Err(Gf2Error::Dimension { expected: b1.len(), found: b2.len() });
    }
    let n = b1.len() / 2;
    let mut acc = false;
    for i in 0..n {
        acc ^= (b1.get(i) && b2.get(n + i)) ^ (b1.get(n + i) && b2.get(i));
    }
    Ok(acc)
}

/// Outcome of a capped weight search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightSearch {
    Found { vector: BitVector, weight: usize },
    /// Nothing up to `cap`; the true minimum (if any) is at least `cap + 1`.
    LowerBound { cap: usize },
}

/// Lexicographically first `w`-subset of `0..syndromes.len()` whose XOR of
/// syndromes satisfies `accept`. Returns the subset and the number of subsets
/// visited.
pub fn first_combination<F>(syndromes: &[BitVector], w: usize, accept: F) -> (Option<Vec<usize>>, u64)
where
    F: Fn(&[usize], &BitVector) -> bool,
{
    let n = syndromes.len();
    if w == 0 {
        let z = BitVector::zeros(syndromes.first().map_or(0, BitVector::len));
        return (accept(&[], &z).then(Vec::new), 1);
    }
    let mut count = 0;
    for first in 0..=n.saturating_sub(w) {
        let (hit, c) = first_combination_from(syndromes, w, first, &accept);
        count += c;
        if hit.is_some() {
            return (hit, count);
        }
    }
    (None, count)
}

/// As [`first_combination`] but restricted to subsets whose smallest element is `first`.
pub fn first_combination_from<F>(syndromes: &[BitVector], w: usize, first: usize, accept: &F) -> (Option<Vec<usize>>, u64)
where
    F: Fn(&[usize], &BitVector) -> bool,
{
    let n = syndromes.len();
    if w == 0 || first + w > n {
        return (None, 0);
    }
    let mut idx: Vec<usize> = (first..first + w).collect();
    let mut partial: Vec<BitVector> = Vec::with_capacity(w);
    partial.push(syndromes[first].clone());
    for k in 1..w {
        let s = partial[k - 1].xor(&syndromes[idx[k]]);
        partial.push(s);
    }
    let mut count = 0u64;
    loop {
        count += 1;
        if accept(&idx, &partial[w - 1]) {
            return (Some(idx), count);
        }
        // idx[0] stays fixed; advance the rightmost position that can move
        let Some(k) = (1..w).rev().find(|&k| idx[k] < n - (w - k)) else {
            return (None, count);
        };
        idx[k] += 1;
        for j in k + 1..w {
            idx[j] = idx[j - 1] + 1;
        }
        for j in k..w {
            partial[j] = partial[j - 1].xor(&syndromes[idx[j]]);
        }
    }
}

/// Minimum-weight nonzero vector of `rowsp(space_basis)` not rejected by `exclude`.
///
/// The search enumerates the ambient space by weight and tests membership via
/// the parity checks of the row space, so the first hit is lexicographically
/// smallest among the minimum-weight candidates.
pub fn min_weight_in<F>(space_basis: &BitMatrix, exclude: F, max_weight: usize) -> WeightSearch
where
    F: Fn(&BitVector) -> bool,
{
    let n = space_basis.n_cols();
    let checks = space_basis.kernel_basis();
    let syndromes: Vec<BitVector> = (0..n).map(|c| checks.column(c)).collect();
    for w in 1..=max_weight.min(n) {
        let accept = |idx: &[usize], s: &BitVector| s.is_zero() && !exclude(&BitVector::from_support(n, idx));
        if let (Some(idx), _) = first_combination(&syndromes, w, accept) {
            return WeightSearch::Found { vector: BitVector::from_support(n, &idx), weight: w };
        }
    }
    WeightSearch::LowerBound { cap: max_weight }
}

/// Binomial coefficient, saturating.
#[must_use]
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Zero-based lexicographic rank of a sorted `w`-subset of `0..n`.
#[must_use]
pub fn combination_rank(n: usize, idx: &[usize]) -> u128 {
    let w = idx.len();
    let mut rank = 0u128;
    let mut prev = 0usize;
    for (k, &i) in idx.iter().enumerate() {
        for j in prev..i {
            rank += binomial(n - j - 1, w - k - 1);
        }
        prev = i + 1;
    }
    rank
}
