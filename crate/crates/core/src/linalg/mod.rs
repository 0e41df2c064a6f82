//! Dense matrices over GF(q): row reduction, rank, kernels, row-space
//! membership and column permutations.
//!
//! `MatrixGF` stores entries row-major. Elimination runs on an internal row
//! store chosen by field: bit-packed words for GF(2), plain elements otherwise.
//! The pivot rule is fixed (first nonzero entry top-down, columns left to
//! right), so the reduced form is reproducible bit for bit.

mod bits;
mod dense;

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::gf::{FFElem, FieldSpec, GfError};

pub(crate) use bits::BitRows;
pub(crate) use dense::DenseRows;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("mapping is not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("matrices are over different fields ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error(transparent)]
    Field(#[from] GfError),
}

/// How a row's weight is counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKind {
    /// Number of nonzero entries.
    Hamming,
    /// Number of nonzero `(a_i, b_i)` pairs in an interleaved row.
    Symplectic,
}

impl WeightKind {
    pub fn of(self, v: &[FFElem]) -> usize {
        match self {
            WeightKind::Hamming => hamming_weight(v),
            WeightKind::Symplectic => v
                .chunks(2)
                .filter(|pair| pair.iter().any(|x| !x.is_zero()))
                .count(),
        }
    }
}

pub fn hamming_weight(v: &[FFElem]) -> usize {
    v.iter().filter(|x| !x.is_zero()).count()
}

/// Row store used by elimination loops.
pub(crate) trait Echelon: Clone + Send + Sync {
    type Vector;

    fn load(m: &MatrixGF) -> Self;
    fn store(&self, field: &FieldSpec) -> MatrixGF;
    /// Overwrites `self` with `src`, moving column `j` to `col_map[j]`.
    fn permute_from(&mut self, src: &Self, col_map: &[usize]);
    /// Reduces in place and returns the pivot columns.
    fn rref(&mut self) -> Vec<usize>;
    fn weight(&self, row: usize, kind: WeightKind) -> usize;
    /// Entry `j` of the result is column `col_map[j]` of `row`.
    fn gather_row(&self, row: usize, col_map: &[usize]) -> Vec<FFElem>;
    fn vector(&self, v: &[FFElem]) -> Self::Vector;
    /// Reduces `v` against the leading rows, which must be in reduced form
    /// with the given pivots. True when nothing remains.
    fn reduce(&self, pivots: &[usize], v: &mut Self::Vector) -> bool;
}

#[derive(Clone, PartialEq, Eq)]
pub struct MatrixGF {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<FFElem>,
}

impl fmt::Debug for MatrixGF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "MatrixGF {}x{} over {}",
            self.rows, self.cols, self.field
        )?;
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Reduced row echelon form with its rank and pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: MatrixGF,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl MatrixGF {
    pub(crate) fn from_parts(
        field: FieldSpec,
        rows: usize,
        cols: usize,
        data: Vec<FFElem>,
    ) -> Self {
        debug_assert_eq!(rows * cols, data.len());
        MatrixGF {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn new(
        field: FieldSpec,
        rows: usize,
        cols: usize,
        data: Vec<FFElem>,
    ) -> Result<Self, LinalgError> {
        if rows * cols != data.len() {
            return Err(LinalgError::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        for x in &data {
            field.elem(x.value() as u64)?;
        }
        Ok(MatrixGF::from_parts(field, rows, cols, data))
    }

    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        MatrixGF::from_parts(field.clone(), rows, cols, vec![FFElem::ZERO; rows * cols])
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        let mut m = MatrixGF::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = FFElem::ONE;
        }
        m
    }

    /// Builds a matrix from integer rows; every row must have `cols` entries.
    pub fn from_rows<R: AsRef<[u32]>>(
        field: &FieldSpec,
        cols: usize,
        rows: &[R],
    ) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for &v in row {
                data.push(field.elem(v as u64)?);
            }
        }
        Ok(MatrixGF::from_parts(field.clone(), rows.len(), cols, data))
    }

    pub fn from_elem_rows(
        field: &FieldSpec,
        cols: usize,
        rows: &[Vec<FFElem>],
    ) -> Result<Self, LinalgError> {
        let data: Vec<FFElem> = rows.iter().flatten().copied().collect();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::DimensionMismatch(format!(
                "every row must have {cols} entries"
            )));
        }
        MatrixGF::new(field.clone(), rows.len(), cols, data)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[FFElem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> FFElem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: FFElem) {
        debug_assert!(v.value() < self.field.q());
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FFElem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[FFElem]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    /// Rows as plain integers, convenient for tests and display.
    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.row_iter()
            .map(|r| r.iter().map(|x| x.value()).collect())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn nnz(&self) -> usize {
        hamming_weight(&self.data)
    }

    fn same_field(&self, other: &MatrixGF) -> Result<(), LinalgError> {
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch(
                self.field.to_string(),
                other.field.to_string(),
            ));
        }
        Ok(())
    }

    pub fn transpose(&self) -> MatrixGF {
        let mut out = MatrixGF::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    pub fn matmul(&self, other: &MatrixGF) -> Result<MatrixGF, LinalgError> {
        self.same_field(other)?;
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = MatrixGF::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for (k, &a) in self.row(r).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let idx = r * other.cols + c;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, other.get(k, c)));
                }
            }
        }
        Ok(out)
    }

    /// `self * other^T`.
    pub fn mul_transpose(&self, other: &MatrixGF) -> Result<MatrixGF, LinalgError> {
        self.same_field(other)?;
        if self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "cannot multiply {}x{} by the transpose of {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = MatrixGF::zeros(&self.field, self.rows, other.rows);
        for r in 0..self.rows {
            for s in 0..other.rows {
                out.data[r * other.rows + s] = dot(&self.field, self.row(r), other.row(s));
            }
        }
        Ok(out)
    }

    /// Applies the matrix to a column vector.
    pub fn mul_vec(&self, v: &[FFElem]) -> Result<Vec<FFElem>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok(self.row_iter().map(|r| dot(&self.field, r, v)).collect())
    }

    pub fn hstack(&self, other: &MatrixGF) -> Result<MatrixGF, LinalgError> {
        self.same_field(other)?;
        if self.rows != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in 0..self.rows {
            data.extend_from_slice(self.row(r));
            data.extend_from_slice(other.row(r));
        }
        Ok(MatrixGF::from_parts(
            self.field.clone(),
            self.rows,
            cols,
            data,
        ))
    }

    pub fn vstack(&self, other: &MatrixGF) -> Result<MatrixGF, LinalgError> {
        self.same_field(other)?;
        if self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "vstack of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(MatrixGF::from_parts(
            self.field.clone(),
            self.rows + other.rows,
            self.cols,
            data,
        ))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &MatrixGF) -> Result<MatrixGF, LinalgError> {
        self.same_field(other)?;
        let f = &self.field;
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = MatrixGF::zeros(f, rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let r = i * other.rows + k;
                        let c = j * other.cols + l;
                        out.data[r * cols + c] = f.mul(a, other.get(k, l));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> MatrixGF {
        let data = self.data.iter().map(|&x| self.field.neg(x)).collect();
        MatrixGF::from_parts(self.field.clone(), self.rows, self.cols, data)
    }

    pub fn rref(&self) -> Rref {
        rref(self)
    }

    pub fn rank(&self) -> usize {
        if self.field.is_binary() {
            BitRows::load(self).rref().len()
        } else {
            DenseRows::load(self).rref().len()
        }
    }

    pub fn kernel_basis(&self) -> MatrixGF {
        kernel_basis(self)
    }

    pub fn permute_columns(&self, perm: &Perm) -> Result<MatrixGF, LinalgError> {
        permute_columns(self, perm)
    }
}

pub fn dot(field: &FieldSpec, a: &[FFElem], b: &[FFElem]) -> FFElem {
    a.iter().zip(b).fold(FFElem::ZERO, |acc, (&x, &y)| {
        field.add(acc, field.mul(x, y))
    })
}

fn reduce_with<E: Echelon>(a: &MatrixGF) -> Rref {
    let mut store = E::load(a);
    let pivots = store.rref();
    Rref {
        matrix: store.store(a.field()),
        rank: pivots.len(),
        pivots,
    }
}

/// Reduced row echelon form. Zero rows are kept at the bottom.
pub fn rref(a: &MatrixGF) -> Rref {
    if a.field().is_binary() {
        reduce_with::<BitRows>(a)
    } else {
        reduce_with::<DenseRows>(a)
    }
}

/// Basis of `{v : a v^T = 0}`, one row per free column of the reduced form,
/// in increasing free-column order.
pub fn kernel_basis(a: &MatrixGF) -> MatrixGF {
    let f = a.field();
    let Rref { matrix, pivots, .. } = rref(a);
    let mut is_pivot = vec![false; a.ncols()];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let free: Vec<usize> = (0..a.ncols()).filter(|&c| !is_pivot[c]).collect();
    let mut out = MatrixGF::zeros(f, free.len(), a.ncols());
    for (i, &fc) in free.iter().enumerate() {
        out.set(i, fc, FFElem::ONE);
        for (r, &pc) in pivots.iter().enumerate() {
            out.set(i, pc, f.neg(matrix.get(r, fc)));
        }
    }
    out
}

/// Cached reduced form of a matrix for repeated membership tests.
#[derive(Clone, Debug)]
pub struct RowSpace {
    cols: usize,
    inner: RowSpaceInner,
}

#[derive(Clone, Debug)]
enum RowSpaceInner {
    Binary(BitRows, Vec<usize>),
    General(DenseRows, Vec<usize>),
}

impl RowSpace {
    pub fn new(a: &MatrixGF) -> Self {
        let inner = if a.field().is_binary() {
            let mut store = BitRows::load(a);
            let pivots = store.rref();
            RowSpaceInner::Binary(store, pivots)
        } else {
            let mut store = DenseRows::load(a);
            let pivots = store.rref();
            RowSpaceInner::General(store, pivots)
        };
        RowSpace {
            cols: a.ncols(),
            inner,
        }
    }

    pub fn rank(&self) -> usize {
        match &self.inner {
            RowSpaceInner::Binary(_, p) | RowSpaceInner::General(_, p) => p.len(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn contains(&self, v: &[FFElem]) -> Result<bool, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok(match &self.inner {
            RowSpaceInner::Binary(s, p) => {
                let mut w = s.vector(v);
                s.reduce(p, &mut w)
            }
            RowSpaceInner::General(s, p) => {
                let mut w = s.vector(v);
                s.reduce(p, &mut w)
            }
        })
    }
}

/// True iff `v` is a linear combination of the rows of `a`.
pub fn in_rowspace(
    v: &[FFElem],
    a: &MatrixGF,
    cache: Option<&RowSpace>,
) -> Result<bool, LinalgError> {
    match cache {
        Some(space) => {
            if space.ncols() != a.ncols() {
                return Err(LinalgError::DimensionMismatch(
                    "cached row space does not match the matrix".into(),
                ));
            }
            space.contains(v)
        }
        None => RowSpace::new(a).contains(v),
    }
}

/// A permutation of `0..n`; `mapping[j]` is the image position of column `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perm {
    mapping: Vec<usize>,
}

impl Perm {
    pub fn new(mapping: Vec<usize>) -> Result<Self, LinalgError> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &x in &mapping {
            if x >= n || seen[x] {
                return Err(LinalgError::NotAPermutation(n));
            }
            seen[x] = true;
        }
        Ok(Perm { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Perm {
            mapping: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.mapping.len()];
        for (src, &dst) in self.mapping.iter().enumerate() {
            inv[dst] = src;
        }
        Perm { mapping: inv }
    }

    /// Lifts a qudit permutation to the `2n` interleaved symplectic columns.
    pub fn on_pairs(&self) -> Perm {
        let mapping = self
            .mapping
            .iter()
            .flat_map(|&d| [2 * d, 2 * d + 1])
            .collect();
        Perm { mapping }
    }
}

/// `result[:, p(j)] = a[:, j]`, i.e. `a · P`.
pub fn permute_columns(a: &MatrixGF, p: &Perm) -> Result<MatrixGF, LinalgError> {
    if p.len() != a.ncols() {
        return Err(LinalgError::DimensionMismatch(format!(
            "permutation of length {} against {} columns",
            p.len(),
            a.ncols()
        )));
    }
    let mut out = MatrixGF::zeros(a.field(), a.nrows(), a.ncols());
    for r in 0..a.nrows() {
        for (c, &x) in a.row(r).iter().enumerate() {
            out.set(r, p.mapping[c], x);
        }
    }
    Ok(out)
}

/// Uniform random permutation (Fisher-Yates).
pub fn rand_perm<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Perm {
    let mut mapping: Vec<usize> = (0..n).collect();
    mapping.shuffle(rng);
    Perm { mapping }
}
