//! Compressed-sparse-row complex matrices.

use super::dense::DenseMatrix;
use super::{C64, ZERO};
use crate::error::{Error, Result};

/// Entries with magnitude at or below this are treated as structural zeros.
pub const DROP_TOLERANCE: f64 = 1e-300;

/// Complex matrix in CSR layout.
///
/// Column indices are strictly increasing within each row and no stored
/// entry has magnitude `<= DROP_TOLERANCE`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut triplets = Vec::with_capacity(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            triplets.push((i, i, d));
        }
        Self::from_triplets(diag.len(), diag.len(), triplets)
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are
    /// summed, then entries that cancel to (near) zero are dropped.
    ///
    /// Panics if an index is out of range.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(usize, usize, C64)>,
    ) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut iter = triplets.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of range");
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if r2 == r && c2 == c {
                    v += v2;
                    iter.next();
                } else {
                    break;
                }
            }
            if v.norm() > DROP_TOLERANCE {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Assembles from raw CSR arrays, validating every structural invariant.
    pub fn from_raw(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<C64>,
    ) -> Result<Self> {
        let bad = |msg: &str| Error::InvalidConfig(format!("malformed CSR arrays: {msg}"));
        if row_ptr.len() != nrows + 1 || row_ptr[0] != 0 {
            return Err(bad("row pointer length or origin"));
        }
        if *row_ptr.last().unwrap() != col_idx.len() || col_idx.len() != values.len() {
            return Err(bad("array lengths disagree"));
        }
        for r in 0..nrows {
            if row_ptr[r] > row_ptr[r + 1] {
                return Err(bad("row pointer decreases"));
            }
            let cols = &col_idx[row_ptr[r]..row_ptr[r + 1]];
            if cols.windows(2).any(|w| w[0] >= w[1]) || cols.iter().any(|&c| c >= ncols) {
                return Err(bad("column indices not strictly increasing or out of range"));
            }
        }
        if values.iter().any(|v| v.norm() <= DROP_TOLERANCE) {
            return Err(bad("explicit zero stored"));
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[C64]) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(p) => vals[p],
            Err(_) => ZERO,
        }
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    /// `y = self * x` without dimension checks beyond debug assertions.
    pub fn mul_vec_into(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[p] * x[self.col_idx[p]];
            }
            *yi = acc;
        }
    }

    /// `r = b - self * x`
    pub fn residual_into(&self, x: &[C64], b: &[C64], r: &mut [C64]) {
        debug_assert_eq!(x.len(), self.ncols);
        for (i, ri) in r.iter_mut().enumerate() {
            let mut acc = b[i];
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc -= self.values[p] * x[self.col_idx[p]];
            }
            *ri = acc;
        }
    }

    /// `y += self * x`
    pub fn mul_vec_add(&self, x: &[C64], y: &mut [C64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = ZERO;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[p] * x[self.col_idx[p]];
            }
            *yi += acc;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for j in 0..self.ncols {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![ZERO; self.nnz()];
        for i in 0..self.nrows {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let c = self.col_idx[p];
                let q = next[c];
                col_idx[q] = i;
                values[q] = self.values[p];
                next[c] += 1;
            }
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut t = self.transpose();
        t.values.iter_mut().for_each(|v| *v = v.conj());
        t
    }

    pub fn scaled(&self, alpha: C64) -> Self {
        let triplets = self.iter().map(|(i, j, v)| (i, j, alpha * v)).collect();
        Self::from_triplets(self.nrows, self.ncols, triplets)
    }

    /// Scales row `i` by `factors[i]`.
    pub fn scale_rows(&self, factors: &[C64]) -> Self {
        let triplets = self
            .iter()
            .map(|(i, j, v)| (i, j, factors[i] * v))
            .collect();
        Self::from_triplets(self.nrows, self.ncols, triplets)
    }

    /// `self + alpha * other`
    pub fn add_scaled(&self, alpha: C64, other: &CsrMatrix) -> Result<Self> {
        if self.nrows != other.nrows {
            return Err(dim("add", self.nrows, other.nrows));
        }
        if self.ncols != other.ncols {
            return Err(dim("add", self.ncols, other.ncols));
        }
        let mut triplets: Vec<_> = self.iter().collect();
        triplets.extend(other.iter().map(|(i, j, v)| (i, j, alpha * v)));
        Ok(Self::from_triplets(self.nrows, self.ncols, triplets))
    }

    /// Sparse product `self * rhs` (row-wise Gustavson with a dense accumulator).
    pub fn matmul(&self, rhs: &CsrMatrix) -> Result<Self> {
        if self.ncols != rhs.nrows {
            return Err(dim("sparse matmul", self.ncols, rhs.nrows));
        }
        let mut acc = vec![ZERO; rhs.ncols];
        let mut marker = vec![usize::MAX; rhs.ncols];
        let mut touched: Vec<usize> = Vec::new();
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..self.nrows {
            touched.clear();
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                let k = self.col_idx[p];
                let a = self.values[p];
                for q in rhs.row_ptr[k]..rhs.row_ptr[k + 1] {
                    let j = rhs.col_idx[q];
                    if marker[j] != i {
                        marker[j] = i;
                        acc[j] = ZERO;
                        touched.push(j);
                    }
                    acc[j] += a * rhs.values[q];
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                if acc[j].norm() > DROP_TOLERANCE {
                    col_idx.push(j);
                    values.push(acc[j]);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            nrows: self.nrows,
            ncols: rhs.ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &CsrMatrix) -> Self {
        let mut triplets = Vec::with_capacity(self.nnz() * rhs.nnz());
        for (i1, j1, v1) in self.iter() {
            for (i2, j2, v2) in rhs.iter() {
                triplets.push((i1 * rhs.nrows + i2, j1 * rhs.ncols + j2, v1 * v2));
            }
        }
        Self::from_triplets(self.nrows * rhs.nrows, self.ncols * rhs.ncols, triplets)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.iter() {
            d[(i, j)] = v;
        }
        d
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖self - selfᵀ‖_F` (plain transpose, no conjugation).
    pub fn transpose_asymmetry(&self) -> f64 {
        let t = self.transpose();
        self.add_scaled(C64::new(-1.0, 0.0), &t)
            .map(|d| d.frobenius_norm())
            .unwrap_or(f64::INFINITY)
    }
}

fn dim(op: &'static str, expected: usize, found: usize) -> Error {
    Error::DimensionMismatch {
        op,
        expected,
        found,
    }
}

/// `M·x` with a dimension check.
pub fn spmv(m: &CsrMatrix, x: &[C64]) -> Result<Vec<C64>> {
    if m.ncols() != x.len() {
        return Err(dim("spmv", m.ncols(), x.len()));
    }
    let mut y = vec![ZERO; m.nrows()];
    m.mul_vec_into(x, &mut y);
    Ok(y)
}

/// `R·A·P`, evaluated as `R·(A·P)`.
pub fn sparse_triple_product(r: &CsrMatrix, a: &CsrMatrix, p: &CsrMatrix) -> Result<CsrMatrix> {
    if r.ncols() != a.nrows() {
        return Err(dim("triple product (R·A)", r.ncols(), a.nrows()));
    }
    if a.ncols() != p.nrows() {
        return Err(dim("triple product (A·P)", a.ncols(), p.nrows()));
    }
    r.matmul(&a.matmul(p)?)
}
