//! Row-major dense complex matrices and the factorizations the certificate
//! engine relies on: partial-pivoting LU, complex Cholesky, power iteration.

use std::ops::{Index, IndexMut};

use super::gemm::{gemm, View};
use super::sparse::CsrMatrix;
use super::{norm2, C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Largest dense matrix (in entries) the crate will form by default.
/// 2500² covers the 49×49-node two-grid certificates.
pub const DEFAULT_DENSE_LIMIT: usize = 2500 * 2500;

/// Block size of the blocked factorizations.
const BLOCK: usize = 64;

/// Relative pivot threshold for LU.
pub const LU_PIVOT_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<C64>,
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.ncols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.ncols + j]
    }
}

impl DenseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![ZERO; nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                data.push(f(i, j));
            }
        }
        Self { nrows, ncols, data }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Real-valued rows, mostly for tests and small fixtures.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        Self::from_fn(rows.len(), ncols, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)])
    }

    /// Plain `self * rhs`. Panics on inner-dimension mismatch.
    pub fn matmul(&self, rhs: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.ncols, rhs.nrows, "dense matmul inner dimension");
        let mut out = DenseMatrix::zeros(self.nrows, rhs.ncols);
        gemm(
            (self.nrows, self.ncols, rhs.ncols),
            ONE,
            View::row_major(&self.data, self.ncols),
            View::row_major(&rhs.data, rhs.ncols),
            ZERO,
            &mut out.data,
            rhs.ncols,
        );
        out
    }

    /// `selfᴴ · self`, with the lower triangle mirrored from the upper one so
    /// the result is Hermitian to the last bit.
    pub fn gram(&self) -> DenseMatrix {
        let n = self.ncols;
        let adj = self.adjoint();
        let mut g = adj.matmul(self);
        for i in 0..n {
            for j in 0..i {
                g.data[i * n + j] = g.data[j * n + i].conj();
            }
            let d = g.data[i * n + i];
            g.data[i * n + i] = C64::new(d.re, 0.0);
        }
        g
    }

    /// `self · S` for sparse `S`.
    pub fn mul_sparse(&self, s: &CsrMatrix) -> DenseMatrix {
        assert_eq!(self.ncols, s.nrows(), "dense·sparse inner dimension");
        let mut out = DenseMatrix::zeros(self.nrows, s.ncols());
        for i in 0..self.nrows {
            let orow = &mut out.data[i * s.ncols()..(i + 1) * s.ncols()];
            for k in 0..self.ncols {
                let a = self.data[i * self.ncols + k];
                if a == ZERO {
                    continue;
                }
                let (cols, vals) = s.row(k);
                for (&j, &v) in cols.iter().zip(vals) {
                    orow[j] += a * v;
                }
            }
        }
        out
    }

    /// `S · self` for sparse `S`.
    pub fn sparse_mul(s: &CsrMatrix, d: &DenseMatrix) -> DenseMatrix {
        assert_eq!(s.ncols(), d.nrows, "sparse·dense inner dimension");
        let mut out = DenseMatrix::zeros(s.nrows(), d.ncols);
        for i in 0..s.nrows() {
            let (cols, vals) = s.row(i);
            let orow = &mut out.data[i * d.ncols..(i + 1) * d.ncols];
            for (&k, &v) in cols.iter().zip(vals) {
                for (o, b) in orow.iter_mut().zip(d.row(k)) {
                    *o += v * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|i| {
                let mut acc = ZERO;
                for (a, b) in self.row(i).iter().zip(x) {
                    acc += a * b;
                }
                acc
            })
            .collect()
    }

    /// `selfᴴ · x`
    pub fn adjoint_matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![ZERO; self.ncols];
        for (i, &xi) in x.iter().enumerate() {
            for (yj, a) in y.iter_mut().zip(self.row(i)) {
                *yj += a.conj() * xi;
            }
        }
        y
    }

    /// `self += alpha * other`
    pub fn add_assign_scaled(&mut self, alpha: C64, other: &DenseMatrix) {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    /// `self += alpha * I`
    pub fn add_identity(&mut self, alpha: C64) {
        for i in 0..self.nrows.min(self.ncols) {
            self[(i, i)] += alpha;
        }
    }

    pub fn scale(&mut self, alpha: C64) {
        for a in &mut self.data {
            *a *= alpha;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let mut sums = vec![0.0; self.ncols];
        for i in 0..self.nrows {
            for (s, v) in sums.iter_mut().zip(self.row(i)) {
                *s += v.norm();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `‖M − Mᴴ‖_F / ‖M‖_F` (zero for the zero matrix).
    pub fn hermitian_residual(&self) -> f64 {
        assert!(self.is_square());
        let n = self.nrows;
        let mut diff = 0.0;
        for i in 0..n {
            for j in 0..n {
                diff += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            0.0
        } else {
            diff.sqrt() / norm
        }
    }

    /// Relative Frobenius distance `‖self − other‖_F / max(‖other‖_F, tiny)`.
    pub fn relative_distance(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let diff: f64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        diff.sqrt() / other.frobenius_norm().max(f64::MIN_POSITIVE)
    }
}

fn check_square(op: &'static str, m: &DenseMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            op,
            nrows: m.nrows,
            ncols: m.ncols,
        })
    }
}

/// `PA = LU` with partial pivoting; unit-lower `L` and `U` share storage.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: DenseMatrix,
    /// `perm[i]` is the original row that ended up in position `i`.
    perm: Vec<usize>,
    swaps: usize,
}

impl LuFactors {
    /// Right-looking blocked factorization; the trailing update of each
    /// block column goes through GEMM.
    pub fn factor(m: &DenseMatrix) -> Result<Self> {
        check_square("LU", m)?;
        let n = m.nrows;
        let threshold = LU_PIVOT_TOLERANCE * m.max_abs();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k0 in (0..n).step_by(BLOCK) {
            let k1 = (k0 + BLOCK).min(n);
            for k in k0..k1 {
                let (p, mag) = (k..n)
                    .map(|i| (i, lu.data[i * n + k].norm()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
                if mag <= threshold || mag == 0.0 {
                    return Err(Error::SingularPivot {
                        index: k,
                        magnitude: mag,
                    });
                }
                if p != k {
                    for j in 0..n {
                        lu.data.swap(k * n + j, p * n + j);
                    }
                    perm.swap(k, p);
                    swaps += 1;
                }
                let (head, tail) = lu.data.split_at_mut((k + 1) * n);
                let pivot_row = &head[k * n..];
                let inv_pivot = ONE / pivot_row[k];
                for row in tail.chunks_exact_mut(n) {
                    let l = row[k] * inv_pivot;
                    row[k] = l;
                    if l == ZERO {
                        continue;
                    }
                    for (x, &u) in row[k + 1..k1].iter_mut().zip(&pivot_row[k + 1..k1]) {
                        *x -= l * u;
                    }
                }
            }
            if k1 == n {
                break;
            }
            // U₁₂ ← L₁₁⁻¹ A₁₂
            for i in k0..k1 {
                let (head, tail) = lu.data.split_at_mut(i * n);
                let row = &mut tail[..n];
                for kk in k0..i {
                    let l = row[kk];
                    if l == ZERO {
                        continue;
                    }
                    let src = &head[kk * n + k1..(kk + 1) * n];
                    for (x, &u) in row[k1..].iter_mut().zip(src) {
                        *x -= l * u;
                    }
                }
            }
            // A₂₂ ← A₂₂ − L₂₁·U₁₂
            let kb = k1 - k0;
            let l21: Vec<C64> = (k1..n)
                .flat_map(|i| lu.data[i * n + k0..i * n + k1].iter().copied())
                .collect();
            let u12: Vec<C64> = (k0..k1)
                .flat_map(|i| lu.data[i * n + k1..(i + 1) * n].iter().copied())
                .collect();
            gemm(
                (n - k1, kb, n - k1),
                -ONE,
                View::row_major(&l21, kb),
                View::row_major(&u12, n - k1),
                ONE,
                &mut lu.data[k1 * n + k1..],
                n,
            );
        }
        Ok(Self { lu, perm, swaps })
    }

    pub fn dim(&self) -> usize {
        self.lu.nrows
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut y: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut acc = y[i];
            for k in 0..i {
                acc -= row[k] * y[k];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut acc = y[i];
            for k in i + 1..n {
                acc -= row[k] * y[k];
            }
            y[i] = acc / row[i];
        }
        b.copy_from_slice(&y);
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Solves for all columns at once, a block of rows at a time.
    pub fn inverse(&self) -> DenseMatrix {
        let n = self.dim();
        let lu = &self.lu.data;
        let mut x = DenseMatrix::zeros(n, n);
        for (i, &p) in self.perm.iter().enumerate() {
            x[(i, p)] = ONE;
        }
        for i0 in (0..n).step_by(BLOCK) {
            let i1 = (i0 + BLOCK).min(n);
            let (done, rest) = x.data.split_at_mut(i0 * n);
            let blk = &mut rest[..(i1 - i0) * n];
            gemm(
                (i1 - i0, i0, n),
                -ONE,
                View { data: &lu[i0 * n..], rs: n, cs: 1 },
                View::row_major(done, n),
                ONE,
                blk,
                n,
            );
            for i in i0..i1 {
                let (prev, cur) = blk.split_at_mut((i - i0) * n);
                let xi = &mut cur[..n];
                for k in i0..i {
                    let l = lu[i * n + k];
                    if l == ZERO {
                        continue;
                    }
                    for (a, &b) in xi.iter_mut().zip(&prev[(k - i0) * n..(k - i0 + 1) * n]) {
                        *a -= l * b;
                    }
                }
            }
        }
        let starts: Vec<usize> = (0..n).step_by(BLOCK).collect();
        for &i0 in starts.iter().rev() {
            let i1 = (i0 + BLOCK).min(n);
            let (head, done) = x.data.split_at_mut(i1 * n);
            let blk = &mut head[i0 * n..];
            gemm(
                (i1 - i0, n - i1, n),
                -ONE,
                View { data: &lu[i0 * n + i1..], rs: n, cs: 1 },
                View::row_major(done, n),
                ONE,
                blk,
                n,
            );
            for i in (i0..i1).rev() {
                let (cur, later) = blk.split_at_mut((i - i0 + 1) * n);
                let xi = &mut cur[(i - i0) * n..];
                for k in i + 1..i1 {
                    let u = lu[i * n + k];
                    if u == ZERO {
                        continue;
                    }
                    let off = (k - i - 1) * n;
                    for (a, &b) in xi.iter_mut().zip(&later[off..off + n]) {
                        *a -= u * b;
                    }
                }
                let inv = ONE / lu[i * n + i];
                for a in xi.iter_mut() {
                    *a *= inv;
                }
            }
        }
        x
    }

    /// `(log|det|, det/|det|)`.
    pub fn log_det(&self) -> (f64, C64) {
        let mut log_abs = 0.0;
        let mut phase = if self.swaps.is_multiple_of(2) { ONE } else { -ONE };
        for i in 0..self.dim() {
            let u = self.lu[(i, i)];
            log_abs += u.norm().ln();
            phase *= u / u.norm();
        }
        (log_abs, phase)
    }
}

/// Solves `M x = b` by dense LU.
pub fn dense_lu_solve(m: &DenseMatrix, b: &[C64]) -> Result<Vec<C64>> {
    if b.len() != m.nrows {
        return Err(Error::DimensionMismatch {
            op: "dense LU solve",
            expected: m.nrows,
            found: b.len(),
        });
    }
    Ok(LuFactors::factor(m)?.solve(b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NotHpdReason {
    NotSquare,
    /// `‖M − Mᴴ‖_F / ‖M‖_F` exceeded the tolerance.
    NonHermitian { residual: f64 },
    /// Cholesky pivot `index` (0-based) was not safely positive.
    Pivot { index: usize, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HpdVerdict {
    Hpd,
    NotHpd(NotHpdReason),
}

impl HpdVerdict {
    pub fn is_hpd(&self) -> bool {
        matches!(self, HpdVerdict::Hpd)
    }
}

/// Lower-triangular factor `L` with `M = L·Lᴴ`.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    l: DenseMatrix,
}

impl CholeskyFactor {
    /// Factors `m` using its lower triangle. Fails on the first pivot that is
    /// not greater than `tol · max diagonal`, after checking Hermiticity.
    pub fn factor(m: &DenseMatrix, tol: f64) -> std::result::Result<Self, NotHpdReason> {
        if !m.is_square() {
            return Err(NotHpdReason::NotSquare);
        }
        let residual = m.hermitian_residual();
        if residual > tol {
            return Err(NotHpdReason::NonHermitian { residual });
        }
        let n = m.nrows;
        let max_diag = (0..n).map(|i| m[(i, i)].re).fold(f64::NEG_INFINITY, f64::max);
        let threshold = tol * max_diag.max(0.0);
        let mut l = m.clone();
        for k0 in (0..n).step_by(BLOCK) {
            let k1 = (k0 + BLOCK).min(n);
            for j in k0..k1 {
                let d = l.data[j * n + j].re;
                if !(d > threshold) {
                    return Err(NotHpdReason::Pivot { index: j, value: d });
                }
                let ljj = d.sqrt();
                l.data[j * n + j] = C64::new(ljj, 0.0);
                for i in j + 1..n {
                    l.data[i * n + j] /= ljj;
                }
                for c in j + 1..k1 {
                    let lcj = l.data[c * n + j].conj();
                    if lcj == ZERO {
                        continue;
                    }
                    for i in c..n {
                        let lij = l.data[i * n + j];
                        l.data[i * n + c] -= lij * lcj;
                    }
                }
            }
            if k1 == n {
                break;
            }
            // A₂₂ ← A₂₂ − L₂₁·L₂₁ᴴ
            let kb = k1 - k0;
            let l21: Vec<C64> = (k1..n)
                .flat_map(|i| l.data[i * n + k0..i * n + k1].iter().copied())
                .collect();
            let l21h: Vec<C64> = (0..kb)
                .flat_map(|c| (0..n - k1).map(move |r| (r, c)))
                .map(|(r, c)| l21[r * kb + c].conj())
                .collect();
            gemm(
                (n - k1, kb, n - k1),
                -ONE,
                View::row_major(&l21, kb),
                View::row_major(&l21h, n - k1),
                ONE,
                &mut l.data[k1 * n + k1..],
                n,
            );
        }
        for i in 0..n {
            for j in i + 1..n {
                l.data[i * n + j] = ZERO;
            }
        }
        Ok(Self { l })
    }

    pub fn lower(&self) -> &DenseMatrix {
        &self.l
    }

    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.l.nrows;
        for i in 0..n {
            let row = self.l.row(i);
            let mut acc = b[i];
            for k in 0..i {
                acc -= row[k] * b[k];
            }
            b[i] = acc / row[i].re;
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            for k in i + 1..n {
                acc -= self.l[(k, i)].conj() * b[k];
            }
            b[i] = acc / self.l[(i, i)].re;
        }
    }
}

/// HPD test by complex Cholesky.
pub fn cholesky_hpd_test(m: &DenseMatrix, tol: f64) -> HpdVerdict {
    match CholeskyFactor::factor(m, tol) {
        Ok(_) => HpdVerdict::Hpd,
        Err(reason) => HpdVerdict::NotHpd(reason),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScreenVerdict {
    /// All checked conditions hold. `det_checked` is false when the matrix
    /// exceeded the dense limit and the determinant test was skipped.
    Pass { det_checked: bool },
    /// Id (1-4) of the first violated necessary condition.
    Fail(u8),
}

/// Screens a Hermitian matrix against four necessary conditions for
/// positive definiteness: (1) positive diagonal, (2) `bᵢᵢ + bⱼⱼ > 2|Re bᵢⱼ|`,
/// (3) the largest-modulus entry lies on the diagonal, (4) `det > 0`.
pub fn quick_pd_screen(m: &DenseMatrix) -> ScreenVerdict {
    quick_pd_screen_with(m, DEFAULT_DENSE_LIMIT, None)
}

/// [`quick_pd_screen`] with an explicit dense limit and optionally a
/// precomputed LU of `m` for the determinant condition.
pub fn quick_pd_screen_with(
    m: &DenseMatrix,
    dense_limit: usize,
    lu: Option<&LuFactors>,
) -> ScreenVerdict {
    assert!(m.is_square());
    let n = m.nrows;
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    if diag.iter().any(|&d| !(d > 0.0)) {
        return ScreenVerdict::Fail(1);
    }
    let mut max_off = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            let b = m[(i, j)];
            if !(diag[i] + diag[j] > 2.0 * b.re.abs()) {
                return ScreenVerdict::Fail(2);
            }
            max_off = max_off.max(b.norm());
        }
    }
    let max_diag = (0..n).map(|i| m[(i, i)].norm()).fold(0.0, f64::max);
    if max_off > max_diag {
        return ScreenVerdict::Fail(3);
    }
    if n * n > dense_limit {
        eprintln!("warning: determinant condition skipped, {n}x{n} exceeds the dense limit");
        return ScreenVerdict::Pass { det_checked: false };
    }
    let owned;
    let lu = match lu {
        Some(lu) => lu,
        None => match LuFactors::factor(m) {
            Ok(f) => {
                owned = f;
                &owned
            }
            Err(_) => return ScreenVerdict::Fail(4),
        },
    };
    let (_, phase) = lu.log_det();
    if phase.re > 0.0 {
        ScreenVerdict::Pass { det_checked: true }
    } else {
        ScreenVerdict::Fail(4)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralNormEstimate {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Largest singular value by power iteration on `MᴴM`.
pub fn spectral_norm(m: &DenseMatrix, tol: f64, max_iter: usize) -> SpectralNormEstimate {
    power_iteration(
        m.ncols,
        |x| m.matvec(x),
        |y| m.adjoint_matvec(y),
        tol,
        max_iter,
    )
}

/// Power iteration on `BᴴB` for an operator given by its action and the
/// action of its adjoint. The start vector is `1 + 10⁻³·i`; convergence is
/// declared when successive Rayleigh quotients agree to `tol` relatively.
pub fn power_iteration(
    n: usize,
    apply: impl Fn(&[C64]) -> Vec<C64>,
    apply_adjoint: impl Fn(&[C64]) -> Vec<C64>,
    tol: f64,
    max_iter: usize,
) -> SpectralNormEstimate {
    assert!(max_iter >= 1);
    let mut x: Vec<C64> = (0..n).map(|i| C64::new(1.0 + 1e-3 * i as f64, 0.0)).collect();
    let nx = norm2(&x);
    super::scale(C64::new(1.0 / nx, 0.0), &mut x);
    let mut prev = f64::NAN;
    for it in 1..=max_iter {
        let y = apply(&x);
        let rq = norm2(&y).powi(2);
        if rq == 0.0 {
            return SpectralNormEstimate {
                value: 0.0,
                converged: true,
                iterations: it,
            };
        }
        if (rq - prev).abs() < tol * rq {
            return SpectralNormEstimate {
                value: rq.sqrt(),
                converged: true,
                iterations: it,
            };
        }
        prev = rq;
        let mut z = apply_adjoint(&y);
        let nz = norm2(&z);
        if nz == 0.0 {
            break;
        }
        super::scale(C64::new(1.0 / nz, 0.0), &mut z);
        x = z;
    }
    SpectralNormEstimate {
        value: prev.sqrt(),
        converged: false,
        iterations: max_iter,
    }
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`, by Sturm-count bisection.
fn tridiagonal_max_eigenvalue(alpha: &[f64], beta: &[f64]) -> f64 {
    let n = alpha.len();
    let off = |i: usize| if i < beta.len() { beta[i].abs() } else { 0.0 };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let r = off(i) + if i > 0 { off(i - 1) } else { 0.0 };
        lo = lo.min(alpha[i] - r);
        hi = hi.max(alpha[i] + r);
    }
    // Number of eigenvalues strictly below x.
    let below = |x: f64| {
        let mut count = 0;
        let mut d = 1.0;
        for i in 0..n {
            let b2 = if i > 0 { beta[i - 1] * beta[i - 1] } else { 0.0 };
            d = alpha[i] - x - if i > 0 { b2 / d } else { 0.0 };
            if d == 0.0 {
                d = -f64::EPSILON * (x.abs() + 1.0);
            }
            if d < 0.0 {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if below(mid) < n {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Largest singular value by Lanczos on `BᴴB` with full
/// reorthogonalization. Same start vector and stopping rule as
/// [`power_iteration`], applied to the top Ritz value; `max_iter` caps the
/// Krylov dimension.
pub fn lanczos_norm(
    n: usize,
    apply: impl Fn(&[C64]) -> Vec<C64>,
    apply_adjoint: impl Fn(&[C64]) -> Vec<C64>,
    tol: f64,
    max_iter: usize,
) -> SpectralNormEstimate {
    assert!(max_iter >= 1);
    let steps = max_iter.min(n.max(1));
    let mut x: Vec<C64> = (0..n).map(|i| C64::new(1.0 + 1e-3 * i as f64, 0.0)).collect();
    let nx = norm2(&x);
    super::scale(C64::new(1.0 / nx, 0.0), &mut x);
    let mut basis = vec![x];
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    let mut prev = f64::NAN;
    for it in 1..=steps {
        let q = &basis[it - 1];
        let mut w = apply_adjoint(&apply(q));
        alpha.push(super::dot(q, &w).re);
        for _ in 0..2 {
            for v in &basis {
                let c = super::dot(v, &w);
                super::axpy(-c, v, &mut w);
            }
        }
        let theta = tridiagonal_max_eigenvalue(&alpha, &beta).max(0.0);
        let b = norm2(&w);
        // A vanishing β means the Krylov space is invariant and θ is exact.
        if (theta - prev).abs() < tol * theta || b <= 1e-14 * theta || theta == 0.0 {
            return SpectralNormEstimate {
                value: theta.sqrt(),
                converged: true,
                iterations: it,
            };
        }
        prev = theta;
        super::scale(C64::new(1.0 / b, 0.0), &mut w);
        beta.push(b);
        basis.push(w);
    }
    SpectralNormEstimate {
        value: prev.sqrt(),
        converged: steps == n,
        iterations: steps,
    }
}

/// `‖M‖₁·‖M⁻¹‖₁` with the inverse from dense LU.
pub fn condition_number_p1(m: &DenseMatrix) -> Result<f64> {
    check_square("condition number", m)?;
    let lu = LuFactors::factor(m)?;
    Ok(m.norm1() * lu.inverse().norm1())
}
