//! Thin safe wrapper over the `matrixmultiply` complex kernel.

use super::C64;

/// Strided view into a slice: element `(i, j)` lives at `i·rs + j·cs`.
#[derive(Clone, Copy)]
pub(crate) struct View<'a> {
    pub data: &'a [C64],
    pub rs: usize,
    pub cs: usize,
}

impl<'a> View<'a> {
    pub fn row_major(data: &'a [C64], ncols: usize) -> Self {
        Self { data, rs: ncols, cs: 1 }
    }

    fn check(&self, nrows: usize, ncols: usize) {
        if nrows > 0 && ncols > 0 {
            assert!((nrows - 1) * self.rs + (ncols - 1) * self.cs < self.data.len());
        }
    }
}

/// `C ← α·A·B + β·C` with `A: m×k`, `B: k×n` and row-major `C` of row
/// stride `ldc`.
pub(crate) fn gemm(
    (m, k, n): (usize, usize, usize),
    alpha: C64,
    a: View<'_>,
    b: View<'_>,
    beta: C64,
    c: &mut [C64],
    ldc: usize,
) {
    if m == 0 || n == 0 {
        return;
    }
    if k == 0 {
        for i in 0..m {
            c[i * ldc..i * ldc + n].iter_mut().for_each(|x| *x *= beta);
        }
        return;
    }
    a.check(m, k);
    b.check(k, n);
    assert!(ldc >= n && (m - 1) * ldc + n <= c.len());
    // SAFETY: `Complex<f64>` is `repr(C)` with fields `re, im`, so it has the
    // layout of `[f64; 2]`. All accessed offsets were bounds-checked above and
    // `c` is uniquely borrowed, so it cannot alias `a` or `b`.
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [alpha.re, alpha.im],
            a.data.as_ptr() as *const [f64; 2],
            a.rs as isize,
            a.cs as isize,
            b.data.as_ptr() as *const [f64; 2],
            b.rs as isize,
            b.cs as isize,
            [beta.re, beta.im],
            c.as_mut_ptr() as *mut [f64; 2],
            ldc as isize,
            1,
        );
    }
}
