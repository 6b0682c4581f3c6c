//! ω-Jacobi and GMRES(m) smoothers.
//!
//! Jacobi follows the inverse-damping convention `X = ω·Λ_A`: one sweep is
//! `u ← u + ω⁻¹ Λ_A⁻¹ (b − A u)`, so `ω = 4.5` damps by roughly 0.22.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm2, CsrMatrix, C64, ZERO};

pub const DEFAULT_OMEGA: f64 = 4.5;
pub const DEFAULT_GMRES_RESTART: usize = 3;

const BREAKDOWN: f64 = 1e-14;
const REORTH_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmootherKind {
    Jacobi { omega: f64 },
    Gmres { m: usize },
}

impl fmt::Display for SmootherKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmootherKind::Jacobi { .. } => f.write_str("jacobi"),
            SmootherKind::Gmres { m } => write!(f, "gmres{m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmootherConfig {
    pub kind: SmootherKind,
    /// Post-smoothing steps per visit.
    pub nu: usize,
    pub nu_pre: usize,
}

impl SmootherConfig {
    pub fn jacobi(omega: f64, nu: usize) -> Self {
        Self {
            kind: SmootherKind::Jacobi { omega },
            nu,
            nu_pre: 0,
        }
    }

    pub fn gmres(m: usize, nu: usize) -> Self {
        Self {
            kind: SmootherKind::Gmres { m },
            nu,
            nu_pre: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            SmootherKind::Jacobi { omega } if !(omega > 0.0) || !omega.is_finite() => Err(
                Error::InvalidConfig(format!("jacobi omega must be positive, got {omega}")),
            ),
            SmootherKind::Gmres { m: 0 } => {
                Err(Error::InvalidConfig("gmres restart length must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Precomputed `ω⁻¹ Λ_A⁻¹`.
#[derive(Debug, Clone)]
pub struct JacobiWeights(Vec<C64>);

impl JacobiWeights {
    pub fn new(a: &CsrMatrix, omega: f64) -> Result<Self> {
        let d = a.diagonal();
        let mut w = Vec::with_capacity(d.len());
        for (row, v) in d.into_iter().enumerate() {
            if v.norm() <= 1e-300 {
                return Err(Error::ZeroDiagonal { row });
            }
            w.push(1.0 / (v * omega));
        }
        Ok(Self(w))
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }
}

/// One sweep in place; `r` is scratch of length `n`.
pub fn jacobi_sweep_in_place(
    a: &CsrMatrix,
    w: &JacobiWeights,
    u: &mut [C64],
    b: &[C64],
    r: &mut [C64],
) {
    a.residual_into(u, b, r);
    for ((ui, ri), wi) in u.iter_mut().zip(r.iter()).zip(&w.0) {
        *ui += wi * ri;
    }
}

pub fn jacobi_sweep(a: &CsrMatrix, u: &[C64], b: &[C64], omega: f64) -> Result<Vec<C64>> {
    check_dims("jacobi_sweep", a, u, b)?;
    let w = JacobiWeights::new(a, omega)?;
    let mut out = u.to_vec();
    let mut r = vec![ZERO; u.len()];
    jacobi_sweep_in_place(a, &w, &mut out, b, &mut r);
    Ok(out)
}

fn check_dims(op: &'static str, a: &CsrMatrix, u: &[C64], b: &[C64]) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            op,
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    for len in [u.len(), b.len()] {
        if len != a.nrows() {
            return Err(Error::DimensionMismatch {
                op,
                expected: a.nrows(),
                found: len,
            });
        }
    }
    Ok(())
}

/// Reusable Arnoldi storage for [`gmres_smooth_in_place`].
#[derive(Debug, Clone)]
pub struct GmresWorkspace {
    basis: Vec<Vec<C64>>,
    w: Vec<C64>,
}

impl GmresWorkspace {
    pub fn new(n: usize, m: usize) -> Self {
        Self {
            basis: vec![vec![ZERO; n]; m + 1],
            w: vec![ZERO; n],
        }
    }
}

/// Complex Givens rotation zeroing `b` in `(a, b)`.
fn givens(a: C64, b: C64) -> (f64, C64, C64) {
    let (na, nb) = (a.norm(), b.norm());
    if nb == 0.0 {
        return (1.0, ZERO, a);
    }
    if na == 0.0 {
        return (0.0, (b.conj() / nb), C64::new(nb, 0.0));
    }
    let t = na.hypot(nb);
    let c = na / t;
    let phase = a / na;
    let s = phase * b.conj() / t;
    (c, s, phase * t)
}

/// `m` GMRES steps on `A c = b − A u` from `c = 0`, then `u ← u + c`.
pub fn gmres_smooth_in_place(a: &CsrMatrix, u: &mut [C64], b: &[C64], m: usize, ws: &mut GmresWorkspace) {
    let n = u.len();
    if ws.basis.len() < m + 1 || ws.w.len() != n {
        *ws = GmresWorkspace::new(n, m);
    }
    a.residual_into(u, b, &mut ws.basis[0]);
    let beta = norm2(&ws.basis[0]);
    if beta == 0.0 {
        return;
    }
    for v in ws.basis[0].iter_mut() {
        *v /= beta;
    }
    // Hessenberg columns after rotation; h[j] has j + 2 entries.
    let mut h: Vec<Vec<C64>> = Vec::with_capacity(m);
    let mut rot: Vec<(f64, C64)> = Vec::with_capacity(m);
    let mut g = vec![ZERO; m + 1];
    g[0] = C64::new(beta, 0.0);
    let mut steps = 0;
    for j in 0..m {
        a.mul_vec_into(&ws.basis[j], &mut ws.w);
        let mut col = vec![ZERO; j + 2];
        for (i, ci) in col.iter_mut().enumerate().take(j + 1) {
            let hij = dot(&ws.basis[i], &ws.w);
            axpy(-hij, &ws.basis[i], &mut ws.w);
            *ci = hij;
        }
        let mut after = norm2(&ws.w);
        let loss = (0..=j)
            .map(|i| dot(&ws.basis[i], &ws.w).norm())
            .fold(0.0, f64::max);
        if loss > REORTH_THRESHOLD * after {
            for (i, ci) in col.iter_mut().enumerate().take(j + 1) {
                let corr = dot(&ws.basis[i], &ws.w);
                axpy(-corr, &ws.basis[i], &mut ws.w);
                *ci += corr;
            }
            after = norm2(&ws.w);
        }
        col[j + 1] = C64::new(after, 0.0);
        for (i, &(c, s)) in rot.iter().enumerate() {
            let (x, y) = (col[i], col[i + 1]);
            col[i] = c * x + s * y;
            col[i + 1] = -s.conj() * x + c * y;
        }
        let (c, s, rr) = givens(col[j], col[j + 1]);
        col[j] = rr;
        col[j + 1] = ZERO;
        g[j + 1] = -s.conj() * g[j];
        g[j] *= c;
        rot.push((c, s));
        h.push(col);
        steps = j + 1;
        if after < BREAKDOWN * beta {
            break;
        }
        for (nv, wv) in ws.basis[j + 1].iter_mut().zip(&ws.w) {
            *nv = wv / after;
        }
    }
    // Back substitution for the triangular least-squares system.
    let mut y = vec![ZERO; steps];
    for i in (0..steps).rev() {
        let mut s = g[i];
        for k in i + 1..steps {
            s -= h[k][i] * y[k];
        }
        y[i] = s / h[i][i];
    }
    for (k, yk) in y.iter().enumerate() {
        axpy(*yk, &ws.basis[k], u);
    }
}

pub fn gmres_smooth(a: &CsrMatrix, u: &[C64], b: &[C64], m: usize) -> Result<Vec<C64>> {
    check_dims("gmres_smooth", a, u, b)?;
    if m == 0 {
        return Err(Error::InvalidConfig("gmres restart length must be at least 1".into()));
    }
    let mut out = u.to_vec();
    let mut ws = GmresWorkspace::new(u.len(), m);
    gmres_smooth_in_place(a, &mut out, b, m, &mut ws);
    Ok(out)
}
