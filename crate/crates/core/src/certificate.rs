//! Dense two-grid analysis.
//!
//! With `Mν` the correction operator of ν Jacobi steps (`I − MνA = Sν`,
//! `S = I − X⁻¹A`, `X = ω·diag(A)`) and `Q = P·A_c⁻¹·R`, the two-grid error
//! propagator is `T₀ = (I − QA)·Sν = I − DA` with `D = Mν + Q − Q·A·Mν`.
//! Dropping the cross term gives `D̃ = Mν + Q`. The Hermitian matrices
//! `Γ = (DA)ᴴ + DA − (DA)ᴴ(DA)` and `Γ̃` (same with `D̃`) certify
//! `‖T₀‖₂ < 1` when positive definite.

use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::linalg::{
    cholesky_hpd_test, lanczos_norm, norm2, quick_pd_screen_with, CholeskyFactor, CsrMatrix,
    DenseMatrix, HpdVerdict, LuFactors, NotHpdReason, ScreenVerdict, C64, DEFAULT_DENSE_LIMIT,
    ONE, ZERO,
};
use crate::mg::{build_hierarchy_with, CoarsenOn, HierarchyOptions};
use crate::problem::{nodes_for_wavenumber, ProblemSpec, Shift, DEFAULT_KH};
use crate::smoothing::{JacobiWeights, DEFAULT_OMEGA};
use crate::transfer::{Scheme, TransferPair};

/// Cholesky pivot tolerance relative to the largest diagonal entry.
pub const HPD_TOL: f64 = 1e-12;
/// Relative Rayleigh-quotient tolerance for the norm estimates.
pub const NORM_TOL: f64 = 1e-13;
/// Krylov dimension cap of the Lanczos norm estimates.
pub const NORM_MAX_STEPS: usize = 600;
pub const LAMBDA_MIN_TOL: f64 = 1e-10;
pub const LAMBDA_MIN_MAX_ITER: usize = 10_000;

pub const TABLE_WAVENUMBERS: [f64; 4] = [5.0, 10.0, 20.0, 30.0];
pub const SWEEP_OMEGAS: [f64; 5] = [1.5, 2.0, 2.5, 4.5, 7.0];
pub const SWEEP_NUS: [usize; 2] = [1, 2];
/// Scheme / coarsening columns of the norm table, in output order.
pub const NORM_TABLE_COLUMNS: [(Scheme, CoarsenOn); 4] = [
    (Scheme::Linear, CoarsenOn::Original),
    (Scheme::Linear, CoarsenOn::Csl),
    (Scheme::Bezier, CoarsenOn::Original),
    (Scheme::Bezier, CoarsenOn::Csl),
];

/// How ν smoothing steps enter `D` and `D̃`; recorded in every report.
pub const NU_FOLDING: &str = "exact-composition";

/// A two-level configuration small enough to be analysed densely.
#[derive(Debug, Clone)]
pub struct TwoGridConfig {
    /// Fine operator `A`.
    pub a: CsrMatrix,
    /// Operator the coarse matrix is built from (`A` or the shifted `C`).
    pub coarse_source: CsrMatrix,
    pub pair: TransferPair,
    pub omega: f64,
    pub nu: usize,
    pub dense_limit: usize,
    pub k: f64,
    pub coarsen_on: CoarsenOn,
    pub shift: Shift,
}

impl TwoGridConfig {
    /// Two-level configuration for a constant wavenumber on the default
    /// `kh = 0.625` grid.
    pub fn for_wavenumber(k: f64, scheme: Scheme, coarsen_on: CoarsenOn) -> Result<Self> {
        let spec = ProblemSpec::constant(k).with_nodes(nodes_for_wavenumber(k, DEFAULT_KH));
        Self::from_problem(&spec, scheme, coarsen_on)
    }

    pub fn from_problem(spec: &ProblemSpec, scheme: Scheme, coarsen_on: CoarsenOn) -> Result<Self> {
        let n2 = spec.unknowns();
        if n2.saturating_mul(n2) > DEFAULT_DENSE_LIMIT {
            return Err(Error::DenseLimit {
                entries: n2.saturating_mul(n2),
                limit: DEFAULT_DENSE_LIMIT,
            });
        }
        let opts = HierarchyOptions {
            coarsest_below: 3,
            max_levels: 2,
            ..HierarchyOptions::new(scheme, coarsen_on)
        };
        let h = build_hierarchy_with(spec, &opts)?;
        let pair = h.levels()[0]
            .pair
            .clone()
            .ok_or_else(|| Error::InvalidConfig("grid too small for a coarse level".into()))?;
        let field = crate::problem::build_wavenumber_field(spec)?;
        let coarse_source = match coarsen_on {
            CoarsenOn::Csl => crate::problem::assemble_helmholtz(spec, &field, true)?,
            CoarsenOn::Original => h.fine_operator().clone(),
        };
        Ok(Self {
            a: h.fine_operator().clone(),
            coarse_source,
            pair,
            omega: DEFAULT_OMEGA,
            nu: 1,
            dense_limit: DEFAULT_DENSE_LIMIT,
            k: spec.wavenumber.k_max(),
            coarsen_on,
            shift: spec.shift,
        })
    }

    pub fn with_smoothing(mut self, omega: f64, nu: usize) -> Self {
        self.omega = omega;
        self.nu = nu;
        self
    }

    pub fn unknowns(&self) -> usize {
        self.a.nrows()
    }

    pub fn nodes_per_dim(&self) -> usize {
        self.pair.n_fine
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.a.nrows();
        if self.a.ncols() != n {
            return Err(Error::NotSquare {
                op: "two-grid config",
                nrows: n,
                ncols: self.a.ncols(),
            });
        }
        for (found, op) in [
            (self.coarse_source.nrows(), "coarse source operator"),
            (self.pair.p.nrows(), "prolongation rows"),
            (self.pair.r.ncols(), "restriction columns"),
        ] {
            if found != n {
                return Err(Error::DimensionMismatch {
                    op,
                    expected: n,
                    found,
                });
            }
        }
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::InvalidConfig(format!("omega must be positive, got {}", self.omega)));
        }
        let entries = n.saturating_mul(n);
        if entries > self.dense_limit {
            return Err(Error::DenseLimit {
                entries,
                limit: self.dense_limit,
            });
        }
        Ok(())
    }
}

/// `Mν` with `I − Mν·A = (I − X⁻¹A)^ν`, built through
/// `M₁ = X⁻¹`, `M_{j+1} = X⁻¹ + S·M_j`. Sparse for small ν.
pub fn smoother_correction(a: &CsrMatrix, omega: f64, nu: usize) -> Result<CsrMatrix> {
    let n = a.nrows();
    if nu == 0 {
        return Ok(CsrMatrix::zeros(n, n));
    }
    let xinv = CsrMatrix::from_diagonal(JacobiWeights::new(a, omega)?.as_slice());
    let s = CsrMatrix::identity(n).add_scaled(-ONE, &xinv.matmul(a)?)?;
    let mut m = xinv.clone();
    for _ in 1..nu {
        m = xinv.add_scaled(ONE, &s.matmul(&m)?)?;
    }
    Ok(m)
}

/// Shared pieces of every two-grid matrix for one configuration.
struct Parts {
    ac_inv: DenseMatrix,
    /// `Q = P·A_c⁻¹·R`.
    q: DenseMatrix,
}

fn coarse_parts(cfg: &TwoGridConfig) -> Result<Parts> {
    cfg.validate()?;
    let ac = crate::transfer::galerkin_coarse(&cfg.coarse_source, &cfg.pair)?;
    let ac_inv = LuFactors::factor(&ac.to_dense())?.inverse();
    let w = ac_inv.mul_sparse(&cfg.pair.r);
    let q = DenseMatrix::sparse_mul(&cfg.pair.p, &w);
    Ok(Parts { ac_inv, q })
}

/// `Q·A` as a dense matrix.
fn qa(parts: &Parts, a: &CsrMatrix) -> DenseMatrix {
    parts.q.mul_sparse(a)
}

fn dense_plus_sparse(mut d: DenseMatrix, alpha: C64, s: &CsrMatrix) -> DenseMatrix {
    for (i, j, v) in s.iter() {
        d[(i, j)] += alpha * v;
    }
    d
}

/// `Bᴴ + B − BᴴB`.
fn gamma_from_product(b: &DenseMatrix) -> DenseMatrix {
    let mut g = b.gram();
    g.scale(-ONE);
    let n = b.nrows();
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] += b[(i, j)] + b[(j, i)].conj();
        }
    }
    g
}

/// Explicit `T₀ = (I − P·A_c⁻¹·R·A)·(I − X⁻¹A)^ν`.
pub fn assemble_t0(cfg: &TwoGridConfig) -> Result<DenseMatrix> {
    let parts = coarse_parts(cfg)?;
    let m = smoother_correction(&cfg.a, cfg.omega, cfg.nu)?;
    t0_from(&parts, cfg, &m)
}

fn t0_from(parts: &Parts, cfg: &TwoGridConfig, m: &CsrMatrix) -> Result<DenseMatrix> {
    let n = cfg.unknowns();
    let mut cgc = qa(parts, &cfg.a);
    cgc.scale(-ONE);
    cgc.add_identity(ONE);
    let s_nu = CsrMatrix::identity(n).add_scaled(-ONE, &m.matmul(&cfg.a)?)?;
    Ok(cgc.mul_sparse(&s_nu))
}

/// `D = Mν + Q − Q·A·Mν`.
pub fn assemble_d(cfg: &TwoGridConfig) -> Result<DenseMatrix> {
    let parts = coarse_parts(cfg)?;
    let m = smoother_correction(&cfg.a, cfg.omega, cfg.nu)?;
    d_from(&parts, cfg, &m)
}

fn d_from(parts: &Parts, cfg: &TwoGridConfig, m: &CsrMatrix) -> Result<DenseMatrix> {
    let am = cfg.a.matmul(m)?;
    let mut d = parts.q.mul_sparse(&am);
    d.scale(-ONE);
    d.add_assign_scaled(ONE, &parts.q);
    Ok(dense_plus_sparse(d, ONE, m))
}

/// `D̃ = Mν + Q`.
pub fn assemble_d_tilde(cfg: &TwoGridConfig) -> Result<DenseMatrix> {
    let parts = coarse_parts(cfg)?;
    let m = smoother_correction(&cfg.a, cfg.omega, cfg.nu)?;
    Ok(dense_plus_sparse(parts.q.clone(), ONE, &m))
}

/// `Γ` (or `Γ̃` when `simplified`).
pub fn assemble_gamma(cfg: &TwoGridConfig, simplified: bool) -> Result<DenseMatrix> {
    let d = if simplified {
        assemble_d_tilde(cfg)?
    } else {
        assemble_d(cfg)?
    };
    Ok(gamma_from_product(&d.mul_sparse(&cfg.a)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub k: f64,
    pub nodes_per_dim: usize,
    pub scheme: Scheme,
    pub coarsen_on: CoarsenOn,
    pub shift: Shift,
    pub omega: f64,
    pub nu: usize,
    pub hermiticity_residual_gamma: f64,
    pub hermiticity_residual_gamma_tilde: f64,
    pub hpd_gamma: HpdVerdict,
    pub hpd_gamma_tilde: HpdVerdict,
    /// Necessary-condition screen applied to `Γ̃`.
    pub quick_screen: ScreenVerdict,
    pub spectral_norm_t0: NormEstimate,
    pub sigma_max_da: NormEstimate,
    /// Smallest eigenvalue of `Γ`, only computed when `Γ` is HPD.
    pub lambda_min_gamma: Option<NormEstimate>,
    /// `‖Γ̃‖₁ / κ₁(Γ̃)`; `None` when `Γ̃` is singular.
    pub ratio_table_value: Option<f64>,
    /// `√|1 − ratio|`.
    pub bound_value: Option<f64>,
    /// `‖(I − DA) − T₀‖_F / ‖T₀‖_F`.
    pub lemma_residual: f64,
}

pub const REPORT_CSV_HEADER: &str = "k,n,scheme,coarsen_on,shift,omega,nu,herm_res_gamma,\
herm_res_gamma_tilde,hpd_gamma,hpd_gamma_tilde,quick_screen,norm_t0,norm_t0_converged,\
sigma_max_da,lambda_min_gamma,ratio,bound,lemma_residual,theory_consistent,nu_folding";

fn verdict_str(v: &HpdVerdict) -> &'static str {
    if v.is_hpd() {
        "hpd"
    } else {
        "not-hpd"
    }
}

fn screen_str(v: &ScreenVerdict) -> String {
    match v {
        ScreenVerdict::Pass { det_checked: true } => "pass".into(),
        ScreenVerdict::Pass { det_checked: false } => "pass-nodet".into(),
        ScreenVerdict::Fail(c) => format!("fail{c}"),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6e}")).unwrap_or_default()
}

impl CertificateReport {
    /// `Γ̃` HPD must imply `Γ` HPD.
    pub fn theory_consistent(&self) -> bool {
        !self.hpd_gamma_tilde.is_hpd() || self.hpd_gamma.is_hpd()
    }

    /// Violated consequences of `Γ` being HPD, as human-readable strings.
    pub fn invariant_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.theory_consistent() {
            out.push("gamma-tilde is HPD but gamma is not".into());
        }
        if !self.hpd_gamma.is_hpd() {
            return out;
        }
        let t0 = self.spectral_norm_t0.value;
        if !(t0 < 1.0) {
            out.push(format!("gamma HPD but ||T0||_2 = {t0}"));
        }
        if let Some(l) = self.lambda_min_gamma {
            let bound = (1.0 - l.value).abs().sqrt();
            if t0 > bound + 1e-8 {
                out.push(format!("||T0||_2 = {t0} exceeds sqrt|1 - lambda_min| = {bound}"));
            }
        }
        if !(self.sigma_max_da.value < 2.0 + 1e-8) {
            out.push(format!("gamma HPD but sigma_max(DA) = {}", self.sigma_max_da.value));
        }
        out
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{:.3e},{:.3e},{},{},{},{:.6},{},{:.6},{},{},{},{:.3e},{},{}",
            self.k,
            self.nodes_per_dim,
            self.scheme,
            self.coarsen_on,
            self.shift,
            self.omega,
            self.nu,
            self.hermiticity_residual_gamma,
            self.hermiticity_residual_gamma_tilde,
            verdict_str(&self.hpd_gamma),
            verdict_str(&self.hpd_gamma_tilde),
            screen_str(&self.quick_screen),
            self.spectral_norm_t0.value,
            self.spectral_norm_t0.converged,
            self.sigma_max_da.value,
            opt(self.lambda_min_gamma.map(|l| l.value)),
            opt(self.ratio_table_value),
            opt(self.bound_value),
            self.lemma_residual,
            self.theory_consistent(),
            NU_FOLDING,
        )
    }
}

impl fmt::Display for CertificateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |v: &HpdVerdict| match v {
            HpdVerdict::Hpd => "HPD".to_string(),
            HpdVerdict::NotHpd(NotHpdReason::Pivot { index, value }) => {
                format!("not HPD (pivot {index} = {value:.3e})")
            }
            HpdVerdict::NotHpd(NotHpdReason::NonHermitian { residual }) => {
                format!("not HPD (hermiticity residual {residual:.3e})")
            }
            HpdVerdict::NotHpd(NotHpdReason::NotSquare) => "not HPD (not square)".into(),
        };
        writeln!(
            f,
            "two-grid certificate: k = {}, {}x{} nodes, {} transfer, coarse operator from {}",
            self.k, self.nodes_per_dim, self.nodes_per_dim, self.scheme, self.coarsen_on
        )?;
        writeln!(f, "  shift {}, jacobi omega = {}, nu = {}", self.shift, self.omega, self.nu)?;
        if self.nu == 0 {
            writeln!(f, "  note: nu = 0, D-tilde reduces to the coarse correction alone")?;
        }
        writeln!(f, "  Gamma        : {}", mark(&self.hpd_gamma))?;
        writeln!(f, "  Gamma-tilde  : {}", mark(&self.hpd_gamma_tilde))?;
        writeln!(f, "  screen(G~)   : {}", screen_str(&self.quick_screen))?;
        writeln!(
            f,
            "  ||T0||_2     : {:.6}{}",
            self.spectral_norm_t0.value,
            if self.spectral_norm_t0.converged { "" } else { " (not converged)" }
        )?;
        writeln!(f, "  sigma_max(DA): {:.6}", self.sigma_max_da.value)?;
        if let Some(l) = self.lambda_min_gamma {
            writeln!(f, "  lambda_min(G): {:.6e}", l.value)?;
        }
        if let (Some(r), Some(b)) = (self.ratio_table_value, self.bound_value) {
            writeln!(f, "  ||G~||_1/k_1 : {r:.6e}  (bound sqrt|1 - ratio| = {b:.6})")?;
        }
        writeln!(
            f,
            "  hermiticity  : {:.2e} (Gamma), {:.2e} (Gamma-tilde)",
            self.hermiticity_residual_gamma, self.hermiticity_residual_gamma_tilde
        )?;
        writeln!(f, "  I - DA vs T0 : {:.2e}", self.lemma_residual)?;
        writeln!(f, "  nu folding   : {NU_FOLDING}")?;
        let v = self.invariant_violations();
        if v.is_empty() {
            write!(f, "  theory checks: ok")
        } else {
            write!(f, "  theory checks: VIOLATED: {}", v.join("; "))
        }
    }
}

/// `‖M‖₁ / κ₁(M) = 1 / ‖M⁻¹‖₁` from an LU of `M`.
fn ratio_from_lu(lu: &LuFactors) -> f64 {
    1.0 / lu.inverse().norm1()
}

/// Matrix-free `T₀` and `T₀ᴴ` through the sparse factors.
struct FactoredT0<'a> {
    a: &'a CsrMatrix,
    a_h: CsrMatrix,
    s_nu: CsrMatrix,
    s_nu_h: CsrMatrix,
    p_h: CsrMatrix,
    pair: &'a TransferPair,
    ac_inv: &'a DenseMatrix,
}

impl<'a> FactoredT0<'a> {
    fn new(cfg: &'a TwoGridConfig, parts: &'a Parts, m: &CsrMatrix) -> Result<Self> {
        let n = cfg.unknowns();
        let s_nu = CsrMatrix::identity(n).add_scaled(-ONE, &m.matmul(&cfg.a)?)?;
        Ok(Self {
            a: &cfg.a,
            a_h: cfg.a.adjoint(),
            s_nu_h: s_nu.adjoint(),
            s_nu,
            p_h: cfg.pair.p.adjoint(),
            pair: &cfg.pair,
            ac_inv: &parts.ac_inv,
        })
    }

    fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; x.len()];
        self.s_nu.mul_vec_into(x, &mut y);
        let mut ay = vec![ZERO; x.len()];
        self.a.mul_vec_into(&y, &mut ay);
        let mut rc = vec![ZERO; self.pair.r.nrows()];
        self.pair.r.mul_vec_into(&ay, &mut rc);
        let ec = self.ac_inv.matvec(&rc);
        let mut corr = vec![ZERO; x.len()];
        self.pair.p.mul_vec_into(&ec, &mut corr);
        y.iter_mut().zip(&corr).for_each(|(a, c)| *a -= c);
        y
    }

    fn apply_adjoint(&self, z: &[C64]) -> Vec<C64> {
        let mut pc = vec![ZERO; self.p_h.nrows()];
        self.p_h.mul_vec_into(z, &mut pc);
        let ec = self.ac_inv.adjoint_matvec(&pc);
        let rh = self.pair.r.adjoint();
        let mut w = vec![ZERO; z.len()];
        rh.mul_vec_into(&ec, &mut w);
        let mut aw = vec![ZERO; z.len()];
        self.a_h.mul_vec_into(&w, &mut aw);
        let v: Vec<C64> = z.iter().zip(&aw).map(|(a, b)| a - b).collect();
        let mut out = vec![ZERO; z.len()];
        self.s_nu_h.mul_vec_into(&v, &mut out);
        out
    }
}

fn to_estimate(e: crate::linalg::SpectralNormEstimate) -> NormEstimate {
    NormEstimate {
        value: e.value,
        converged: e.converged,
        iterations: e.iterations,
    }
}

/// Smallest eigenvalue of an HPD matrix by inverse power iteration.
pub fn lambda_min_hpd(m: &DenseMatrix, chol: &CholeskyFactor, tol: f64, max_iter: usize) -> NormEstimate {
    let n = m.nrows();
    let mut x: Vec<C64> = (0..n).map(|i| C64::new(1.0 + 1e-3 * i as f64, 0.0)).collect();
    let mut prev = f64::NAN;
    for it in 1..=max_iter {
        let nx = norm2(&x);
        x.iter_mut().for_each(|v| *v /= nx);
        let mx = m.matvec(&x);
        let rq = crate::linalg::dot(&x, &mx).re;
        if (rq - prev).abs() < tol * rq.abs() {
            return NormEstimate {
                value: rq,
                converged: true,
                iterations: it,
            };
        }
        prev = rq;
        chol.solve_in_place(&mut x);
    }
    NormEstimate {
        value: prev,
        converged: false,
        iterations: max_iter,
    }
}

/// Runs every check on one configuration.
pub fn certify(cfg: &TwoGridConfig) -> Result<CertificateReport> {
    let parts = coarse_parts(cfg)?;
    let m = smoother_correction(&cfg.a, cfg.omega, cfg.nu)?;

    // Γ̃ and its 1-norm ratio.
    let (herm_gt, hpd_gt, screen, ratio) = {
        let dt = dense_plus_sparse(parts.q.clone(), ONE, &m);
        let gt = gamma_from_product(&dt.mul_sparse(&cfg.a));
        drop(dt);
        let herm = gt.hermitian_residual();
        let hpd = cholesky_hpd_test(&gt, HPD_TOL);
        let lu = LuFactors::factor(&gt).ok();
        let screen = quick_pd_screen_with(&gt, cfg.dense_limit, lu.as_ref());
        (herm, hpd, screen, lu.as_ref().map(ratio_from_lu))
    };

    // Γ, the Lemma check and λ_min.
    let (herm_g, hpd_g, lemma, lambda_min) = {
        let d = d_from(&parts, cfg, &m)?;
        let da = d.mul_sparse(&cfg.a);
        drop(d);
        let t0 = t0_from(&parts, cfg, &m)?;
        let mut e = da.clone();
        e.scale(-ONE);
        e.add_identity(ONE);
        let lemma = e.relative_distance(&t0);
        drop((e, t0));
        let g = gamma_from_product(&da);
        drop(da);
        let herm = g.hermitian_residual();
        let (hpd, lmin) = match CholeskyFactor::factor(&g, HPD_TOL) {
            Ok(chol) => (
                HpdVerdict::Hpd,
                Some(lambda_min_hpd(&g, &chol, LAMBDA_MIN_TOL, LAMBDA_MIN_MAX_ITER)),
            ),
            Err(reason) => (HpdVerdict::NotHpd(reason), None),
        };
        (herm, hpd, lemma, lmin)
    };

    let op = FactoredT0::new(cfg, &parts, &m)?;
    let n = cfg.unknowns();
    let t0 = lanczos_norm(n, |x| op.apply(x), |y| op.apply_adjoint(y), NORM_TOL, NORM_MAX_STEPS);
    let sub = |x: &[C64], y: Vec<C64>| -> Vec<C64> { x.iter().zip(&y).map(|(a, b)| a - b).collect() };
    let da = lanczos_norm(
        n,
        |x| sub(x, op.apply(x)),
        |y| sub(y, op.apply_adjoint(y)),
        NORM_TOL,
        NORM_MAX_STEPS,
    );

    Ok(CertificateReport {
        k: cfg.k,
        nodes_per_dim: cfg.nodes_per_dim(),
        scheme: cfg.pair.scheme,
        coarsen_on: cfg.coarsen_on,
        shift: cfg.shift,
        omega: cfg.omega,
        nu: cfg.nu,
        hermiticity_residual_gamma: herm_g,
        hermiticity_residual_gamma_tilde: herm_gt,
        hpd_gamma: hpd_g,
        hpd_gamma_tilde: hpd_gt,
        quick_screen: screen,
        spectral_norm_t0: to_estimate(t0),
        sigma_max_da: to_estimate(da),
        lambda_min_gamma: lambda_min,
        ratio_table_value: ratio,
        bound_value: ratio.map(|r| (1.0 - r).abs().sqrt()),
        lemma_residual: lemma,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub omega: f64,
    pub nu: usize,
    /// `‖Γ̃‖₁ / κ₁(Γ̃)`; `None` when `Γ̃` is singular.
    pub ratio: Option<f64>,
    /// Set for ν = 0, where `D̃` carries no smoother.
    pub degenerate: bool,
}

/// `‖Γ̃‖₁/κ₁(Γ̃)` over an `(ω, ν)` grid; the coarse part is shared.
pub fn omega_sweep(template: &TwoGridConfig, omegas: &[f64], nus: &[usize]) -> Result<Vec<SweepCell>> {
    let parts = coarse_parts(template)?;
    let mut out = Vec::with_capacity(omegas.len() * nus.len());
    for &omega in omegas {
        for &nu in nus {
            let m = smoother_correction(&template.a, omega, nu)?;
            let dt = dense_plus_sparse(parts.q.clone(), ONE, &m);
            let gt = gamma_from_product(&dt.mul_sparse(&template.a));
            drop(dt);
            let ratio = LuFactors::factor(&gt).ok().as_ref().map(ratio_from_lu);
            out.push(SweepCell {
                omega,
                nu,
                ratio,
                degenerate: nu == 0,
            });
        }
    }
    Ok(out)
}

/// Norm/verdict grid: one row per wavenumber, one report per column of
/// [`NORM_TABLE_COLUMNS`].
pub fn norm_table(ks: &[f64], omega: f64) -> Result<Vec<(f64, Vec<CertificateReport>)>> {
    ks.iter()
        .map(|&k| {
            let row = NORM_TABLE_COLUMNS
                .iter()
                .map(|&(scheme, on)| {
                    certify(&TwoGridConfig::for_wavenumber(k, scheme, on)?.with_smoothing(omega, 1))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((k, row))
        })
        .collect()
}

pub fn write_norm_table_csv<W: Write>(rows: &[(f64, Vec<CertificateReport>)], mut out: W) -> Result<()> {
    let cols: Vec<String> = NORM_TABLE_COLUMNS
        .iter()
        .map(|(s, c)| format!("{s}/{c}_gamma_tilde,{s}/{c}_norm_t0"))
        .collect();
    writeln!(out, "k,{}", cols.join(","))?;
    for (k, reports) in rows {
        let cells: Vec<String> = reports
            .iter()
            .map(|r| format!("{},{:.4}", verdict_str(&r.hpd_gamma_tilde), r.spectral_norm_t0.value))
            .collect();
        writeln!(out, "{k},{}", cells.join(","))?;
    }
    Ok(())
}

/// Ratio grid for Bézier transfer with shifted coarsening: one row per
/// wavenumber, columns ordered by ω then ν.
pub fn ratio_table(ks: &[f64], omegas: &[f64], nus: &[usize]) -> Result<Vec<(f64, Vec<SweepCell>)>> {
    ks.iter()
        .map(|&k| {
            let cfg = TwoGridConfig::for_wavenumber(k, Scheme::Bezier, CoarsenOn::Csl)?;
            Ok((k, omega_sweep(&cfg, omegas, nus)?))
        })
        .collect()
}

pub fn write_ratio_table_csv<W: Write>(rows: &[(f64, Vec<SweepCell>)], mut out: W) -> Result<()> {
    let Some((_, first)) = rows.first() else {
        return Ok(());
    };
    let cols: Vec<String> = first.iter().map(|c| format!("omega{}_nu{}", c.omega, c.nu)).collect();
    writeln!(out, "k,{}", cols.join(","))?;
    for (k, cells) in rows {
        let vals: Vec<String> = cells.iter().map(|c| opt(c.ratio)).collect();
        writeln!(out, "{k},{}", vals.join(","))?;
    }
    Ok(())
}
