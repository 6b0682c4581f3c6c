//! Multigrid hierarchy and V-/W-cycle stationary iteration.
//!
//! Level 0 always smooths and computes residuals with the unshifted operator
//! `A`. The Galerkin chain that produces the coarse operators starts from
//! either the shifted operator `C` or from `A` itself.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{norm2, CsrMatrix, LuFactors, C64, ZERO};
use crate::problem::{assemble_helmholtz, build_wavenumber_field, ProblemSpec};
use crate::smoothing::{
    gmres_smooth_in_place, jacobi_sweep_in_place, GmresWorkspace, JacobiWeights, SmootherConfig,
    SmootherKind,
};
use crate::transfer::{build_transfer_2d, coarse_size, galerkin_coarse, Scheme, TransferPair};

/// Coarsening stops once a level has fewer nodes per dimension than this.
pub const COARSEST_BELOW: usize = 10;
pub const DEFAULT_TOL: f64 = 1e-5;
pub const DEFAULT_MAX_CYCLES: usize = 1000;
pub const DIVERGENCE_THRESHOLD: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoarsenOn {
    Csl,
    Original,
}

impl fmt::Display for CoarsenOn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoarsenOn::Csl => "csl",
            CoarsenOn::Original => "original",
        })
    }
}

impl FromStr for CoarsenOn {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csl" => Ok(CoarsenOn::Csl),
            "original" => Ok(CoarsenOn::Original),
            other => Err(Error::InvalidConfig(format!("unknown coarsening operator '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HierarchyOptions {
    pub scheme: Scheme,
    pub coarsen_on: CoarsenOn,
    pub coarsest_below: usize,
    /// Upper bound on the number of levels, including the finest.
    pub max_levels: usize,
}

impl HierarchyOptions {
    pub fn new(scheme: Scheme, coarsen_on: CoarsenOn) -> Self {
        Self {
            scheme,
            coarsen_on,
            coarsest_below: COARSEST_BELOW,
            max_levels: usize::MAX,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Level {
    pub operator: CsrMatrix,
    pub nodes_per_dim: usize,
    /// Transfer to the next coarser level; absent on the coarsest one.
    pub pair: Option<TransferPair>,
}

#[derive(Debug, Clone)]
pub struct Hierarchy {
    levels: Vec<Level>,
    coarse_lu: LuFactors,
    /// Set when coarsening stopped early at an even node count.
    stopped_at_even: bool,
}

impl Hierarchy {
    /// `a` is the level-0 operator, `chain_start` the operator the Galerkin
    /// chain is started from (`C` or `A`).
    pub fn from_operators(
        a: CsrMatrix,
        chain_start: &CsrMatrix,
        nodes_per_dim: usize,
        opts: &HierarchyOptions,
    ) -> Result<Self> {
        if a.nrows() != nodes_per_dim * nodes_per_dim || chain_start.nrows() != a.nrows() {
            return Err(Error::DimensionMismatch {
                op: "build_hierarchy",
                expected: nodes_per_dim * nodes_per_dim,
                found: a.nrows(),
            });
        }
        let mut levels = vec![Level {
            operator: a,
            nodes_per_dim,
            pair: None,
        }];
        let mut stopped_at_even = false;
        let mut n = nodes_per_dim;
        loop {
            if n < opts.coarsest_below || levels.len() >= opts.max_levels {
                break;
            }
            if n.is_multiple_of(2) {
                stopped_at_even = true;
                break;
            }
            let pair = build_transfer_2d(n, opts.scheme)?;
            let source = if levels.len() == 1 {
                chain_start
            } else {
                &levels.last().unwrap().operator
            };
            let coarse = galerkin_coarse(source, &pair)?;
            levels.last_mut().unwrap().pair = Some(pair);
            n = coarse_size(n);
            levels.push(Level {
                operator: coarse,
                nodes_per_dim: n,
                pair: None,
            });
        }
        let coarse_lu = LuFactors::factor(&levels.last().unwrap().operator.to_dense()).map_err(|e| {
            Error::CoarseSolve {
                source: Box::new(e),
            }
        })?;
        Ok(Self {
            levels,
            coarse_lu,
            stopped_at_even,
        })
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn fine_operator(&self) -> &CsrMatrix {
        &self.levels[0].operator
    }

    pub fn nodes_per_level(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.nodes_per_dim).collect()
    }

    pub fn stopped_at_even(&self) -> bool {
        self.stopped_at_even
    }

    pub fn coarse_lu(&self) -> &LuFactors {
        &self.coarse_lu
    }
}

pub fn build_hierarchy(spec: &ProblemSpec, scheme: Scheme, coarsen_on: CoarsenOn) -> Result<Hierarchy> {
    build_hierarchy_with(spec, &HierarchyOptions::new(scheme, coarsen_on))
}

pub fn build_hierarchy_with(spec: &ProblemSpec, opts: &HierarchyOptions) -> Result<Hierarchy> {
    let field = build_wavenumber_field(spec)?;
    let a = assemble_helmholtz(spec, &field, false)?;
    match opts.coarsen_on {
        CoarsenOn::Csl => {
            let c = assemble_helmholtz(spec, &field, true)?;
            Hierarchy::from_operators(a, &c, spec.nodes_per_dim, opts)
        }
        CoarsenOn::Original => {
            let start = a.clone();
            Hierarchy::from_operators(a, &start, spec.nodes_per_dim, opts)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleConfig {
    /// 1 for V-cycles, 2 for W-cycles.
    pub gamma: usize,
    pub smoother: SmootherConfig,
    pub tol: f64,
    pub max_cycles: usize,
}

impl CycleConfig {
    pub fn new(gamma: usize, smoother: SmootherConfig) -> Self {
        Self {
            gamma,
            smoother,
            tol: DEFAULT_TOL,
            max_cycles: DEFAULT_MAX_CYCLES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.gamma) {
            return Err(Error::InvalidConfig(format!("gamma must be 1 or 2, got {}", self.gamma)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance must be positive, got {}", self.tol)));
        }
        self.smoother.validate()
    }
}

/// Per-level scratch vectors and smoother state.
#[derive(Debug)]
struct LevelWork {
    residual: Vec<C64>,
    rhs_coarse: Vec<C64>,
    u_coarse: Vec<C64>,
    correction: Vec<C64>,
    jacobi: Option<JacobiWeights>,
    gmres: Option<GmresWorkspace>,
}

/// Reusable cycling state bound to one hierarchy and configuration.
#[derive(Debug)]
pub struct Cycler<'h> {
    h: &'h Hierarchy,
    cfg: CycleConfig,
    work: Vec<LevelWork>,
    visits: Vec<usize>,
}

impl<'h> Cycler<'h> {
    pub fn new(h: &'h Hierarchy, cfg: CycleConfig) -> Result<Self> {
        cfg.validate()?;
        let mut work = Vec::with_capacity(h.levels.len());
        for (idx, level) in h.levels.iter().enumerate() {
            let n = level.operator.nrows();
            let nc = h.levels.get(idx + 1).map_or(0, |l| l.operator.nrows());
            let (jacobi, gmres) = match cfg.smoother.kind {
                SmootherKind::Jacobi { omega } => (Some(JacobiWeights::new(&level.operator, omega)?), None),
                SmootherKind::Gmres { m } => (None, Some(GmresWorkspace::new(n, m))),
            };
            work.push(LevelWork {
                residual: vec![ZERO; n],
                rhs_coarse: vec![ZERO; nc],
                u_coarse: vec![ZERO; nc],
                correction: vec![ZERO; n],
                jacobi,
                gmres,
            });
        }
        Ok(Self {
            h,
            cfg,
            work,
            visits: vec![0; h.levels.len()],
        })
    }

    /// Number of times each level has been entered since construction.
    pub fn visits(&self) -> &[usize] {
        &self.visits
    }

    fn smooth(&mut self, level: usize, u: &mut [C64], b: &[C64], steps: usize) {
        let a = &self.h.levels[level].operator;
        let w = &mut self.work[level];
        for _ in 0..steps {
            match self.cfg.smoother.kind {
                SmootherKind::Jacobi { .. } => {
                    jacobi_sweep_in_place(a, w.jacobi.as_ref().unwrap(), u, b, &mut w.residual)
                }
                SmootherKind::Gmres { m } => gmres_smooth_in_place(a, u, b, m, w.gmres.as_mut().unwrap()),
            }
        }
    }

    /// One cycle on `level`, updating `u` in place.
    pub fn cycle(&mut self, level: usize, u: &mut [C64], b: &[C64]) {
        self.visits[level] += 1;
        let last = self.h.levels.len() - 1;
        if level == last {
            u.copy_from_slice(b);
            self.h.coarse_lu.solve_in_place(u);
            return;
        }
        let h = self.h;
        let lvl = &h.levels[level];
        let pair = lvl.pair.as_ref().expect("non-coarsest level has a transfer pair");
        self.smooth(level, u, b, self.cfg.smoother.nu_pre);

        let mut rc = std::mem::take(&mut self.work[level].rhs_coarse);
        let mut uc = std::mem::take(&mut self.work[level].u_coarse);
        {
            let w = &mut self.work[level];
            lvl.operator.residual_into(u, b, &mut w.residual);
            pair.r.mul_vec_into(&w.residual, &mut rc);
        }
        uc.iter_mut().for_each(|v| *v = ZERO);
        for _ in 0..self.cfg.gamma {
            self.cycle(level + 1, &mut uc, &rc);
        }
        {
            let w = &mut self.work[level];
            pair.p.mul_vec_into(&uc, &mut w.correction);
            for (ui, ci) in u.iter_mut().zip(&w.correction) {
                *ui += ci;
            }
            w.rhs_coarse = rc;
            w.u_coarse = uc;
        }
        self.smooth(level, u, b, self.cfg.smoother.nu);
    }
}

/// Single cycle from `u` on `level`.
pub fn cycle(h: &Hierarchy, level: usize, u: &[C64], b: &[C64], cfg: &CycleConfig) -> Result<Vec<C64>> {
    let n = h.levels.get(level).map(|l| l.operator.nrows()).ok_or_else(|| {
        Error::InvalidConfig(format!("level {level} out of range ({} levels)", h.levels.len()))
    })?;
    for len in [u.len(), b.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                op: "cycle",
                expected: n,
                found: len,
            });
        }
    }
    let mut cycler = Cycler::new(h, *cfg)?;
    let mut out = u.to_vec();
    cycler.cycle(level, &mut out, b);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxCycles,
    Diverged,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxCycles => "max-cycles",
            SolveStatus::Diverged => "diverged",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub u: Vec<C64>,
    pub cycles: usize,
    /// Relative residual after each cycle.
    pub residual_history: Vec<f64>,
    pub status: SolveStatus,
}

impl SolveOutcome {
    pub fn final_relres(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(0.0)
    }

    /// CSV with header `cycle,relres`.
    pub fn write_history_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "cycle,relres")?;
        for (i, r) in self.residual_history.iter().enumerate() {
            writeln!(out, "{},{:e}", i + 1, r)?;
        }
        Ok(())
    }
}

pub fn solve(h: &Hierarchy, b: &[C64], cfg: &CycleConfig) -> Result<SolveOutcome> {
    let a = h.fine_operator();
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            op: "solve",
            expected: a.nrows(),
            found: b.len(),
        });
    }
    if !crate::linalg::is_finite(b) {
        return Err(Error::InvalidProblem("right-hand side has non-finite entries".into()));
    }
    let mut cycler = Cycler::new(h, *cfg)?;
    let mut u = vec![ZERO; b.len()];
    let bnorm = norm2(b);
    let mut history = Vec::new();
    if bnorm == 0.0 {
        return Ok(SolveOutcome {
            u,
            cycles: 0,
            residual_history: history,
            status: SolveStatus::Converged,
        });
    }
    let mut r = vec![ZERO; b.len()];
    let status = loop {
        if history.len() >= cfg.max_cycles {
            break SolveStatus::MaxCycles;
        }
        cycler.cycle(0, &mut u, b);
        a.residual_into(&u, b, &mut r);
        let rel = norm2(&r) / bnorm;
        history.push(rel);
        if rel <= cfg.tol {
            break SolveStatus::Converged;
        }
        if !rel.is_finite() || rel > DIVERGENCE_THRESHOLD {
            break SolveStatus::Diverged;
        }
    };
    Ok(SolveOutcome {
        u,
        cycles: history.len(),
        residual_history: history,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{spmv, DenseMatrix, SplitMix64, ONE};
    use crate::problem::{assemble_rhs, Shift};

    fn rand_vec(rng: &mut SplitMix64, n: usize) -> Vec<C64> {
        (0..n).map(|_| C64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5)).collect()
    }

    #[test]
    fn level_counts() {
        let spec = ProblemSpec::constant(50.0);
        let h = build_hierarchy(&spec, Scheme::Bezier, CoarsenOn::Csl).unwrap();
        assert_eq!(h.nodes_per_level(), vec![81, 41, 21, 11, 6]);
        assert_eq!(h.levels().last().unwrap().operator.nrows(), 36);
        for l in h.levels() {
            assert_eq!(l.operator.nrows(), l.nodes_per_dim * l.nodes_per_dim);
        }
        assert!(!h.stopped_at_even());
        let spec = ProblemSpec::constant(150.0);
        let h = build_hierarchy(&spec, Scheme::Bezier, CoarsenOn::Csl).unwrap();
        assert_eq!(h.nodes_per_level(), vec![241, 121, 61, 31, 16]);
        assert!(h.stopped_at_even());
    }

    #[test]
    fn level_zero_is_unshifted() {
        let spec = ProblemSpec::constant(10.0).with_nodes(33);
        let h = build_hierarchy(&spec, Scheme::Bezier, CoarsenOn::Csl).unwrap();
        let field = build_wavenumber_field(&spec).unwrap();
        let a = assemble_helmholtz(&spec, &field, false).unwrap();
        assert_eq!(h.fine_operator(), &a);
    }

    #[test]
    fn zero_shift_csl_equals_original() {
        let spec = ProblemSpec::constant(10.0).with_nodes(33).with_shift(Shift::Zero);
        let h1 = build_hierarchy(&spec, Scheme::Bezier, CoarsenOn::Csl).unwrap();
        let h2 = build_hierarchy(&spec, Scheme::Bezier, CoarsenOn::Original).unwrap();
        for (l1, l2) in h1.levels().iter().zip(h2.levels()) {
            assert_eq!(l1.operator, l2.operator);
        }
    }

    #[test]
    fn original_mode_first_coarse_is_rap() {
        let spec = ProblemSpec::constant(10.0).with_nodes(33);
        let h = build_hierarchy(&spec, Scheme::Linear, CoarsenOn::Original).unwrap();
        let l0 = &h.levels()[0];
        let want = galerkin_coarse(&l0.operator, l0.pair.as_ref().unwrap()).unwrap();
        assert_eq!(h.levels()[1].operator, want);
    }

    #[test]
    fn zero_rhs_fixed_point() {
        let spec = ProblemSpec::constant(10.0).with_nodes(33);
        let h = build_hierarchy(&spec, Scheme::Bezier, CoarsenOn::Csl).unwrap();
        let cfg = CycleConfig::new(1, SmootherConfig::jacobi(4.5, 2));
        let n = spec.unknowns();
        let u = cycle(&h, 0, &vec![ZERO; n], &vec![ZERO; n], &cfg).unwrap();
        assert!(u.iter().all(|v| *v == ZERO));
        let out = solve(&h, &vec![ZERO; n], &cfg).unwrap();
        assert_eq!((out.cycles, out.status), (0, SolveStatus::Converged));
    }

    #[test]
    fn w_cycle_visit_counts() {
        let spec = ProblemSpec::constant(5.0).with_nodes(17);
        let opts = HierarchyOptions {
            coarsest_below: 3,
            max_levels: 3,
            ..HierarchyOptions::new(Scheme::Bezier, CoarsenOn::Csl)
        };
        let h = build_hierarchy_with(&spec, &opts).unwrap();
        assert_eq!(h.nodes_per_level(), vec![17, 9, 5]);
        let b = assemble_rhs(&spec).unwrap();
        let mut cycler = Cycler::new(&h, CycleConfig::new(2, SmootherConfig::jacobi(4.5, 1))).unwrap();
        let mut u = vec![ZERO; b.len()];
        cycler.cycle(0, &mut u, &b);
        assert_eq!(cycler.visits(), &[1, 2, 4]);
        let mut cycler = Cycler::new(&h, CycleConfig::new(1, SmootherConfig::jacobi(4.5, 1))).unwrap();
        cycler.cycle(0, &mut u, &b);
        assert_eq!(cycler.visits(), &[1, 1, 1]);
    }

    /// Dense `T₀ = (I − P A_c⁻¹ R A)(I − X⁻¹ A)` against one cycle acting on
    /// the error of a homogeneous problem. Smoothing before the correction
    /// reproduces `T₀`; smoothing after it gives the reversed product.
    #[test]
    fn two_grid_cycle_matches_dense_t0() {
        let spec = ProblemSpec::constant(5.0).with_nodes(17);
        let opts = HierarchyOptions {
            max_levels: 2,
            ..HierarchyOptions::new(Scheme::Bezier, CoarsenOn::Csl)
        };
        let h = build_hierarchy_with(&spec, &opts).unwrap();
        assert_eq!(h.num_levels(), 2);
        let omega = 4.5;
        let a = h.fine_operator().to_dense();
        let pair = h.levels()[0].pair.as_ref().unwrap();
        let (p, r) = (pair.p.to_dense(), pair.r.to_dense());
        let ac_inv = h.coarse_lu().inverse();
        let n = a.nrows();
        let mut cgc = p.matmul(&ac_inv).matmul(&r).matmul(&a);
        cgc.scale(-ONE);
        cgc.add_identity(ONE);
        let d = h.fine_operator().diagonal();
        let s = DenseMatrix::from_fn(n, n, |i, j| {
            let id = if i == j { ONE } else { ZERO };
            id - a[(i, j)] / (d[i] * omega)
        });
        let t0 = cgc.matmul(&s);
        let post = s.matmul(&cgc);
        let pre_cfg = CycleConfig::new(
            1,
            SmootherConfig {
                nu: 0,
                nu_pre: 1,
                ..SmootherConfig::jacobi(omega, 1)
            },
        );
        let post_cfg = CycleConfig::new(1, SmootherConfig::jacobi(omega, 1));
        let mut rng = SplitMix64::new(17);
        for (cfg, op) in [(&pre_cfg, &t0), (&post_cfg, &post)] {
            for _ in 0..5 {
                let e = rand_vec(&mut rng, n);
                let got = cycle(&h, 0, &e, &vec![ZERO; n], cfg).unwrap();
                let want = op.matvec(&e);
                let diff: Vec<C64> = got.iter().zip(&want).map(|(g, w)| g - w).collect();
                assert!(norm2(&diff) <= 1e-11 * norm2(&want), "{}", norm2(&diff) / norm2(&want));
            }
        }
    }

    #[test]
    fn cycle_is_linear() {
        let spec = ProblemSpec::constant(8.0).with_nodes(17);
        let opts = HierarchyOptions {
            coarsest_below: 5,
            ..HierarchyOptions::new(Scheme::Bezier, CoarsenOn::Csl)
        };
        let h = build_hierarchy_with(&spec, &opts).unwrap();
        let n = spec.unknowns();
        let mut rng = SplitMix64::new(3);
        for cfg in [
            CycleConfig::new(1, SmootherConfig::jacobi(4.5, 2)),
            CycleConfig::new(2, SmootherConfig::jacobi(4.5, 1)),
        ] {
            let (x, y) = (rand_vec(&mut rng, n), rand_vec(&mut rng, n));
            let alpha = C64::new(0.3, -1.2);
            let zero = vec![ZERO; n];
            let cx = cycle(&h, 0, &x, &zero, &cfg).unwrap();
            let cy = cycle(&h, 0, &y, &zero, &cfg).unwrap();
            let xy: Vec<C64> = x.iter().zip(&y).map(|(a, b)| alpha * a + b).collect();
            let cxy = cycle(&h, 0, &xy, &zero, &cfg).unwrap();
            for i in 0..n {
                assert!((cxy[i] - (alpha * cx[i] + cy[i])).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn cycle_count_invariant_under_rhs_scaling() {
        let spec = ProblemSpec::constant(15.0).with_nodes(33);
        let h = build_hierarchy(&spec, Scheme::Bezier, CoarsenOn::Csl).unwrap();
        let cfg = CycleConfig::new(1, SmootherConfig::jacobi(4.5, 4));
        let b = assemble_rhs(&spec).unwrap();
        let base = solve(&h, &b, &cfg).unwrap();
        assert_eq!(base.status, SolveStatus::Converged);
        for s in [C64::new(1e-6, 0.0), C64::new(-3.0, 4.0), C64::new(0.0, 1e5)] {
            let bs: Vec<C64> = b.iter().map(|v| v * s).collect();
            assert_eq!(solve(&h, &bs, &cfg).unwrap().cycles, base.cycles);
        }
    }

    #[test]
    fn converged_solution_has_small_residual() {
        let spec = ProblemSpec::constant(10.0).with_nodes(33);
        let h = build_hierarchy(&spec, Scheme::Bezier, CoarsenOn::Csl).unwrap();
        let cfg = CycleConfig::new(2, SmootherConfig::gmres(3, 2));
        let b = assemble_rhs(&spec).unwrap();
        let out = solve(&h, &b, &cfg).unwrap();
        assert_eq!(out.status, SolveStatus::Converged);
        let ax = spmv(h.fine_operator(), &out.u).unwrap();
        let r: Vec<C64> = ax.iter().zip(&b).map(|(x, y)| y - x).collect();
        assert!(norm2(&r) <= 1e-5 * norm2(&b));
    }

    #[test]
    fn max_cycles_truncates() {
        let spec = ProblemSpec::constant(15.0).with_nodes(33);
        let h = build_hierarchy(&spec, Scheme::Bezier, CoarsenOn::Csl).unwrap();
        let mut cfg = CycleConfig::new(1, SmootherConfig::jacobi(4.5, 1));
        cfg.max_cycles = 1;
        let out = solve(&h, &assemble_rhs(&spec).unwrap(), &cfg).unwrap();
        assert_eq!((out.cycles, out.status), (1, SolveStatus::MaxCycles));
        let mut buf = Vec::new();
        out.write_history_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("cycle,relres\n1,"));
    }

    #[test]
    fn linear_original_jacobi_diverges() {
        let spec = ProblemSpec::constant(30.0).with_nodes(65);
        let h = build_hierarchy(&spec, Scheme::Linear, CoarsenOn::Original).unwrap();
        let cfg = CycleConfig::new(1, SmootherConfig::jacobi(4.5, 1));
        let out = solve(&h, &assemble_rhs(&spec).unwrap(), &cfg).unwrap();
        assert_ne!(out.status, SolveStatus::Converged);
    }

    #[test]
    fn constant_k_solution_has_dihedral_symmetry() {
        let n = 33;
        let spec = ProblemSpec::constant(12.0).with_nodes(n);
        let h = build_hierarchy(&spec, Scheme::Bezier, CoarsenOn::Csl).unwrap();
        let mut cfg = CycleConfig::new(1, SmootherConfig::jacobi(4.5, 4));
        cfg.tol = 1e-13;
        let out = solve(&h, &assemble_rhs(&spec).unwrap(), &cfg).unwrap();
        let u = &out.u;
        let scale = u.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let maps: [fn(usize, usize, usize) -> (usize, usize); 7] = [
            |i, j, n| (n - 1 - i, j),
            |i, j, n| (i, n - 1 - j),
            |i, j, n| (n - 1 - i, n - 1 - j),
            |i, j, _| (j, i),
            |i, j, n| (n - 1 - j, i),
            |i, j, n| (j, n - 1 - i),
            |i, j, n| (n - 1 - j, n - 1 - i),
        ];
        for j in 0..n {
            for i in 0..n {
                for f in &maps {
                    let (a, b) = f(i, j, n);
                    assert!((u[j * n + i] - u[b * n + a]).norm() <= 1e-10 * scale);
                }
            }
        }
    }
}
