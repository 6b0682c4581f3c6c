//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Invariant checks (criteria 2, 3 sub-checks and 10) make the process exit
//! non-zero when they fail. Reproduction checks against reference numbers
//! are reported but only fail the run with `ACCEPTANCE_STRICT=1`.
//! `ACCEPTANCE_ONLY=1,4` restricts the run to the listed criteria.

use std::time::Instant;

use helmholtz_mg::certificate::{
    assemble_t0, certify, norm_table, ratio_table, CertificateReport, TwoGridConfig, NORM_TABLE_COLUMNS,
    SWEEP_NUS, SWEEP_OMEGAS, TABLE_WAVENUMBERS,
};
use helmholtz_mg::linalg::{norm2, DenseMatrix, SplitMix64, C64, ONE, ZERO};
use helmholtz_mg::mg::{
    build_hierarchy, build_hierarchy_with, cycle, solve, CoarsenOn, CycleConfig, HierarchyOptions,
    SolveStatus,
};
use helmholtz_mg::presets::{write_bench_csv, BenchCase};
use helmholtz_mg::problem::{assemble_rhs, build_wavenumber_field, Profile, ProblemSpec, Shift};
use helmholtz_mg::smoothing::{gmres_smooth, jacobi_sweep, SmootherConfig};
use helmholtz_mg::transfer::{build_prolongation_1d, build_transfer_2d, galerkin_coarse, Scheme};

// Tolerances, one per criterion.
const NORM_REL_TOL: f64 = 0.15;
const HERMITIAN_TOL: f64 = 1e-12;
const BOUND_SLACK: f64 = 1e-8;
const SIGMA_DA_LIMIT: f64 = 2.0;
const TWO_GRID_TOL: f64 = 1e-11;
const RATIO_REL_TOL: f64 = 0.20;
const H_SPREAD_MAX: usize = 2;
const H_ABS_BAND: usize = 3;
const JACOBI_REL_BAND: f64 = 0.25;
const SLOPE_RANGE: (f64, f64) = (0.8, 1.35);
const GMRES_REL_BAND: f64 = 0.30;
const VW_MAX_GAP: usize = 2;
const K_INDEPENDENCE_RATIO: f64 = 2.5;
const ORIGINAL_W_MAX_CYCLES: usize = 15;
const HETERO_GMRES_ABS_BAND: usize = 3;
const HETERO_JACOBI_REL_BAND: f64 = 0.30;
const GALERKIN_TOL: f64 = 1e-12;

// Reference values. Norm table rows follow TABLE_WAVENUMBERS, columns
// NORM_TABLE_COLUMNS; `true` marks Γ̃ HPD.
const REF_NORMS: [[(bool, f64); 4]; 4] = [
    [(false, 2.284), (false, 1.304), (true, 0.991), (true, 0.911)],
    [(false, 5.888), (false, 1.351), (false, 1.105), (true, 0.913)],
    [(false, 8.786), (false, 1.328), (false, 1.306), (true, 0.951)],
    [(false, 10.660), (false, 1.325), (false, 1.504), (true, 0.984)],
];
// Columns ordered by ω then ν, as in SWEEP_OMEGAS × SWEEP_NUS.
const REF_RATIOS: [[f64; 10]; 4] = [
    [0.373, 0.413, 0.273, 0.405, 0.206, 0.389, 0.088, 0.200, 0.031, 0.123],
    [0.137, 0.140, 0.128, 0.139, 0.112, 0.137, 0.065, 0.116, 0.028, 0.081],
    [0.030, 0.028, 0.029, 0.029, 0.028, 0.030, 0.022, 0.028, 0.012, 0.025],
    [0.011, 0.009, 0.011, 0.010, 0.010, 0.011, 0.008, 0.011, 0.001, 0.009],
];
const H_REF_K15_NU4: usize = 18;
const CONSTANT_KS: [f64; 5] = [50.0, 100.0, 150.0, 200.0, 250.0];
const REF_JACOBI_NU4_V: [usize; 5] = [58, 104, 155, 209, 267];
const REF_GMRES_NU5_V: [usize; 5] = [20, 36, 53, 71, 88];
const REF_INVK_NU3_W: [usize; 5] = [5, 6, 9, 10, 12];
const REF_HETERO_GMRES: usize = 6;
const REF_HETERO_JACOBI_NU8_V: usize = 102;
const HETERO_SEED: u64 = 1;

struct Tally {
    pass: usize,
    fail: usize,
    hard: Vec<String>,
}

impl Tally {
    fn line(&mut self, id: &str, ok: bool, hard: bool, detail: &str) {
        let tag = if ok { "PASS" } else { "FAIL" };
        let kind = if hard { "invariant" } else { "reproduction" };
        println!("{tag} [{id}] ({kind}) {detail}");
        if ok {
            self.pass += 1;
        } else {
            self.fail += 1;
            if hard {
                self.hard.push(id.to_string());
            }
        }
    }

    fn check(&mut self, id: &str, ok: bool, detail: &str) {
        self.line(id, ok, false, detail);
    }

    fn invariant(&mut self, id: &str, ok: bool, detail: &str) {
        self.line(id, ok, true, detail);
    }
}

fn within_rel(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs()
}

struct Run {
    cycles: usize,
    status: SolveStatus,
}

impl Run {
    fn show(&self) -> String {
        if self.status == SolveStatus::Converged {
            self.cycles.to_string()
        } else {
            format!("{}({})", self.cycles, self.status)
        }
    }

    fn ok(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

fn run(spec: &ProblemSpec, scheme: Scheme, on: CoarsenOn, gamma: usize, smoother: SmootherConfig, cap: usize) -> Run {
    let h = build_hierarchy(spec, scheme, on).expect("hierarchy");
    let b = assemble_rhs(spec).expect("rhs");
    let cfg = CycleConfig {
        max_cycles: cap,
        ..CycleConfig::new(gamma, smoother)
    };
    let out = solve(&h, &b, &cfg).expect("solve");
    Run {
        cycles: out.cycles,
        status: out.status,
    }
}

fn cap_for(expected: usize) -> usize {
    2 * expected + 20
}

fn report_invariants(t: &mut Tally, reports: &[&CertificateReport]) {
    let mut herm_worst: f64 = 0.0;
    let mut bad = Vec::new();
    let mut gamma_hpd = 0;
    for r in reports {
        herm_worst = herm_worst
            .max(r.hermiticity_residual_gamma)
            .max(r.hermiticity_residual_gamma_tilde);
        if r.hpd_gamma.is_hpd() {
            gamma_hpd += 1;
        }
        for v in r.invariant_violations() {
            bad.push(format!("k={} {}/{} nu={}: {v}", r.k, r.scheme, r.coarsen_on, r.nu));
        }
        if r.hpd_gamma.is_hpd() && r.lambda_min_gamma.is_none() {
            bad.push(format!("k={} {}/{}: lambda_min missing", r.k, r.scheme, r.coarsen_on));
        }
        if r.hpd_gamma.is_hpd() && !(r.sigma_max_da.value < SIGMA_DA_LIMIT + BOUND_SLACK) {
            bad.push(format!("k={} sigma_max(DA) = {}", r.k, r.sigma_max_da.value));
        }
    }
    t.invariant(
        "2-hermitian",
        herm_worst <= HERMITIAN_TOL,
        &format!("{} configs, worst relative hermiticity residual {herm_worst:.2e} (tol {HERMITIAN_TOL:e})", reports.len()),
    );
    t.invariant(
        "2-bounds",
        bad.is_empty(),
        &format!(
            "{gamma_hpd} of {} configs have Gamma HPD; ||T0|| < 1, ||T0|| <= sqrt|1-lmin| + {BOUND_SLACK:e}, \
             sigma_max(DA) < 2, Gamma~ HPD => Gamma HPD: {}",
            reports.len(),
            if bad.is_empty() { "all hold".to_string() } else { bad.join("; ") }
        ),
    );
}

fn criterion_1_and_2(t: &mut Tally) {
    let start = Instant::now();
    let table = norm_table(&TABLE_WAVENUMBERS, 4.5).expect("norm table");
    let col = |name: (Scheme, CoarsenOn)| NORM_TABLE_COLUMNS.iter().position(|&c| c == name).unwrap();
    let (la, bc, ba) = (
        col((Scheme::Linear, CoarsenOn::Original)),
        col((Scheme::Bezier, CoarsenOn::Csl)),
        col((Scheme::Bezier, CoarsenOn::Original)),
    );
    let mut grid = String::new();
    for (k, row) in &table {
        let cells: Vec<String> = row
            .iter()
            .map(|r| format!("{}{:.3}", if r.hpd_gamma_tilde.is_hpd() { "+" } else { "x" }, r.spectral_norm_t0.value))
            .collect();
        grid.push_str(&format!(" k={k}: {}", cells.join(" ")));
    }
    println!("      norm table (+ = Gamma~ HPD, columns LA LC BA BC):{grid}");

    let hpd = |c: usize| -> Vec<bool> { table.iter().map(|(_, r)| r[c].hpd_gamma_tilde.is_hpd()).collect() };
    let bc_hpd = hpd(bc);
    t.check("1a", bc_hpd.iter().all(|&h| h), &format!("bezier+csl Gamma~ HPD for k=5,10,20,30: {bc_hpd:?}"));
    let la_ok = table
        .iter()
        .all(|(_, r)| !r[la].hpd_gamma_tilde.is_hpd() && r[la].spectral_norm_t0.value > 1.0);
    let la_norms: Vec<String> = table.iter().map(|(_, r)| format!("{:.3}", r[la].spectral_norm_t0.value)).collect();
    t.check("1b", la_ok, &format!("linear+A not HPD with ||T0|| > 1 for all k: norms {la_norms:?}"));
    let ba_hpd = hpd(ba);
    let ba_ok = ba_hpd == [true, false, false, false];
    t.check("1c", ba_ok, &format!("bezier+A HPD only at k=5: got {ba_hpd:?}"));
    let mut off = Vec::new();
    let mut cells = 0;
    for (ri, (k, row)) in table.iter().enumerate() {
        for (ci, r) in row.iter().enumerate() {
            cells += 1;
            let want = REF_NORMS[ri][ci].1;
            if !within_rel(r.spectral_norm_t0.value, want, NORM_REL_TOL) {
                off.push(format!("k={k} col{ci}: {:.3} vs {want}", r.spectral_norm_t0.value));
            }
        }
    }
    t.check(
        "1-norms",
        off.is_empty(),
        &format!(
            "{} of {cells} norms within {:.0}%; outside: {}",
            cells - off.len(),
            NORM_REL_TOL * 100.0,
            off.join(", ")
        ),
    );
    let verdict_mismatch: Vec<String> = table
        .iter()
        .enumerate()
        .flat_map(|(ri, (k, row))| {
            row.iter().enumerate().filter_map(move |(ci, r)| {
                (r.hpd_gamma_tilde.is_hpd() != REF_NORMS[ri][ci].0).then(|| format!("k={k} col{ci}"))
            })
        })
        .collect();
    println!(
        "      verdict pattern mismatches: {:?}; norm table took {:.1}s",
        verdict_mismatch,
        start.elapsed().as_secs_f64()
    );

    // Extra small configs so criterion 2 also covers ν = 2, other ω and shifts.
    let mut extra = Vec::new();
    for (k, scheme, on, omega, nu) in [
        (2.0, Scheme::Linear, CoarsenOn::Original, 4.5, 1),
        (5.0, Scheme::Bezier, CoarsenOn::Csl, 2.0, 2),
        (5.0, Scheme::Linear, CoarsenOn::Csl, 7.0, 2),
        (10.0, Scheme::Bezier, CoarsenOn::Csl, 1.5, 1),
        (10.0, Scheme::Bezier, CoarsenOn::Original, 2.5, 2),
    ] {
        let cfg = TwoGridConfig::for_wavenumber(k, scheme, on).unwrap().with_smoothing(omega, nu);
        extra.push(certify(&cfg).expect("certify"));
    }
    let mut all: Vec<&CertificateReport> = table.iter().flat_map(|(_, r)| r.iter()).collect();
    all.extend(extra.iter());
    report_invariants(t, &all);
}

fn error_propagator(h: &helmholtz_mg::mg::Hierarchy, cfg: &CycleConfig) -> DenseMatrix {
    let n = h.fine_operator().nrows();
    let zero = vec![ZERO; n];
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![ZERO; n];
        e[j] = ONE;
        cols.push(cycle(h, 0, &e, &zero, cfg).expect("cycle"));
    }
    DenseMatrix::from_fn(n, n, |i, j| cols[j][i])
}

fn criterion_3(t: &mut Tally) {
    let mut literal_worst: f64 = 0.0;
    let mut pre_worst: f64 = 0.0;
    let mut post_worst: f64 = 0.0;
    for (k, n, scheme, on) in [
        (5.0, 9, Scheme::Bezier, CoarsenOn::Csl),
        (5.0, 17, Scheme::Linear, CoarsenOn::Original),
        (10.0, 17, Scheme::Bezier, CoarsenOn::Csl),
        (20.0, 33, Scheme::Bezier, CoarsenOn::Csl),
    ] {
        let spec = ProblemSpec::constant(k).with_nodes(n);
        let opts = HierarchyOptions {
            coarsest_below: 3,
            max_levels: 2,
            ..HierarchyOptions::new(scheme, on)
        };
        let h = build_hierarchy_with(&spec, &opts).unwrap();
        let tg = TwoGridConfig::from_problem(&spec, scheme, on).unwrap();
        let t0 = assemble_t0(&tg).unwrap();

        let post = CycleConfig::new(1, SmootherConfig::jacobi(4.5, 1));
        let pre = CycleConfig::new(
            1,
            SmootherConfig {
                nu: 0,
                nu_pre: 1,
                ..SmootherConfig::jacobi(4.5, 1)
            },
        );
        let e_post = error_propagator(&h, &post);
        let e_pre = error_propagator(&h, &pre);
        literal_worst = literal_worst.max(e_post.relative_distance(&t0));
        pre_worst = pre_worst.max(e_pre.relative_distance(&t0));

        // Post-smoothing applies the smoother after the correction: S·CGC.
        let nn = n * n;
        let s = DenseMatrix::from_fn(nn, nn, |i, j| {
            let id = if i == j { ONE } else { ZERO };
            id - tg.a.get(i, j) / (tg.a.get(i, i) * 4.5)
        });
        // ν = 0 leaves only the coarse-grid correction.
        let cgc = assemble_t0(&tg.clone().with_smoothing(4.5, 0)).unwrap();
        let s_cgc = s.matmul(&cgc);
        post_worst = post_worst.max(e_post.relative_distance(&s_cgc));
    }
    t.check(
        "3",
        literal_worst <= TWO_GRID_TOL,
        &format!(
            "V-cycle with nu_pre=0, nu=1 vs dense T0 = CGC*S: relative distance {literal_worst:.2e} (tol {TWO_GRID_TOL:e}); \
             a post-smoothing cycle propagates error by S*CGC, not CGC*S"
        ),
    );
    t.invariant(
        "3-pre",
        pre_worst <= TWO_GRID_TOL,
        &format!("V-cycle with nu_pre=1, nu=0 vs T0 = CGC*S on 9^2..33^2: {pre_worst:.2e}"),
    );
    t.invariant(
        "3-post",
        post_worst <= TWO_GRID_TOL,
        &format!("V-cycle with nu_pre=0, nu=1 vs S*CGC on 9^2..33^2: {post_worst:.2e}"),
    );
}

fn criterion_4(t: &mut Tally) {
    let start = Instant::now();
    let table = ratio_table(&TABLE_WAVENUMBERS, &SWEEP_OMEGAS, &SWEEP_NUS).expect("ratio table");
    let value = |ri: usize, ci: usize| table[ri].1[ci].ratio.unwrap_or(f64::NAN);
    let mut within = 0;
    let mut total = 0;
    for (ri, (k, cells)) in table.iter().enumerate() {
        let vals: Vec<String> = cells.iter().map(|c| c.ratio.map_or("-".into(), |r| format!("{r:.4}"))).collect();
        println!("      ratio k={k}: {}", vals.join(" "));
        for ci in 0..cells.len() {
            total += 1;
            if within_rel(value(ri, ci), REF_RATIOS[ri][ci], RATIO_REL_TOL) {
                within += 1;
            }
        }
    }
    t.check(
        "4-values",
        within == total,
        &format!("{within} of {total} cells within {:.0}% ({:.1}s)", RATIO_REL_TOL * 100.0, start.elapsed().as_secs_f64()),
    );
    let mut k_trend = Vec::new();
    for ci in 0..SWEEP_OMEGAS.len() * SWEEP_NUS.len() {
        for ri in 1..table.len() {
            if !(value(ri, ci) < value(ri - 1, ci)) {
                k_trend.push(format!("col{ci} k={}", table[ri].0));
            }
        }
    }
    t.check(
        "4-k-trend",
        k_trend.is_empty(),
        &format!("values decrease with k for every (omega, nu); violations: {k_trend:?}"),
    );
    let col = |omega: f64| {
        SWEEP_OMEGAS.iter().position(|&o| o == omega).unwrap() * SWEEP_NUS.len()
            + SWEEP_NUS.iter().position(|&n| n == 1).unwrap()
    };
    let mut w_trend = Vec::new();
    for (ri, (k, _)) in table.iter().enumerate() {
        let seq = [value(ri, col(2.5)), value(ri, col(4.5)), value(ri, col(7.0))];
        if !(seq[1] < seq[0] && seq[2] < seq[1]) {
            w_trend.push(format!("k={k}: {seq:.4?}"));
        }
    }
    t.check(
        "4-omega-trend",
        w_trend.is_empty(),
        &format!("nu=1 values decrease over omega 2.5, 4.5, 7; violations: {w_trend:?}"),
    );
}

fn criterion_5(t: &mut Tally) {
    let mut counts = Vec::new();
    let mut shown = Vec::new();
    for p in 6..=9 {
        let spec = ProblemSpec::constant(15.0).with_nodes((1 << p) + 1);
        let r = run(&spec, Scheme::Bezier, CoarsenOn::Csl, 1, SmootherConfig::jacobi(4.5, 4), 200);
        shown.push(format!("h=2^-{p}: {}", r.show()));
        counts.push(if r.ok() { r.cycles } else { usize::MAX });
    }
    let (lo, hi) = (*counts.iter().min().unwrap(), *counts.iter().max().unwrap());
    t.check(
        "5-spread",
        hi != usize::MAX && hi - lo <= H_SPREAD_MAX,
        &format!("k=15 nu=4 Jacobi V-cycles vary by <= {H_SPREAD_MAX}: {}", shown.join(", ")),
    );
    let abs_ok = counts.iter().all(|&c| c != usize::MAX && c.abs_diff(H_REF_K15_NU4) <= H_ABS_BAND);
    t.check("5-abs", abs_ok, &format!("every count within ±{H_ABS_BAND} of {H_REF_K15_NU4}"));
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn criterion_6(t: &mut Tally) {
    let mut shown = Vec::new();
    let mut runs = Vec::new();
    for (&k, &want) in CONSTANT_KS.iter().zip(&REF_JACOBI_NU4_V) {
        let spec = ProblemSpec::constant(k);
        let r = run(&spec, Scheme::Bezier, CoarsenOn::Csl, 1, SmootherConfig::jacobi(4.5, 4), cap_for(want));
        shown.push(format!("k={k}: {} (ref {want})", r.show()));
        runs.push(r);
    }
    let in_band = runs
        .iter()
        .zip(&REF_JACOBI_NU4_V)
        .all(|(r, &w)| r.ok() && within_rel(r.cycles as f64, w as f64, JACOBI_REL_BAND));
    t.check("6-counts", in_band, &format!("Jacobi nu=4 V-cycles within ±25%: {}", shown.join(", ")));
    let converged = runs.iter().all(Run::ok);
    let s = if converged {
        slope(&CONSTANT_KS, &runs.iter().map(|r| r.cycles as f64).collect::<Vec<_>>())
    } else {
        f64::NAN
    };
    t.check(
        "6-slope",
        s >= SLOPE_RANGE.0 && s <= SLOPE_RANGE.1,
        &format!("cycles-vs-k slope {s:.3} in {SLOPE_RANGE:?} (NaN when a run did not converge)"),
    );
}

fn criterion_7(t: &mut Tally) {
    let mut shown = Vec::new();
    let mut v_ok = true;
    let mut gaps = Vec::new();
    for (&k, &want) in CONSTANT_KS.iter().zip(&REF_GMRES_NU5_V) {
        let spec = ProblemSpec::constant(k);
        let g = SmootherConfig::gmres(3, 5);
        let v = run(&spec, Scheme::Bezier, CoarsenOn::Csl, 1, g, cap_for(want));
        let w = run(&spec, Scheme::Bezier, CoarsenOn::Csl, 2, g, cap_for(want));
        v_ok &= v.ok() && within_rel(v.cycles as f64, want as f64, GMRES_REL_BAND);
        if !(v.ok() && w.ok() && v.cycles.abs_diff(w.cycles) <= VW_MAX_GAP) {
            gaps.push(format!("k={k}"));
        }
        shown.push(format!("k={k}: V {} W {} (ref {want})", v.show(), w.show()));
    }
    t.check("7-counts", v_ok, &format!("GMRES(3) shift 0.7 nu=5 V within ±30%: {}", shown.join(", ")));
    t.check("7-vw", gaps.is_empty(), &format!("V and W within ±{VW_MAX_GAP} per k; off: {gaps:?}"));
}

fn criterion_8(t: &mut Tally) {
    let g3 = SmootherConfig::gmres(3, 3);
    let g5 = SmootherConfig::gmres(3, 5);
    let mut shown = Vec::new();
    let mut ok3 = true;
    let mut nu5 = Vec::new();
    for (&k, &want) in CONSTANT_KS.iter().zip(&REF_INVK_NU3_W) {
        let spec = ProblemSpec::constant(k).with_shift(Shift::InverseK);
        let w3 = run(&spec, Scheme::Bezier, CoarsenOn::Csl, 2, g3, cap_for(want));
        let w5 = run(&spec, Scheme::Bezier, CoarsenOn::Csl, 2, g5, cap_for(want));
        ok3 &= w3.ok() && within_rel(w3.cycles as f64, want as f64, GMRES_REL_BAND);
        shown.push(format!("k={k}: nu3 {} (ref {want}) nu5 {}", w3.show(), w5.show()));
        nu5.push(w5);
    }
    t.check("8-counts", ok3, &format!("inv-k shift W nu=3 within ±30%: {}", shown.join(", ")));
    let ratio = if nu5.iter().all(Run::ok) {
        let c: Vec<f64> = nu5.iter().map(|r| r.cycles as f64).collect();
        c.iter().cloned().fold(f64::MIN, f64::max) / c.iter().cloned().fold(f64::MAX, f64::min)
    } else {
        f64::INFINITY
    };
    t.check(
        "8-flat",
        ratio <= K_INDEPENDENCE_RATIO,
        &format!("W nu=5 max/min over k = {ratio:.2} (<= {K_INDEPENDENCE_RATIO})"),
    );
    let spec = ProblemSpec::constant(100.0);
    let r = run(&spec, Scheme::Bezier, CoarsenOn::Original, 2, g3, 200);
    t.check(
        "8-original",
        r.ok() && r.cycles <= ORIGINAL_W_MAX_CYCLES,
        &format!("coarsening on A, k=100 GMRES(3) nu=3 W: {} cycles (<= {ORIGINAL_W_MAX_CYCLES})", r.show()),
    );
}

fn criterion_9(t: &mut Tally) {
    let sharp = ProblemSpec::variable(10.0, 75.0, Profile::Sharp, HETERO_SEED);
    let r = run(
        &sharp.clone().with_shift(Shift::InverseK),
        Scheme::Bezier,
        CoarsenOn::Csl,
        2,
        SmootherConfig::gmres(3, 3),
        200,
    );
    t.check(
        "9-gmres",
        r.ok() && r.cycles.abs_diff(REF_HETERO_GMRES) <= HETERO_GMRES_ABS_BAND,
        &format!("sharp (10,75) seed {HETERO_SEED}, GMRES(3) inv-k nu=3 W: {} (ref {REF_HETERO_GMRES} ± {HETERO_GMRES_ABS_BAND})", r.show()),
    );
    let cap = cap_for(REF_HETERO_JACOBI_NU8_V);
    let r = run(&sharp, Scheme::Bezier, CoarsenOn::Csl, 1, SmootherConfig::jacobi(4.5, 8), cap);
    t.check(
        "9-jacobi",
        r.ok() && within_rel(r.cycles as f64, REF_HETERO_JACOBI_NU8_V as f64, HETERO_JACOBI_REL_BAND),
        &format!("sharp (10,75) Jacobi nu=8 V: {} (ref {REF_HETERO_JACOBI_NU8_V} ± 30%)", r.show()),
    );
    let mut cmp = Vec::new();
    let mut ok = true;
    for range in [(10.0, 50.0), (10.0, 75.0)] {
        for nu in [4, 6, 8] {
            let go = |p| {
                let s = ProblemSpec::variable(range.0, range.1, p, HETERO_SEED);
                run(&s, Scheme::Bezier, CoarsenOn::Csl, 1, SmootherConfig::jacobi(4.5, nu), cap)
            };
            let (sm, sh) = (go(Profile::Smooth), go(Profile::Sharp));
            ok &= sm.ok() && sh.ok() && sh.cycles > sm.cycles;
            cmp.push(format!("{range:?} nu={nu}: smooth {} sharp {}", sm.show(), sh.show()));
        }
    }
    t.check("9-trend", ok, &format!("sharp Jacobi counts exceed smooth: {}", cmp.join(", ")));
}

fn criterion_10(t: &mut Tally) {
    // Transfer row sums and R = P^T/4.
    let mut rows_ok = true;
    let mut r_ok = true;
    for n in (3..=129).step_by(2) {
        for scheme in [Scheme::Linear, Scheme::Bezier] {
            let p = build_prolongation_1d(n, scheme).unwrap();
            for i in 0..n {
                let s: C64 = p.row(i).1.iter().sum();
                rows_ok &= (s - ONE).norm() < 1e-15;
            }
            if n <= 33 {
                let pair = build_transfer_2d(n, scheme).unwrap();
                let pt = pair.p.transpose();
                r_ok &= pair.r.nnz() == pt.nnz() && pair.r.iter().all(|(i, j, v)| v == pt.get(i, j) * 0.25);
            }
        }
    }
    t.invariant("10-rowsum", rows_ok, "prolongation rows sum to 1 for n = 3..129, both schemes");
    t.invariant("10-restriction", r_ok, "R equals P^T/4 entrywise for n <= 33");

    let mut worst: f64 = 0.0;
    for (k, n) in [(5.0, 9), (10.0, 17), (20.0, 33)] {
        let spec = ProblemSpec::constant(k).with_nodes(n);
        let field = build_wavenumber_field(&spec).unwrap();
        let a = helmholtz_mg::problem::assemble_helmholtz(&spec, &field, true).unwrap();
        for scheme in [Scheme::Linear, Scheme::Bezier] {
            let pair = build_transfer_2d(n, scheme).unwrap();
            let ac = galerkin_coarse(&a, &pair).unwrap().to_dense();
            let want = pair.r.to_dense().matmul(&a.to_dense()).matmul(&pair.p.to_dense());
            worst = worst.max(ac.relative_distance(&want));
        }
    }
    t.invariant("10-galerkin", worst <= GALERKIN_TOL, &format!("sparse RAP vs dense: {worst:.2e}"));

    let spec = ProblemSpec::constant(20.0);
    let field = build_wavenumber_field(&spec).unwrap();
    let a = helmholtz_mg::problem::assemble_helmholtz(&spec, &field, false).unwrap();
    let b = assemble_rhs(&spec).unwrap();
    let mut u = vec![ZERO; b.len()];
    let mut prev = norm2(&b);
    let mut mono = true;
    let mut res = vec![ZERO; b.len()];
    for _ in 0..20 {
        u = gmres_smooth(&a, &u, &b, 3).unwrap();
        a.residual_into(&u, &b, &mut res);
        let r = norm2(&res);
        mono &= r <= prev * (1.0 + 1e-12);
        prev = r;
    }
    t.invariant("10-gmres", mono, "GMRES(3) residual is non-increasing over 20 restarts");

    let mut rng = SplitMix64::new(5);
    let rv = |rng: &mut SplitMix64| -> Vec<C64> {
        (0..a.nrows()).map(|_| C64::new(rng.next_f64() - 0.5, rng.next_f64() - 0.5)).collect()
    };
    let (x, y, f) = (rv(&mut rng), rv(&mut rng), rv(&mut rng));
    let alpha = C64::new(0.7, -0.3);
    let xy: Vec<C64> = x.iter().zip(&y).map(|(p, q)| p + alpha * q).collect();
    let zero = vec![ZERO; x.len()];
    let lhs = jacobi_sweep(&a, &xy, &f, 4.5).unwrap();
    let (jx, jy) = (jacobi_sweep(&a, &x, &f, 4.5).unwrap(), jacobi_sweep(&a, &y, &zero, 4.5).unwrap());
    let diff: Vec<C64> = lhs.iter().zip(jx.iter().zip(&jy)).map(|(l, (p, q))| l - p - alpha * q).collect();
    t.invariant(
        "10-jacobi",
        norm2(&diff) <= 1e-13 * norm2(&lhs),
        "Jacobi sweep is affine: J(x + a*y, f) = J(x, f) + a*J(y, 0)",
    );

    let h = build_hierarchy(&spec, Scheme::Bezier, CoarsenOn::Csl).unwrap();
    let cfg = CycleConfig::new(1, SmootherConfig::gmres(3, 2));
    let base = solve(&h, &b, &cfg).unwrap();
    let scaled: Vec<C64> = b.iter().map(|v| v * C64::new(1e6, -3e5)).collect();
    let other = solve(&h, &scaled, &cfg).unwrap();
    t.invariant(
        "10-scaling",
        base.cycles == other.cycles,
        &format!("cycle count under RHS scaling: {} vs {}", base.cycles, other.cycles),
    );

    let case = BenchCase::hetero((10.0, 30.0), Profile::Sharp, 7, SmootherConfig::gmres(3, 2), 1, Shift::InverseK);
    let csv = |case: &BenchCase| {
        let row = case.run().unwrap();
        let mut buf = Vec::new();
        write_bench_csv(&[row], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        // Drop wall_ms, the only timing-dependent column.
        text.lines()
            .map(|l| l.split(',').enumerate().filter(|(i, _)| *i != 6).map(|(_, f)| f).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("\n")
    };
    let field_csv = |seed| {
        let s = ProblemSpec::variable(10.0, 30.0, Profile::Sharp, seed);
        let mut buf = Vec::new();
        build_wavenumber_field(&s).unwrap().write_csv(&mut buf).unwrap();
        buf
    };
    let same = csv(&case) == csv(&case) && field_csv(7) == field_csv(7) && field_csv(7) != field_csv(8);
    t.invariant("10-reproducible", same, "seeded field and bench CSV are byte-identical across runs (wall_ms excluded)");
}

fn main() {
    // libtest flags such as --nocapture are accepted and ignored.
    let only: Option<Vec<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let strict = std::env::var("ACCEPTANCE_STRICT").map_or(false, |v| v == "1");
    let wanted = |c: u32| only.as_ref().map_or(true, |o| o.contains(&c) || (c == 1 && o.contains(&2)));
    let mut t = Tally {
        pass: 0,
        fail: 0,
        hard: Vec::new(),
    };
    let start = Instant::now();
    let steps: [(u32, fn(&mut Tally)); 9] = [
        (1, criterion_1_and_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    for (c, f) in steps {
        if wanted(c) {
            let s = Instant::now();
            f(&mut t);
            println!("      criterion {c} done in {:.1}s", s.elapsed().as_secs_f64());
        }
    }
    println!(
        "acceptance: {} PASS, {} FAIL ({} invariant failures) in {:.0}s",
        t.pass,
        t.fail,
        t.hard.len(),
        start.elapsed().as_secs_f64()
    );
    if !t.hard.is_empty() || (strict && t.fail > 0) {
        std::process::exit(1);
    }
}
