//! Named experiment grids, the bundled reference cycle counts and the
//! regression check against them.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mg::{build_hierarchy, solve, CoarsenOn, CycleConfig, SolveStatus};
use crate::problem::{assemble_rhs, nodes_for_wavenumber, Profile, ProblemSpec, Shift, DEFAULT_KH};
use crate::smoothing::{SmootherConfig, DEFAULT_GMRES_RESTART, DEFAULT_OMEGA};
use crate::transfer::Scheme;

/// Reference counts, one row per table cell:
/// `preset,source,k,nu,gamma,cycles`.
pub const EXPECTED_DATA: &str = include_str!("../data/expected_cycles.csv");

pub const BENCH_CSV_HEADER: &str = "k,nu,gamma,smoother,shift,cycles,wall_ms,converged";

pub const CONSTANT_WAVENUMBERS: [f64; 5] = [50.0, 100.0, 150.0, 200.0, 250.0];
pub const HETERO_RANGES: [(f64, f64); 2] = [(10.0, 50.0), (10.0, 75.0)];
pub const DEFAULT_SEED: u64 = 1;

pub const PRESET_NAMES: [&str; 7] = [
    "h-independence",
    "constant-jacobi",
    "constant-gmres",
    "constant-gmres-invk",
    "hetero-smooth-jacobi",
    "hetero-sharp-jacobi",
    "hetero-sharp-gmres",
];

/// Accepted deviation from a reference count: `max(rel·expected, abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub rel: f64,
    pub abs: f64,
}

pub const JACOBI_BAND: Band = Band { rel: 0.25, abs: 3.0 };
pub const GMRES_BAND: Band = Band { rel: 0.30, abs: 3.0 };

impl Band {
    pub fn width(&self, expected: usize) -> f64 {
        (self.rel * expected as f64).max(self.abs)
    }

    pub fn allows(&self, expected: usize, got: usize) -> bool {
        (got as f64 - expected as f64).abs() <= self.width(expected)
    }
}

#[derive(Debug, Clone)]
pub struct BenchCase {
    /// Value of the `k` column: `50`, `10-75` or `15@h=2^-7`.
    pub label: String,
    pub spec: ProblemSpec,
    pub scheme: Scheme,
    pub coarsen_on: CoarsenOn,
    pub cycle: CycleConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub label: String,
    pub nu: usize,
    pub gamma: usize,
    pub smoother: String,
    pub shift: String,
    pub cycles: usize,
    pub wall_ms: f64,
    pub status: SolveStatus,
}

impl BenchRow {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.1},{}",
            self.label,
            self.nu,
            self.gamma,
            self.smoother,
            self.shift,
            self.cycles,
            self.wall_ms,
            self.converged()
        )
    }
}

impl BenchCase {
    pub fn constant(k: f64, smoother: SmootherConfig, gamma: usize, shift: Shift) -> Self {
        Self {
            label: format!("{k}"),
            spec: ProblemSpec::constant(k).with_shift(shift),
            scheme: Scheme::Bezier,
            coarsen_on: CoarsenOn::Csl,
            cycle: CycleConfig::new(gamma, smoother),
        }
    }

    pub fn hetero(range: (f64, f64), profile: Profile, seed: u64, smoother: SmootherConfig, gamma: usize, shift: Shift) -> Self {
        Self {
            label: format!("{}-{}", range.0, range.1),
            spec: ProblemSpec::variable(range.0, range.1, profile, seed).with_shift(shift),
            scheme: Scheme::Bezier,
            coarsen_on: CoarsenOn::Csl,
            cycle: CycleConfig::new(gamma, smoother),
        }
    }

    pub fn run(&self) -> Result<BenchRow> {
        let start = Instant::now();
        let h = build_hierarchy(&self.spec, self.scheme, self.coarsen_on)?;
        let b = assemble_rhs(&self.spec)?;
        let out = solve(&h, &b, &self.cycle)?;
        Ok(BenchRow {
            label: self.label.clone(),
            nu: self.cycle.smoother.nu,
            gamma: self.cycle.gamma,
            smoother: self.cycle.smoother.kind.to_string(),
            shift: self.spec.shift.to_string(),
            cycles: out.cycles,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
            status: out.status,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedCount {
    pub preset: String,
    /// Which reference table the value comes from.
    pub source: String,
    pub label: String,
    pub nu: usize,
    pub gamma: usize,
    pub cycles: usize,
}

/// Parses the reference data. Rows without a source tag are rejected.
pub fn parse_expected(text: &str) -> Result<Vec<ExpectedCount>> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate().skip(1) {
        let line_no = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = |msg: String| Error::Parse { line: line_no, msg };
        if f.len() != 6 {
            return Err(bad(format!("expected 6 fields, found {}", f.len())));
        }
        if f[1].is_empty() {
            return Err(bad("entry has no source tag".into()));
        }
        let num = |s: &str, what: &str| s.parse::<usize>().map_err(|_| bad(format!("bad {what} '{s}'")));
        out.push(ExpectedCount {
            preset: f[0].to_string(),
            source: f[1].to_string(),
            label: f[2].to_string(),
            nu: num(f[3], "nu")?,
            gamma: num(f[4], "gamma")?,
            cycles: num(f[5], "cycles")?,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct ExperimentPreset {
    pub name: &'static str,
    pub band: Band,
    pub cases: Vec<BenchCase>,
    pub expected: Vec<ExpectedCount>,
}

fn jacobi(nu: usize) -> SmootherConfig {
    SmootherConfig::jacobi(DEFAULT_OMEGA, nu)
}

fn gmres(nu: usize) -> SmootherConfig {
    SmootherConfig::gmres(DEFAULT_GMRES_RESTART, nu)
}

/// Builds a preset; `seed` only affects heterogeneous ones.
pub fn preset(name: &str, seed: u64) -> Result<ExperimentPreset> {
    let mut cases = Vec::new();
    let band;
    match name {
        "h-independence" => {
            band = JACOBI_BAND;
            for k in [15.0, 30.0] {
                for nu in [1, 2, 4] {
                    for p in 5..=9 {
                        let n = (1usize << p) + 1;
                        if n < nodes_for_wavenumber(k, DEFAULT_KH) {
                            continue;
                        }
                        cases.push(BenchCase {
                            label: format!("{k}@h=2^-{p}"),
                            spec: ProblemSpec::constant(k).with_nodes(n),
                            scheme: Scheme::Bezier,
                            coarsen_on: CoarsenOn::Csl,
                            cycle: CycleConfig::new(1, jacobi(nu)),
                        });
                    }
                }
            }
        }
        "constant-jacobi" | "constant-gmres" | "constant-gmres-invk" => {
            let (nus, smoother, shift): (Vec<usize>, fn(usize) -> SmootherConfig, Shift) = match name {
                "constant-jacobi" => ((4..=8).collect(), jacobi, Shift::Fixed(0.7)),
                "constant-gmres" => ((1..=5).collect(), gmres, Shift::Fixed(0.7)),
                _ => ((1..=5).collect(), gmres, Shift::InverseK),
            };
            band = if name == "constant-jacobi" { JACOBI_BAND } else { GMRES_BAND };
            for &k in &CONSTANT_WAVENUMBERS {
                for &nu in &nus {
                    for gamma in [1, 2] {
                        cases.push(BenchCase::constant(k, smoother(nu), gamma, shift));
                    }
                }
            }
        }
        "hetero-smooth-jacobi" | "hetero-sharp-jacobi" | "hetero-sharp-gmres" => {
            let (profile, nus, smoother, shift): (_, Vec<usize>, fn(usize) -> SmootherConfig, _) = match name {
                "hetero-smooth-jacobi" => (Profile::Smooth, (4..=8).collect(), jacobi, Shift::Fixed(0.7)),
                "hetero-sharp-jacobi" => (Profile::Sharp, (4..=8).collect(), jacobi, Shift::Fixed(0.7)),
                _ => (Profile::Sharp, (1..=5).collect(), gmres, Shift::InverseK),
            };
            band = if name == "hetero-sharp-gmres" { GMRES_BAND } else { JACOBI_BAND };
            for &range in &HETERO_RANGES {
                for &nu in &nus {
                    for gamma in [1, 2] {
                        cases.push(BenchCase::hetero(range, profile, seed, smoother(nu), gamma, shift));
                    }
                }
            }
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown preset '{other}' (available: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    }
    let expected = parse_expected(EXPECTED_DATA)?
        .into_iter()
        .filter(|e| e.preset == name)
        .collect();
    let name = PRESET_NAMES.iter().find(|&&n| n == name).copied().unwrap_or("custom");
    Ok(ExperimentPreset {
        name,
        band,
        cases,
        expected,
    })
}

/// Runs all cases on `jobs` worker threads; rows come back in case order.
pub fn run_cases(cases: &[BenchCase], jobs: usize) -> Result<Vec<BenchRow>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| cases.par_iter().map(BenchCase::run).collect())
}

pub fn write_bench_csv<W: Write>(rows: &[BenchRow], mut out: W) -> Result<()> {
    writeln!(out, "{BENCH_CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub row: BenchRow,
    pub expected: usize,
    pub width: f64,
    pub source: String,
}

/// Rows that have a reference value and miss it by more than the band,
/// or did not converge.
pub fn regress(preset: &ExperimentPreset, rows: &[BenchRow]) -> Vec<Violation> {
    rows.iter()
        .filter_map(|r| {
            let e = preset
                .expected
                .iter()
                .find(|e| e.label == r.label && e.nu == r.nu && e.gamma == r.gamma)?;
            let ok = r.converged() && preset.band.allows(e.cycles, r.cycles);
            (!ok).then(|| Violation {
                row: r.clone(),
                expected: e.cycles,
                width: preset.band.width(e.cycles),
                source: e.source.clone(),
            })
        })
        .collect()
}
