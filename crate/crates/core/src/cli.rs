//! Command-line front end: `solve`, `certify` and `bench`.
//!
//! Problem and cycle settings resolve in three layers: built-in defaults,
//! then a `key = value` file given with `--config`, then flags. Config keys
//! are the flag names without the leading dashes.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::certificate::{
    certify, norm_table, ratio_table, write_norm_table_csv, write_ratio_table_csv, TwoGridConfig,
    REPORT_CSV_HEADER, SWEEP_NUS, SWEEP_OMEGAS, TABLE_WAVENUMBERS,
};
use crate::error::{Error, Result};
use crate::mg::{
    build_hierarchy, solve, CoarsenOn, CycleConfig, SolveStatus, DEFAULT_MAX_CYCLES, DEFAULT_TOL,
};
use crate::presets::{preset, regress, run_cases, write_bench_csv, DEFAULT_SEED};
use crate::problem::{
    assemble_rhs, nodes_for_wavenumber, parse_key_values, write_solution_csv, Profile, ProblemSpec,
    Shift, DEFAULT_KH,
};
use crate::smoothing::{SmootherConfig, DEFAULT_GMRES_RESTART, DEFAULT_OMEGA};
use crate::transfer::Scheme;

pub const EXIT_OK: i32 = 0;
/// Runtime failure that is not covered by a more specific code (I/O, a
/// regression band violation).
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "helmholtz-mg", version, about = "Multigrid for the 2D Helmholtz equation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one problem and report cycles to convergence.
    Solve(SolveArgs),
    /// Two-grid convergence certificate for one configuration or a full table.
    Certify(CertifyArgs),
    /// Run an experiment preset and emit one CSV row per configuration.
    Bench(BenchArgs),
}

#[derive(Debug, Args, Default)]
pub struct SettingArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    #[arg(long)]
    pub k_min: Option<String>,
    #[arg(long)]
    pub k_max: Option<String>,
    #[arg(long, value_parser = ["constant", "smooth", "sharp"])]
    pub profile: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Target k·h; the grid is the smallest odd node count meeting it.
    #[arg(long)]
    pub ppw: Option<String>,
    /// Explicit nodes per dimension; overrides --ppw.
    #[arg(long)]
    pub nodes: Option<String>,
    #[arg(long, value_parser = ["linear", "bezier"])]
    pub transfer: Option<String>,
    #[arg(long, value_parser = ["csl", "original"])]
    pub coarsen_on: Option<String>,
    /// A non-negative number, `inv-k` or `zero`.
    #[arg(long)]
    pub shift: Option<String>,
    #[arg(long, value_parser = ["jacobi", "gmres3"])]
    pub smoother: Option<String>,
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long)]
    pub nu: Option<String>,
    #[arg(long)]
    pub nu_pre: Option<String>,
    #[arg(long, value_parser = ["v", "w"])]
    pub cycle: Option<String>,
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long)]
    pub max_cycles: Option<String>,
    /// `key = value` file; flags take precedence over its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    pub dump_config: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub settings: SettingArgs,
    /// Residual history CSV (`cycle,relres`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Solution field CSV (`x,y,re,im`).
    #[arg(long)]
    pub field_dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub settings: SettingArgs,
    /// Emit a full table instead of a single report.
    #[arg(long, value_parser = ["conv1", "opt1"])]
    pub table: Option<String>,
    /// Largest wavenumber included in `--table`.
    #[arg(long, default_value_t = 30.0)]
    pub table_k_max: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    pub preset: String,
    /// Compare against the bundled reference counts; exit 1 on violation.
    #[arg(long)]
    pub regress: bool,
    /// Worker threads; defaults to the number of available cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmootherName {
    Jacobi,
    Gmres3,
}

/// Fully resolved problem, hierarchy and cycle settings.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub k: Option<f64>,
    pub k_min: Option<f64>,
    pub k_max: Option<f64>,
    pub profile: Option<Profile>,
    pub seed: u64,
    pub ppw: f64,
    pub nodes: Option<usize>,
    pub transfer: Scheme,
    pub coarsen_on: CoarsenOn,
    pub shift: Shift,
    pub smoother: SmootherName,
    pub omega: f64,
    pub nu: usize,
    pub nu_pre: usize,
    pub gamma: usize,
    pub tol: f64,
    pub max_cycles: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            k: None,
            k_min: None,
            k_max: None,
            profile: None,
            seed: DEFAULT_SEED,
            ppw: DEFAULT_KH,
            nodes: None,
            transfer: Scheme::Bezier,
            coarsen_on: CoarsenOn::Csl,
            shift: Shift::Fixed(0.7),
            smoother: SmootherName::Jacobi,
            omega: DEFAULT_OMEGA,
            nu: 1,
            nu_pre: 0,
            gamma: 1,
            tol: DEFAULT_TOL,
            max_cycles: DEFAULT_MAX_CYCLES,
        }
    }
}

const WAVENUMBER_KEYS: [&str; 3] = ["k", "k-min", "k-max"];

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| usage(format!("--{key}: cannot parse '{v}'")))
}

impl RunConfig {
    fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "k" => self.k = Some(parse_num(key, v)?),
            "k-min" => self.k_min = Some(parse_num(key, v)?),
            "k-max" => self.k_max = Some(parse_num(key, v)?),
            "profile" => {
                self.profile = match v {
                    "constant" => None,
                    "smooth" => Some(Profile::Smooth),
                    "sharp" => Some(Profile::Sharp),
                    other => return Err(usage(format!("unknown profile '{other}'"))),
                }
            }
            "seed" => self.seed = parse_num(key, v)?,
            "ppw" => self.ppw = parse_num(key, v)?,
            "nodes" => self.nodes = Some(parse_num(key, v)?),
            "transfer" => self.transfer = v.parse()?,
            "coarsen-on" => self.coarsen_on = v.parse()?,
            "shift" => self.shift = v.parse()?,
            "smoother" => {
                self.smoother = match v {
                    "jacobi" => SmootherName::Jacobi,
                    "gmres3" => SmootherName::Gmres3,
                    other => return Err(usage(format!("unknown smoother '{other}'"))),
                }
            }
            "omega" => self.omega = parse_num(key, v)?,
            "nu" => self.nu = parse_num(key, v)?,
            "nu-pre" => self.nu_pre = parse_num(key, v)?,
            "cycle" => {
                self.gamma = match v {
                    "v" => 1,
                    "w" => 2,
                    other => return Err(usage(format!("unknown cycle '{other}'"))),
                }
            }
            "tol" => self.tol = parse_num(key, v)?,
            "max-cycles" => self.max_cycles = parse_num(key, v)?,
            other => return Err(usage(format!("unknown setting '{other}'"))),
        }
        Ok(())
    }

    /// Applies config-file entries, then flags. Wavenumber keys from the
    /// flags replace those of the file as a group, so `--k` on the command
    /// line is not combined with a `k-min` from the file.
    pub fn resolve(file: &[(String, String)], flags: &[(String, String)]) -> Result<Self> {
        let mut cfg = Self::default();
        let norm = |k: &str| k.trim().replace('_', "-");
        let flags_set_k = flags.iter().any(|(k, _)| WAVENUMBER_KEYS.contains(&norm(k).as_str()));
        for (k, v) in file {
            let k = norm(k);
            if flags_set_k && WAVENUMBER_KEYS.contains(&k.as_str()) {
                continue;
            }
            cfg.set(&k, v)?;
        }
        for (k, v) in flags {
            cfg.set(&norm(k), v)?;
        }
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        let range = self.k_min.is_some() || self.k_max.is_some();
        if self.k.is_some() && range {
            return Err(usage("--k cannot be combined with --k-min/--k-max"));
        }
        if range && (self.k_min.is_none() || self.k_max.is_none()) {
            return Err(usage("--k-min and --k-max must be given together"));
        }
        if self.k.is_some() && self.profile.is_some() {
            return Err(usage("a smooth or sharp profile needs --k-min/--k-max"));
        }
        if !(self.ppw > 0.0) {
            return Err(usage(format!("--ppw must be positive, got {}", self.ppw)));
        }
        Ok(())
    }

    pub fn problem(&self) -> Result<ProblemSpec> {
        let spec = match (self.k, self.k_min, self.k_max) {
            (Some(k), _, _) => ProblemSpec::constant(k),
            (None, Some(lo), Some(hi)) => {
                ProblemSpec::variable(lo, hi, self.profile.unwrap_or(Profile::Smooth), self.seed)
            }
            _ => return Err(usage("a wavenumber is required: --k or --k-min/--k-max")),
        };
        let n = self
            .nodes
            .unwrap_or_else(|| nodes_for_wavenumber(spec.wavenumber.k_max(), self.ppw));
        let mut spec = spec.with_nodes(n).with_shift(self.shift);
        spec.seed = self.seed;
        spec.validate()?;
        Ok(spec)
    }

    pub fn cycle(&self) -> Result<CycleConfig> {
        let mut smoother = match self.smoother {
            SmootherName::Jacobi => SmootherConfig::jacobi(self.omega, self.nu),
            SmootherName::Gmres3 => SmootherConfig::gmres(DEFAULT_GMRES_RESTART, self.nu),
        };
        smoother.nu_pre = self.nu_pre;
        let cfg = CycleConfig {
            tol: self.tol,
            max_cycles: self.max_cycles,
            ..CycleConfig::new(self.gamma, smoother)
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Config-file form; feeding it back through `--config` reproduces `self`.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        if let Some(k) = self.k {
            put("k", k.to_string());
        }
        if let (Some(lo), Some(hi)) = (self.k_min, self.k_max) {
            put("k-min", lo.to_string());
            put("k-max", hi.to_string());
        }
        let profile = match self.profile {
            None => "constant",
            Some(Profile::Smooth) => "smooth",
            Some(Profile::Sharp) => "sharp",
        };
        put("profile", profile.into());
        put("seed", self.seed.to_string());
        put("ppw", self.ppw.to_string());
        if let Some(n) = self.nodes {
            put("nodes", n.to_string());
        }
        put("transfer", self.transfer.to_string());
        put("coarsen-on", self.coarsen_on.to_string());
        put("shift", self.shift.to_string());
        let smoother = match self.smoother {
            SmootherName::Jacobi => "jacobi",
            SmootherName::Gmres3 => "gmres3",
        };
        put("smoother", smoother.into());
        put("omega", self.omega.to_string());
        put("nu", self.nu.to_string());
        put("nu-pre", self.nu_pre.to_string());
        put("cycle", if self.gamma == 2 { "w" } else { "v" }.into());
        put("tol", self.tol.to_string());
        put("max-cycles", self.max_cycles.to_string());
        s
    }
}

impl SettingArgs {
    fn flag_pairs(&self) -> Vec<(String, String)> {
        let fields = [
            ("k", &self.k),
            ("k-min", &self.k_min),
            ("k-max", &self.k_max),
            ("profile", &self.profile),
            ("seed", &self.seed),
            ("ppw", &self.ppw),
            ("nodes", &self.nodes),
            ("transfer", &self.transfer),
            ("coarsen-on", &self.coarsen_on),
            ("shift", &self.shift),
            ("smoother", &self.smoother),
            ("omega", &self.omega),
            ("nu", &self.nu),
            ("nu-pre", &self.nu_pre),
            ("cycle", &self.cycle),
            ("tol", &self.tol),
            ("max-cycles", &self.max_cycles),
        ];
        fields
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }

    pub fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => parse_key_values(&std::fs::read_to_string(path)?)?,
            None => Vec::new(),
        };
        RunConfig::resolve(&file, &self.flag_pairs())
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidConfig(_)
        | Error::InvalidProblem(_)
        | Error::InvalidTransfer(_)
        | Error::Parse { .. } => EXIT_USAGE,
        Error::DenseLimit { .. } => EXIT_RESOURCE,
        _ => EXIT_FAILURE,
    }
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn cmd_solve(args: &SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = args.settings.resolve()?;
    if args.settings.dump_config {
        write!(out, "{}", cfg.to_config_string())?;
        return Ok(EXIT_OK);
    }
    let spec = cfg.problem()?;
    let cycle = cfg.cycle()?;
    let h = build_hierarchy(&spec, cfg.transfer, cfg.coarsen_on)?;
    let b = assemble_rhs(&spec)?;
    let res = solve(&h, &b, &cycle)?;
    if let Some(path) = &args.out {
        res.write_history_csv(create(path)?)?;
    }
    if let Some(path) = &args.field_dump {
        write_solution_csv(spec.nodes_per_dim, &res.u, create(path)?)?;
    }
    writeln!(
        out,
        "n={} levels={} cycles={} relres={:.3e} status={}",
        spec.nodes_per_dim,
        h.num_levels(),
        res.cycles,
        res.final_relres(),
        res.status
    )?;
    if res.status == SolveStatus::Diverged {
        writeln!(
            err,
            "diverged: relative residual {:.3e} after {} cycles",
            res.final_relres(),
            res.cycles
        )?;
        return Ok(EXIT_DIVERGED);
    }
    Ok(EXIT_OK)
}

fn cmd_certify(args: &CertifyArgs, out: &mut dyn Write) -> Result<i32> {
    let s = &args.settings;
    if let Some(table) = &args.table {
        if s.k.is_some() || s.k_min.is_some() || s.k_max.is_some() {
            return Err(usage("--table runs a fixed wavenumber list; drop --k"));
        }
        let ks: Vec<f64> = TABLE_WAVENUMBERS
            .into_iter()
            .filter(|&k| k <= args.table_k_max)
            .collect();
        let mut text = Vec::new();
        if table == "conv1" {
            let omega = s.resolve()?.omega;
            write_norm_table_csv(&norm_table(&ks, omega)?, &mut text)?;
        } else {
            write_ratio_table_csv(&ratio_table(&ks, &SWEEP_OMEGAS, &SWEEP_NUS)?, &mut text)?;
        }
        match &args.out {
            Some(path) => create(path)?.write_all(&text)?,
            None => out.write_all(&text)?,
        }
        return Ok(EXIT_OK);
    }
    let cfg = s.resolve()?;
    if s.dump_config {
        write!(out, "{}", cfg.to_config_string())?;
        return Ok(EXIT_OK);
    }
    if cfg.smoother != SmootherName::Jacobi {
        return Err(usage("the certificate is defined for the Jacobi smoother only"));
    }
    let spec = cfg.problem()?;
    let tg = TwoGridConfig::from_problem(&spec, cfg.transfer, cfg.coarsen_on)?.with_smoothing(cfg.omega, cfg.nu);
    let report = certify(&tg)?;
    writeln!(out, "{report}")?;
    if let Some(path) = &args.out {
        let mut f = create(path)?;
        writeln!(f, "{REPORT_CSV_HEADER}")?;
        writeln!(f, "{}", report.csv_row())?;
    }
    Ok(EXIT_OK)
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let p = preset(&args.preset, args.seed)?;
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let rows = run_cases(&p.cases, jobs)?;
    match &args.out {
        Some(path) => write_bench_csv(&rows, create(path)?)?,
        None => write_bench_csv(&rows, &mut *out)?,
    }
    if !args.regress {
        return Ok(EXIT_OK);
    }
    let violations = regress(&p, &rows);
    for v in &violations {
        writeln!(
            err,
            "regression: {} nu={} gamma={}: {} cycles ({}), expected {} ± {:.0} [{}]",
            v.row.label, v.row.nu, v.row.gamma, v.row.cycles, v.row.status, v.expected, v.width, v.source
        )?;
    }
    writeln!(err, "{}: {} of {} reference cells out of band", p.name, violations.len(), p.expected.len())?;
    Ok(if violations.is_empty() { EXIT_OK } else { EXIT_FAILURE })
}

/// Parses `argv` and runs the command. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, out, err),
        Command::Certify(a) => cmd_certify(a, out),
        Command::Bench(a) => cmd_bench(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(items: &[(&str, &str)]) -> Vec<(String, String)> {
        items.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn flags_override_file_which_overrides_defaults() {
        let file = pairs(&[("k", "20"), ("nu", "3"), ("max_cycles", "7")]);
        let flags = pairs(&[("nu", "5")]);
        let cfg = RunConfig::resolve(&file, &flags).unwrap();
        assert_eq!((cfg.k, cfg.nu, cfg.max_cycles), (Some(20.0), 5, 7));
        assert_eq!(cfg.omega, DEFAULT_OMEGA);
    }

    #[test]
    fn flag_wavenumber_replaces_file_wavenumber() {
        let file = pairs(&[("k", "20")]);
        let flags = pairs(&[("k-min", "10"), ("k-max", "50"), ("profile", "sharp")]);
        let cfg = RunConfig::resolve(&file, &flags).unwrap();
        assert_eq!(cfg.k, None);
        assert_eq!(cfg.profile, Some(Profile::Sharp));
    }

    #[test]
    fn conflicting_wavenumbers_are_usage_errors() {
        for flags in [
            pairs(&[("k", "5"), ("k-min", "2")]),
            pairs(&[("k-min", "2")]),
            pairs(&[("k", "5"), ("profile", "smooth")]),
            pairs(&[("nu", "x")]),
            pairs(&[("bogus", "1")]),
        ] {
            let e = RunConfig::resolve(&[], &flags).unwrap_err();
            assert_eq!(exit_code(&e), EXIT_USAGE, "{flags:?}");
        }
    }

    #[test]
    fn dump_round_trips() {
        let flags = pairs(&[("k-min", "10"), ("k-max", "75"), ("profile", "sharp"), ("shift", "inv-k"), ("cycle", "w")]);
        let cfg = RunConfig::resolve(&[], &flags).unwrap();
        let text = cfg.to_config_string();
        let back = RunConfig::resolve(&parse_key_values(&text).unwrap(), &[]).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn problem_grid_follows_ppw_or_nodes() {
        let cfg = RunConfig::resolve(&[], &pairs(&[("k", "50")])).unwrap();
        assert_eq!(cfg.problem().unwrap().nodes_per_dim, 81);
        let cfg = RunConfig::resolve(&[], &pairs(&[("k", "50"), ("ppw", "0.3125")])).unwrap();
        assert_eq!(cfg.problem().unwrap().nodes_per_dim, 161);
        let cfg = RunConfig::resolve(&[], &pairs(&[("k", "5"), ("nodes", "33")])).unwrap();
        assert_eq!(cfg.problem().unwrap().nodes_per_dim, 33);
        assert!(RunConfig::default().problem().is_err());
    }

    #[test]
    fn run_reports_exit_codes() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["helmholtz-mg", "solve", "--k", "5", "--k-min", "1"], &mut o, &mut e), EXIT_USAGE);
        assert_eq!(run(["helmholtz-mg", "frobnicate"], &mut o, &mut e), EXIT_USAGE);
        assert_eq!(run(["helmholtz-mg", "bench", "nope"], &mut o, &mut e), EXIT_USAGE);
        assert_eq!(run(["helmholtz-mg", "certify", "--k", "50"], &mut o, &mut e), EXIT_RESOURCE);
        o.clear();
        assert_eq!(run(["helmholtz-mg", "solve", "--k", "10", "--smoother", "gmres3", "--nu", "2"], &mut o, &mut e), EXIT_OK);
        let text = String::from_utf8(o).unwrap();
        assert!(text.contains("status=converged"), "{text}");
    }
}
