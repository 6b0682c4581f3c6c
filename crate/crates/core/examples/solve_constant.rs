//! Solves a constant-wavenumber problem with GMRES(3)-smoothed W-cycles and
//! prints the residual history.
//!
//! `cargo run --release --example solve_constant [k]`

use helmholtz_mg::mg::{build_hierarchy, solve, CoarsenOn, CycleConfig};
use helmholtz_mg::problem::{assemble_rhs, ProblemSpec, Shift};
use helmholtz_mg::smoothing::SmootherConfig;
use helmholtz_mg::transfer::Scheme;

fn main() -> helmholtz_mg::Result<()> {
    let k: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(100.0);
    let spec = ProblemSpec::constant(k).with_shift(Shift::InverseK);
    let h = build_hierarchy(&spec, Scheme::Bezier, CoarsenOn::Csl)?;
    println!("k = {k}, levels {:?}", h.nodes_per_level());

    let b = assemble_rhs(&spec)?;
    let cfg = CycleConfig::new(2, SmootherConfig::gmres(3, 3));
    let out = solve(&h, &b, &cfg)?;
    out.write_history_csv(std::io::stdout())?;
    println!("{} after {} cycles", out.status, out.cycles);
    Ok(())
}
