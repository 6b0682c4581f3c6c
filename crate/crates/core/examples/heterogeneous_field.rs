//! Builds a seeded heterogeneous wavenumber field, solves on it and writes
//! both the field and the solution as CSV.
//!
//! `cargo run --release --example heterogeneous_field [out_dir] [seed]`

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use helmholtz_mg::mg::{build_hierarchy, solve, CoarsenOn, CycleConfig};
use helmholtz_mg::problem::{
    assemble_rhs, build_wavenumber_field, write_solution_csv, Profile, ProblemSpec, Shift,
};
use helmholtz_mg::smoothing::SmootherConfig;
use helmholtz_mg::transfer::Scheme;

fn main() -> helmholtz_mg::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| ".".into()));
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let spec = ProblemSpec::variable(10.0, 50.0, Profile::Sharp, seed).with_shift(Shift::InverseK);
    let field = build_wavenumber_field(&spec)?;
    println!("n = {}, k in [{:.2}, {:.2}]", spec.nodes_per_dim, field.min(), field.max());
    field.write_csv(BufWriter::new(File::create(dir.join("wavenumber.csv"))?))?;

    let h = build_hierarchy(&spec, Scheme::Bezier, CoarsenOn::Csl)?;
    let out = solve(&h, &assemble_rhs(&spec)?, &CycleConfig::new(2, SmootherConfig::gmres(3, 3)))?;
    println!("{} in {} cycles", out.status, out.cycles);
    write_solution_csv(spec.nodes_per_dim, &out.u, BufWriter::new(File::create(dir.join("solution.csv"))?))?;
    println!("wrote wavenumber.csv and solution.csv to {}", dir.display());
    Ok(())
}
