//! Prints the two-grid norm/verdict table and the ω–ν ratio table as CSV.
//!
//! `cargo run --release --example certificate_tables [max_k]`

use std::time::Instant;

use helmholtz_mg::certificate::{
    norm_table, ratio_table, write_norm_table_csv, write_ratio_table_csv, SWEEP_NUS, SWEEP_OMEGAS,
    TABLE_WAVENUMBERS,
};
use helmholtz_mg::smoothing::DEFAULT_OMEGA;

fn main() -> helmholtz_mg::Result<()> {
    let max_k: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(30.0);
    let ks: Vec<f64> = TABLE_WAVENUMBERS.into_iter().filter(|&k| k <= max_k).collect();

    let t = Instant::now();
    let rows = norm_table(&ks, DEFAULT_OMEGA)?;
    write_norm_table_csv(&rows, std::io::stdout())?;
    for (_, reports) in &rows {
        for r in reports {
            for v in r.invariant_violations() {
                eprintln!("k={} {}/{}: {v}", r.k, r.scheme, r.coarsen_on);
            }
        }
    }
    eprintln!("norm table: {:.1?}", t.elapsed());

    let t = Instant::now();
    let rows = ratio_table(&ks, &SWEEP_OMEGAS, &SWEEP_NUS)?;
    write_ratio_table_csv(&rows, std::io::stdout())?;
    eprintln!("ratio table: {:.1?}", t.elapsed());
    Ok(())
}
