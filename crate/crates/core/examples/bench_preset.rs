//! Runs the first cases of a preset and checks them against the bundled
//! reference counts.
//!
//! `cargo run --release --example bench_preset [preset] [cases]`

use helmholtz_mg::presets::{preset, regress, run_cases, write_bench_csv};

fn main() -> helmholtz_mg::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "constant-gmres-invk".into());
    let take: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(6);

    let p = preset(&name, 1)?;
    let cases: Vec<_> = p.cases.iter().take(take).cloned().collect();
    let rows = run_cases(&cases, 1)?;
    write_bench_csv(&rows, std::io::stdout())?;
    for v in regress(&p, &rows) {
        println!("out of band: {} nu={} gamma={}: {} vs {} ± {:.0}", v.row.label, v.row.nu, v.row.gamma, v.row.cycles, v.expected, v.width);
    }
    Ok(())
}
