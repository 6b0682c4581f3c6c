//! Two-grid certificate for one configuration, followed by the same
//! configuration with the standard transfer, for comparison.
//!
//! `cargo run --release --example certify_config [k]`

use helmholtz_mg::certificate::{certify, TwoGridConfig};
use helmholtz_mg::mg::CoarsenOn;
use helmholtz_mg::transfer::Scheme;

fn main() -> helmholtz_mg::Result<()> {
    let k: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10.0);
    for scheme in [Scheme::Bezier, Scheme::Linear] {
        let cfg = TwoGridConfig::for_wavenumber(k, scheme, CoarsenOn::Csl)?.with_smoothing(4.5, 1);
        println!("{}\n", certify(&cfg)?);
    }
    Ok(())
}
