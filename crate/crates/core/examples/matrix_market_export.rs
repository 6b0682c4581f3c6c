//! Writes the fine operator and one transfer pair in Matrix Market format
//! and reads them back.
//!
//! `cargo run --release --example matrix_market_export [out_dir]`

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;

use helmholtz_mg::linalg::mtx::{read_matrix_market, write_matrix_market};
use helmholtz_mg::problem::{assemble_helmholtz, build_wavenumber_field, ProblemSpec};
use helmholtz_mg::transfer::{build_transfer_2d, Scheme};

fn main() -> helmholtz_mg::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let spec = ProblemSpec::constant(10.0);
    let a = assemble_helmholtz(&spec, &build_wavenumber_field(&spec)?, false)?;
    let pair = build_transfer_2d(spec.nodes_per_dim, Scheme::Bezier)?;

    for (name, m) in [("A.mtx", &a), ("P.mtx", &pair.p), ("R.mtx", &pair.r)] {
        let path = dir.join(name);
        write_matrix_market(m, BufWriter::new(File::create(&path)?))?;
        let back = read_matrix_market(BufReader::new(File::open(&path)?))?;
        let same = back.to_dense().relative_distance(&m.to_dense()) == 0.0;
        println!("{}: {}x{}, {} nonzeros, round trip exact: {same}", path.display(), m.nrows(), m.ncols(), m.nnz());
    }
    Ok(())
}
