//! Matrix Market coordinate I/O.
//!
//! Writing always produces `complex general` with one `row col re im` line
//! per stored entry (1-based indices). Reading also accepts `real` and
//! `integer` fields and the `symmetric` / `hermitian` symmetry flags.

use std::io::{BufRead, Write};

use super::sparse::CsrMatrix;
use super::C64;
use crate::error::{Error, Result};

pub const HEADER: &str = "%%MatrixMarket matrix coordinate complex general";

pub fn write_matrix_market<W: Write>(m: &CsrMatrix, mut out: W) -> Result<()> {
    writeln!(out, "{HEADER}")?;
    writeln!(out, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (i, j, v) in m.iter() {
        writeln!(out, "{} {} {:e} {:e}", i + 1, j + 1, v.re, v.im)?;
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    Real,
    Complex,
}

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
}

pub fn read_matrix_market<R: BufRead>(input: R) -> Result<CsrMatrix> {
    let mut lines = input.lines().enumerate();
    let parse_err = |line: usize, msg: &str| Error::Parse {
        line: line + 1,
        msg: msg.to_string(),
    };

    let (lno, header) = lines
        .next()
        .ok_or_else(|| parse_err(0, "empty input"))?;
    let header = header?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(lno, "missing %%MatrixMarket matrix header"));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(lno, "only coordinate format is supported"));
    }
    let field = match tokens[3].as_str() {
        "complex" => Field::Complex,
        "real" | "integer" => Field::Real,
        other => return Err(parse_err(lno, &format!("unsupported field '{other}'"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(parse_err(lno, &format!("unsupported symmetry '{other}'"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (lno, line) in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let Some((nrows, ncols, _)) = size else {
            if parts.len() != 3 {
                return Err(parse_err(lno, "expected 'rows cols nnz'"));
            }
            let p = |s: &str| s.parse::<usize>().map_err(|e| parse_err(lno, &e.to_string()));
            size = Some((p(parts[0])?, p(parts[1])?, p(parts[2])?));
            continue;
        };
        let want = if field == Field::Complex { 4 } else { 3 };
        if parts.len() != want {
            return Err(parse_err(lno, &format!("expected {want} fields")));
        }
        let idx = |s: &str| -> Result<usize> {
            let v = s.parse::<usize>().map_err(|e| parse_err(lno, &e.to_string()))?;
            if v == 0 {
                return Err(parse_err(lno, "indices are 1-based"));
            }
            Ok(v - 1)
        };
        let num = |s: &str| s.parse::<f64>().map_err(|e| parse_err(lno, &e.to_string()));
        let (i, j) = (idx(parts[0])?, idx(parts[1])?);
        if i >= nrows || j >= ncols {
            return Err(parse_err(lno, "index out of range"));
        }
        let v = match field {
            Field::Complex => C64::new(num(parts[2])?, num(parts[3])?),
            Field::Real => C64::new(num(parts[2])?, 0.0),
        };
        triplets.push((i, j, v));
        if i != j {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => triplets.push((j, i, v)),
                Symmetry::Hermitian => triplets.push((j, i, v.conj())),
            }
        }
    }
    let (nrows, ncols, nnz) = size.ok_or_else(|| parse_err(0, "missing size line"))?;
    let stored = if symmetry == Symmetry::General {
        triplets.len()
    } else {
        triplets.iter().filter(|(i, j, _)| i >= j).count()
    };
    if stored != nnz {
        return Err(parse_err(0, &format!("declared {nnz} entries, found {stored}")));
    }
    Ok(CsrMatrix::from_triplets(nrows, ncols, triplets))
}
