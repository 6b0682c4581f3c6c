//! Grid transfer operators between node-coincident grids (`n → (n + 1)/2`
//! nodes per dimension) and Galerkin coarse operators.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{sparse_triple_product, CsrMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Linear,
    /// Quadratic rational Bézier weights `(1, 6, 1)/8` at coincident nodes,
    /// linear interpolation in between.
    Bezier,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Linear => "linear",
            Scheme::Bezier => "bezier",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Scheme::Linear),
            "bezier" => Ok(Scheme::Bezier),
            other => Err(Error::InvalidConfig(format!("unknown transfer scheme '{other}'"))),
        }
    }
}

pub fn coarse_size(n_fine: usize) -> usize {
    n_fine.div_ceil(2)
}

/// `n_fine × (n_fine + 1)/2` prolongation in one dimension.
///
/// For the Bézier scheme the weight of a coarse neighbour that falls outside
/// the grid is added to the coincident node, so every row sums to one.
pub fn build_prolongation_1d(n_fine: usize, scheme: Scheme) -> Result<CsrMatrix> {
    if n_fine < 3 || n_fine.is_multiple_of(2) {
        return Err(Error::InvalidTransfer(format!(
            "fine grid needs an odd node count >= 3, got {n_fine}"
        )));
    }
    let m = coarse_size(n_fine);
    let w = |x: f64| C64::new(x, 0.0);
    let mut t = Vec::with_capacity(3 * n_fine);
    for i in 0..n_fine {
        if i % 2 == 1 {
            t.push((i, (i - 1) / 2, w(0.5)));
            t.push((i, i.div_ceil(2), w(0.5)));
            continue;
        }
        let j = i / 2;
        match scheme {
            Scheme::Linear => t.push((i, j, w(1.0))),
            Scheme::Bezier => {
                let mut centre = 0.75;
                for nb in [j.checked_sub(1), (j + 1 < m).then_some(j + 1)] {
                    match nb {
                        Some(c) => t.push((i, c, w(0.125))),
                        None => centre += 0.125,
                    }
                }
                t.push((i, j, w(centre)));
            }
        }
    }
    Ok(CsrMatrix::from_triplets(n_fine, m, t))
}

/// Prolongation `P` (coarse → fine) and restriction `R = ¼·Pᵀ` for one
/// level transition of the 2D tensor grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferPair {
    pub p: CsrMatrix,
    pub r: CsrMatrix,
    pub scheme: Scheme,
    pub n_fine: usize,
    pub n_coarse: usize,
}

pub fn build_transfer_2d(n_fine: usize, scheme: Scheme) -> Result<TransferPair> {
    let p1 = build_prolongation_1d(n_fine, scheme)?;
    // Lexicographic ordering with x fastest: index = j·n + i, so y is the
    // outer Kronecker factor.
    let p = p1.kron(&p1);
    let r = p.transpose().scaled(C64::new(0.25, 0.0));
    Ok(TransferPair {
        p,
        r,
        scheme,
        n_fine,
        n_coarse: coarse_size(n_fine),
    })
}

/// `R·A·P`.
pub fn galerkin_coarse(a: &CsrMatrix, pair: &TransferPair) -> Result<CsrMatrix> {
    sparse_triple_product(&pair.r, a, &pair.p)
}
