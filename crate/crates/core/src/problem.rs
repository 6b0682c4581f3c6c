//! Model problems on the unit square: constant or heterogeneous wavenumber,
//! point source at the centre, first-order Sommerfeld radiation boundary.
//!
//! All `n × n` grid nodes (boundary included) are unknowns, ordered
//! lexicographically with `x` running fastest, so node `(i, j)` with
//! `x = i·h`, `y = j·h` has index `j·n + i` and `h = 1/(n − 1)`.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, SplitMix64, C64, ZERO};

/// Largest admissible `k·h` (ten points per wavelength).
pub const DEFAULT_KH: f64 = 0.625;
const KH_SLACK: f64 = 1e-12;

/// Lattice resolution of the smooth heterogeneous profile.
const SMOOTH_LATTICE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    /// Bilinear interpolation of a seeded 5×5 lattice.
    Smooth,
    /// Independent uniform value per node.
    Sharp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wavenumber {
    Constant { k: f64 },
    Variable { k_min: f64, k_max: f64, profile: Profile },
}

impl Wavenumber {
    pub fn k_max(&self) -> f64 {
        match *self {
            Wavenumber::Constant { k } => k,
            Wavenumber::Variable { k_max, .. } => k_max,
        }
    }
}

/// Complex shift `β₂` of the shifted operator `−Δ − (1 − iβ₂)k²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shift {
    Fixed(f64),
    /// `β₂ = 1/k_max` of the wavenumber field.
    InverseK,
    Zero,
}

impl Shift {
    pub fn resolve(&self, k_max: f64) -> Result<f64> {
        let beta = match *self {
            Shift::Fixed(b) => b,
            Shift::InverseK => 1.0 / k_max,
            Shift::Zero => 0.0,
        };
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "complex shift must be a non-negative number, got {beta}"
            )));
        }
        Ok(beta)
    }
}

impl fmt::Display for Shift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shift::Fixed(b) => write!(f, "{b}"),
            Shift::InverseK => f.write_str("inv-k"),
            Shift::Zero => f.write_str("zero"),
        }
    }
}

impl FromStr for Shift {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inv-k" | "inverse-k" => Ok(Shift::InverseK),
            "zero" => Ok(Shift::Zero),
            other => other
                .parse::<f64>()
                .map(Shift::Fixed)
                .map_err(|_| Error::InvalidConfig(format!("bad shift '{other}'"))),
        }
    }
}

/// How the rows of boundary nodes are scaled after ghost-node elimination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryRows {
    /// Edge rows halved, corner rows quartered. The operator is then
    /// complex symmetric.
    Symmetric,
    /// Rows exactly as produced by the elimination.
    Unscaled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub wavenumber: Wavenumber,
    pub seed: u64,
    pub nodes_per_dim: usize,
    pub shift: Shift,
    pub boundary_rows: BoundaryRows,
}

impl ProblemSpec {
    /// Constant wavenumber on the coarsest grid satisfying `k·h ≤ 0.625`.
    pub fn constant(k: f64) -> Self {
        Self {
            wavenumber: Wavenumber::Constant { k },
            seed: 1,
            nodes_per_dim: nodes_for_wavenumber(k, DEFAULT_KH),
            shift: Shift::Fixed(0.7),
            boundary_rows: BoundaryRows::Symmetric,
        }
    }

    /// Heterogeneous wavenumber, grid sized by `k_max`.
    pub fn variable(k_min: f64, k_max: f64, profile: Profile, seed: u64) -> Self {
        Self {
            wavenumber: Wavenumber::Variable {
                k_min,
                k_max,
                profile,
            },
            seed,
            nodes_per_dim: nodes_for_wavenumber(k_max, DEFAULT_KH),
            shift: Shift::Fixed(0.7),
            boundary_rows: BoundaryRows::Symmetric,
        }
    }

    pub fn with_nodes(mut self, n: usize) -> Self {
        self.nodes_per_dim = n;
        self
    }

    pub fn with_shift(mut self, shift: Shift) -> Self {
        self.shift = shift;
        self
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.nodes_per_dim - 1) as f64
    }

    pub fn unknowns(&self) -> usize {
        self.nodes_per_dim * self.nodes_per_dim
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.nodes_per_dim;
        if n < 3 || n.is_multiple_of(2) {
            return Err(Error::InvalidProblem(format!(
                "nodes per dimension must be odd and at least 3, got {n}"
            )));
        }
        let h = self.h();
        match self.wavenumber {
            Wavenumber::Constant { k } => {
                if !(k > 0.0) || !k.is_finite() {
                    return Err(Error::InvalidProblem(format!("wavenumber must be positive, got {k}")));
                }
            }
            Wavenumber::Variable { k_min, k_max, .. } => {
                if !(k_min > 0.0 && k_min <= k_max && k_max.is_finite()) {
                    return Err(Error::InvalidProblem(format!(
                        "need 0 < k_min <= k_max, got ({k_min}, {k_max})"
                    )));
                }
            }
        }
        let kh = self.wavenumber.k_max() * h;
        if kh > DEFAULT_KH + KH_SLACK {
            return Err(Error::InvalidProblem(format!(
                "k·h = {kh:.4} exceeds {DEFAULT_KH}; use at least {} nodes per dimension",
                nodes_for_wavenumber(self.wavenumber.k_max(), DEFAULT_KH)
            )));
        }
        self.shift.resolve(self.wavenumber.k_max())?;
        Ok(())
    }

    /// Plain-text `key = value` form, one entry per line.
    pub fn to_config_string(&self) -> String {
        let mut s = String::new();
        match self.wavenumber {
            Wavenumber::Constant { k } => {
                s.push_str("kind = constant\n");
                s.push_str(&format!("k = {k}\n"));
            }
            Wavenumber::Variable {
                k_min,
                k_max,
                profile,
            } => {
                s.push_str("kind = variable\n");
                s.push_str(&format!("k_min = {k_min}\nk_max = {k_max}\n"));
                let p = match profile {
                    Profile::Smooth => "smooth",
                    Profile::Sharp => "sharp",
                };
                s.push_str(&format!("profile = {p}\n"));
            }
        }
        s.push_str(&format!("seed = {}\n", self.seed));
        s.push_str(&format!("nodes_per_dim = {}\n", self.nodes_per_dim));
        s.push_str(&format!("shift = {}\n", self.shift));
        let b = match self.boundary_rows {
            BoundaryRows::Symmetric => "symmetric",
            BoundaryRows::Unscaled => "unscaled",
        };
        s.push_str(&format!("boundary_rows = {b}\n"));
        s
    }

    /// Parses the output of [`ProblemSpec::to_config_string`]. Blank lines
    /// and `#` comments are ignored; `nodes_per_dim` defaults to the
    /// `k·h = 0.625` rule.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let entries = parse_key_values(text)?;
        let get = |key: &str| entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        let num = |key: &str| -> Result<f64> {
            let v = get(key).ok_or_else(|| Error::InvalidConfig(format!("missing key '{key}'")))?;
            v.parse()
                .map_err(|_| Error::InvalidConfig(format!("'{key}' is not a number: {v}")))
        };
        for (key, _) in &entries {
            if !matches!(
                key.as_str(),
                "kind" | "k" | "k_min" | "k_max" | "profile" | "seed" | "nodes_per_dim" | "shift" | "boundary_rows"
            ) {
                return Err(Error::InvalidConfig(format!("unknown key '{key}'")));
            }
        }
        let wavenumber = match get("kind").unwrap_or("constant") {
            "constant" => Wavenumber::Constant { k: num("k")? },
            "variable" => Wavenumber::Variable {
                k_min: num("k_min")?,
                k_max: num("k_max")?,
                profile: match get("profile").unwrap_or("smooth") {
                    "smooth" => Profile::Smooth,
                    "sharp" => Profile::Sharp,
                    other => return Err(Error::InvalidConfig(format!("unknown profile '{other}'"))),
                },
            },
            other => return Err(Error::InvalidConfig(format!("unknown kind '{other}'"))),
        };
        let seed = match get("seed") {
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad seed '{v}'")))?,
            None => 1,
        };
        let nodes_per_dim = match get("nodes_per_dim") {
            Some(v) => v
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad nodes_per_dim '{v}'")))?,
            None => nodes_for_wavenumber(wavenumber.k_max(), DEFAULT_KH),
        };
        let shift = match get("shift") {
            Some(v) => v.parse()?,
            None => Shift::Fixed(0.7),
        };
        let boundary_rows = match get("boundary_rows").unwrap_or("symmetric") {
            "symmetric" => BoundaryRows::Symmetric,
            "unscaled" => BoundaryRows::Unscaled,
            other => return Err(Error::InvalidConfig(format!("unknown boundary_rows '{other}'"))),
        };
        let spec = Self {
            wavenumber,
            seed,
            nodes_per_dim,
            shift,
            boundary_rows,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Splits `key = value` lines; `#` starts a comment.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: lno + 1,
            msg: format!("expected 'key = value', got '{line}'"),
        })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Smallest odd node count `n ≥ 3` with `k/(n − 1) ≤ kh`.
pub fn nodes_for_wavenumber(k: f64, kh: f64) -> usize {
    let intervals = (k / kh - 1e-9).ceil().max(1.0) as usize;
    let intervals = intervals + intervals % 2;
    intervals.max(2) + 1
}

/// Per-node wavenumber values in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct WavenumberField {
    pub nodes_per_dim: usize,
    pub values: Vec<f64>,
}

impl WavenumberField {
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nodes_per_dim + i]
    }

    /// CSV dump with header `x,y,k`, rows in grid order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let n = self.nodes_per_dim;
        let h = 1.0 / (n - 1) as f64;
        writeln!(out, "x,y,k")?;
        for j in 0..n {
            for i in 0..n {
                writeln!(out, "{},{},{}", i as f64 * h, j as f64 * h, self.at(i, j))?;
            }
        }
        Ok(())
    }
}

pub fn build_wavenumber_field(spec: &ProblemSpec) -> Result<WavenumberField> {
    spec.validate()?;
    let n = spec.nodes_per_dim;
    let values = match spec.wavenumber {
        Wavenumber::Constant { k } => vec![k; n * n],
        Wavenumber::Variable {
            k_min,
            k_max,
            profile,
        } => {
            let chi = match profile {
                Profile::Sharp => sharp_profile(n, spec.seed),
                Profile::Smooth => smooth_profile(n, spec.seed),
            };
            chi.into_iter().map(|c| k_min + (k_max - k_min) * c).collect()
        }
    };
    Ok(WavenumberField {
        nodes_per_dim: n,
        values,
    })
}

fn sharp_profile(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::new(seed);
    (0..n * n).map(|_| rng.next_f64()).collect()
}

/// Bilinear interpolant of a seeded lattice, rescaled to span `[0, 1]`.
fn smooth_profile(n: usize, seed: u64) -> Vec<f64> {
    let m = SMOOTH_LATTICE;
    let mut rng = SplitMix64::new(seed);
    let lattice: Vec<f64> = (0..m * m).map(|_| rng.next_f64()).collect();
    let h = 1.0 / (n - 1) as f64;
    let cell = 1.0 / (m - 1) as f64;
    let mut chi = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let (x, y) = (i as f64 * h, j as f64 * h);
            let (cx, cy) = ((x / cell).min((m - 1) as f64), (y / cell).min((m - 1) as f64));
            let (ix, iy) = ((cx.floor() as usize).min(m - 2), (cy.floor() as usize).min(m - 2));
            let (tx, ty) = (cx - ix as f64, cy - iy as f64);
            let at = |a: usize, b: usize| lattice[b * m + a];
            chi.push(
                (1.0 - tx) * (1.0 - ty) * at(ix, iy)
                    + tx * (1.0 - ty) * at(ix + 1, iy)
                    + (1.0 - tx) * ty * at(ix, iy + 1)
                    + tx * ty * at(ix + 1, iy + 1),
            );
        }
    }
    let lo = chi.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = chi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= f64::EPSILON {
        return vec![0.0; n * n];
    }
    chi.into_iter().map(|c| (c - lo) / (hi - lo)).collect()
}

/// Assembles the Helmholtz operator `A` (`shift_on = false`) or the
/// complex-shifted operator `C` (`shift_on = true`).
///
/// Interior rows carry the five-point stencil `h⁻²[−1; −1 4 −1; −1] − s·k²`
/// with `s = 1` for `A` and `s = 1 − iβ₂` for `C`. On the boundary the ghost
/// value `u_ghost = u_inner − 2ihk·u` from the centred Sommerfeld condition
/// is substituted, which doubles the inward coupling and adds `+2ik/h` to the
/// diagonal per missing neighbour. With this sign the boundary damping and
/// the shift both push the spectrum into the upper half-plane.
pub fn assemble_helmholtz(
    spec: &ProblemSpec,
    field: &WavenumberField,
    shift_on: bool,
) -> Result<CsrMatrix> {
    spec.validate()?;
    let n = spec.nodes_per_dim;
    if field.nodes_per_dim != n || field.values.len() != n * n {
        return Err(Error::DimensionMismatch {
            op: "assemble_helmholtz (wavenumber field)",
            expected: n * n,
            found: field.values.len(),
        });
    }
    let h = spec.h();
    let inv_h2 = 1.0 / (h * h);
    let s = if shift_on {
        let beta = spec.shift.resolve(field.max())?;
        C64::new(1.0, -beta)
    } else {
        C64::new(1.0, 0.0)
    };
    let mut triplets = Vec::with_capacity(5 * n * n);
    for j in 0..n {
        for i in 0..n {
            let row = j * n + i;
            let k = field.at(i, j);
            let mut diag = C64::new(4.0 * inv_h2, 0.0) - s * k * k;
            let mut missing = 0;
            let mut couple = |ni: Option<usize>, nj: Option<usize>, opp: (usize, usize), t: &mut Vec<_>| {
                match (ni, nj) {
                    (Some(a), Some(b)) => t.push((row, b * n + a, C64::new(-inv_h2, 0.0))),
                    _ => {
                        t.push((row, opp.1 * n + opp.0, C64::new(-inv_h2, 0.0)));
                        missing += 1;
                    }
                }
            };
            let left = i.checked_sub(1);
            let right = (i + 1 < n).then_some(i + 1);
            let down = j.checked_sub(1);
            let up = (j + 1 < n).then_some(j + 1);
            couple(left, Some(j), (i + 1, j), &mut triplets);
            couple(right, Some(j), (i.wrapping_sub(1), j), &mut triplets);
            couple(Some(i), down, (i, j + 1), &mut triplets);
            couple(Some(i), up, (i, j.wrapping_sub(1)), &mut triplets);
            diag += C64::new(0.0, 2.0 * k / h) * missing as f64;
            triplets.push((row, row, diag));
        }
    }
    let a = CsrMatrix::from_triplets(n * n, n * n, triplets);
    Ok(match spec.boundary_rows {
        BoundaryRows::Unscaled => a,
        BoundaryRows::Symmetric => {
            let weights: Vec<C64> = (0..n * n)
                .map(|row| {
                    let (i, j) = (row % n, row / n);
                    let edge = |v: usize| v == 0 || v == n - 1;
                    let w = match (edge(i), edge(j)) {
                        (true, true) => 0.25,
                        (true, false) | (false, true) => 0.5,
                        (false, false) => 1.0,
                    };
                    C64::new(w, 0.0)
                })
                .collect();
            a.scale_rows(&weights)
        }
    })
}

/// Discrete point source: `1/h²` at the centre node, zero elsewhere.
pub fn assemble_rhs(spec: &ProblemSpec) -> Result<Vec<C64>> {
    spec.validate()?;
    let n = spec.nodes_per_dim;
    let mut b = vec![ZERO; n * n];
    let c = n / 2;
    b[c * n + c] = C64::new(1.0 / (spec.h() * spec.h()), 0.0);
    Ok(b)
}

/// Writes a nodal complex field as CSV with header `x,y,re,im`.
pub fn write_solution_csv<W: Write>(n: usize, u: &[C64], mut out: W) -> Result<()> {
    let h = 1.0 / (n - 1) as f64;
    writeln!(out, "x,y,re,im")?;
    for j in 0..n {
        for i in 0..n {
            let v = u[j * n + i];
            writeln!(out, "{},{},{:e},{:e}", i as f64 * h, j as f64 * h, v.re, v.im)?;
        }
    }
    Ok(())
}
