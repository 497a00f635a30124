//! Rounding simple functions to even-integer values in the sup norm.
//!
//! Cell identifiers are `.`-separated paths; `a.b` refines `a`. Two
//! functions are compared on the common refinement of their partitions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimpleFunction {
    pub cells: Vec<String>,
    pub values: Vec<f64>,
}

impl SimpleFunction {
    pub fn new(cells: Vec<String>, values: Vec<f64>) -> Result<SimpleFunction> {
        let f = SimpleFunction { cells, values };
        f.validate()?;
        Ok(f)
    }

    /// Cells `c0, …, c{n-1}` carrying `values`.
    pub fn on_cells(values: Vec<f64>) -> SimpleFunction {
        let cells = (0..values.len()).map(|i| format!("c{i}")).collect();
        SimpleFunction { cells, values }
    }

    /// Checks lengths, finiteness and that no cell contains another.
    pub fn validate(&self) -> Result<()> {
        if self.cells.len() != self.values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} cells but {} values",
                self.cells.len(),
                self.values.len()
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("values must be finite".into()));
        }
        let mut sorted: Vec<&str> = self.cells.iter().map(|s| s.as_str()).collect();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] || refines(w[1], w[0]) {
                return Err(Error::InvalidArgument(format!("cells {:?} and {:?} overlap", w[0], w[1])));
            }
        }
        Ok(())
    }

    pub fn is_even_valued(&self) -> bool {
        self.values.iter().all(|v| v.rem_euclid(2.0) == 0.0)
    }

    /// `f + c` on every cell.
    pub fn shifted(&self, c: f64) -> SimpleFunction {
        SimpleFunction { cells: self.cells.clone(), values: self.values.iter().map(|v| v + c).collect() }
    }
}

/// True when `fine` is `coarse` or lies inside it.
fn refines(fine: &str, coarse: &str) -> bool {
    fine == coarse || (fine.len() > coarse.len() && fine.starts_with(coarse) && fine.as_bytes()[coarse.len()] == b'.')
}

/// The `2^depth` cylinders of the Cantor set, e.g. `0.1.1` for depth 3.
pub fn cantor_cells(depth: u32) -> Vec<String> {
    (0..1u64 << depth)
        .map(|i| (0..depth).rev().map(|b| ((i >> b) & 1).to_string()).collect::<Vec<_>>().join("."))
        .collect()
}

/// `2k` with `2k - 1 <= v < 2k + 1`.
pub fn round_even_value(v: f64) -> f64 {
    let mut k = ((v + 1.0) / 2.0).floor();
    if v < 2.0 * k - 1.0 {
        k -= 1.0;
    } else if v >= 2.0 * k + 1.0 {
        k += 1.0;
    }
    2.0 * k + 0.0
}

pub fn round_even(f: &SimpleFunction) -> SimpleFunction {
    SimpleFunction { cells: f.cells.clone(), values: f.values.iter().map(|&v| round_even_value(v)).collect() }
}

/// Rounds the cell representatives of a function whose oscillation on each
/// cell is at most `osc`; any such function is within `1 + osc` of the
/// result.
pub fn round_even_zero_dim(f: &SimpleFunction, osc: f64) -> Result<(SimpleFunction, f64)> {
    if !(osc >= 0.0) {
        return Err(Error::InvalidArgument(format!("oscillation must be nonnegative, got {osc}")));
    }
    Ok((round_even(f), 1.0 + osc))
}

/// Sup distance on the common refinement. Fails when some cell of one
/// partition meets no cell of the other.
pub fn sup_distance(f: &SimpleFunction, g: &SimpleFunction) -> Result<f64> {
    f.validate()?;
    g.validate()?;
    let mut best = 0.0f64;
    let mut g_hit = vec![false; g.cells.len()];
    for (a, va) in f.cells.iter().zip(&f.values) {
        let mut hit = false;
        for (j, (b, vb)) in g.cells.iter().zip(&g.values).enumerate() {
            if refines(a, b) || refines(b, a) {
                hit = true;
                g_hit[j] = true;
                best = best.max((va - vb).abs());
            }
        }
        if !hit {
            return Err(Error::InvalidArgument(format!("cell {a:?} has no counterpart")));
        }
    }
    if let Some(j) = g_hit.iter().position(|h| !h) {
        return Err(Error::InvalidArgument(format!("cell {:?} has no counterpart", g.cells[j])));
    }
    Ok(best)
}

/// Sup distance between two even-valued functions; distinct ones are at
/// least 2 apart.
pub fn check_even_separation(g1: &SimpleFunction, g2: &SimpleFunction) -> Result<f64> {
    for g in [g1, g2] {
        if !g.is_even_valued() {
            return Err(Error::InvalidArgument("function is not even-integer valued".into()));
        }
    }
    let d = sup_distance(g1, g2)?;
    if d != 0.0 && d < 2.0 {
        return Err(Error::InvalidArgument(format!("even-valued functions at distance {d} < 2")));
    }
    Ok(d)
}
