//! Moduli of convexity: closed-form φ_p, sampled δ_X and φ_X, composition,
//! axiom checks and the inequalities that relate them.

mod checks;
mod search;

pub use checks::{
    nordlander_check, t_x, varphi_delta_inequalities, NordlanderReport, NordlanderRow, VarphiDeltaReport,
    VarphiDeltaRow,
};
pub use search::{delta, delta_local, delta_table, tangential, tangential_table, EvalBudget, SampledTable};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `φ_p(t) = (1 + t^p)^{1/p} - 1`; `φ_1` is the identity and `φ_∞(t) = max(1, t) - 1`.
pub fn phi_p(p: f64, t: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidArgument(format!("phi_p needs p >= 1, got {p}")));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("phi_p needs t >= 0, got {t}")));
    }
    Ok(phi_p_unchecked(p, t))
}

pub(crate) fn phi_p_unchecked(p: f64, t: f64) -> f64 {
    if p == 1.0 {
        t
    } else if p.is_infinite() {
        t.max(1.0) - 1.0
    } else {
        (1.0 + t.powf(p)).powf(1.0 / p) - 1.0
    }
}

/// A function `t ↦ φ(t)` on `[0, ∞)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Modulus {
    PhiP {
        #[serde(with = "crate::norms::exponent")]
        p: f64,
    },
    Identity,
    /// Piecewise-linear through the grid points; beyond the last point the
    /// last ratio `φ(T)/T` is continued linearly.
    Table {
        grid: Vec<f64>,
        values: Vec<f64>,
        provenance: String,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        non_modulus: bool,
    },
    Composed {
        outer: Box<Modulus>,
        inner: Box<Modulus>,
    },
}

impl Modulus {
    pub fn phi_p(p: f64) -> Result<Modulus> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidArgument(format!("phi_p needs p >= 1, got {p}")));
        }
        Ok(Modulus::PhiP { p })
    }

    /// Builds a table and flags it when `value/t` decreases somewhere.
    pub fn table(grid: Vec<f64>, values: Vec<f64>, provenance: impl Into<String>) -> Result<Modulus> {
        if grid.len() != values.len() || grid.is_empty() {
            return Err(Error::InvalidArgument("table grid and values must have the same nonzero length".into()));
        }
        if grid[0] != 0.0 {
            return Err(Error::InvalidArgument("table grid must start at 0".into()));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("table grid must be strictly increasing".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidArgument("table values must be finite and nonnegative".into()));
        }
        let non_modulus = values[0] != 0.0 || !ratio_nondecreasing(&grid, &values, 1e-9);
        Ok(Modulus::Table { grid, values, provenance: provenance.into(), non_modulus })
    }

    pub fn is_non_modulus(&self) -> bool {
        match self {
            Modulus::Table { non_modulus, .. } => *non_modulus,
            Modulus::Composed { outer, inner } => outer.is_non_modulus() || inner.is_non_modulus(),
            _ => false,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Modulus::PhiP { p } => phi_p_unchecked(*p, t),
            Modulus::Identity => t,
            Modulus::Table { grid, values, .. } => {
                let last = grid.len() - 1;
                if t <= 0.0 {
                    return values[0];
                }
                if t >= grid[last] {
                    if grid[last] == 0.0 {
                        return values[0];
                    }
                    return values[last] * t / grid[last];
                }
                let j = grid.partition_point(|g| *g <= t);
                let (a, b) = (grid[j - 1], grid[j]);
                let w = (t - a) / (b - a);
                values[j - 1] + w * (values[j] - values[j - 1])
            }
            Modulus::Composed { outer, inner } => outer.eval(inner.eval(t)),
        }
    }
}

fn ratio_nondecreasing(grid: &[f64], values: &[f64], tol: f64) -> bool {
    let mut prev = f64::NEG_INFINITY;
    for (t, v) in grid.iter().zip(values) {
        if *t > 0.0 {
            let r = v / t;
            if r < prev - tol {
                return false;
            }
            prev = prev.max(r);
        }
    }
    true
}

/// `outer ∘ inner`.
pub fn compose(outer: &Modulus, inner: &Modulus) -> Result<Modulus> {
    if outer.is_non_modulus() || inner.is_non_modulus() {
        return Err(Error::NonModulus("cannot compose a table that fails the ratio condition".into()));
    }
    Ok(Modulus::Composed { outer: Box::new(outer.clone()), inner: Box::new(inner.clone()) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    /// `φ(grid[0])` is zero within tolerance.
    pub phi1_ok: bool,
    /// `φ(t)/t` is non-decreasing along the grid.
    pub phi2_ok: bool,
    /// `φ(λt) ≤ λφ(t)` for λ in {0.1, …, 0.9}.
    pub phi3_ok: bool,
    /// `φ(t) > 0` for every positive grid point.
    pub positive: bool,
}

impl AxiomReport {
    pub fn is_modulus(&self) -> bool {
        self.phi1_ok && self.phi2_ok && self.phi3_ok
    }
}

pub fn check_modulus_axioms(phi: &Modulus, grid: &[f64]) -> AxiomReport {
    const TOL: f64 = 1e-9;
    let values: Vec<f64> = grid.iter().map(|&t| phi.eval(t)).collect();
    let phi1_ok = grid.first().is_some_and(|&t0| t0 <= 1e-6 && values[0].abs() <= TOL);
    let phi2_ok = ratio_nondecreasing(grid, &values, TOL);
    let phi3_ok = grid.iter().zip(&values).all(|(&t, &v)| {
        (1..10).all(|k| {
            let lambda = k as f64 / 10.0;
            phi.eval(lambda * t) <= lambda * v + TOL
        })
    });
    let positive = grid.iter().zip(&values).filter(|(t, _)| **t > 0.0).all(|(_, v)| *v > 0.0);
    AxiomReport { phi1_ok, phi2_ok, phi3_ok, positive }
}

/// An evenly spaced grid of `count` points on `[0, top]`.
pub fn uniform_grid(top: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![0.0];
    }
    (0..count).map(|i| top * i as f64 / (count - 1) as f64).collect()
}
