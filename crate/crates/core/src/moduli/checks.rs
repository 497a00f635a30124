use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::interval::CertifiedInterval;
use crate::norms::Space;
use crate::rng::derive_seed;

use super::search::{delta, tangential, EvalBudget};

const TOL: f64 = 1e-9;

/// `sup { t ∈ [0, 2) : δ_X(t) ≤ 1 - t }` by bisection on `[0, 1]`.
///
/// A midpoint counts as inside when `δ.hi ≤ 1 - t` and outside when
/// `δ.lo > 1 - t`. An undecided midpoint is retried once with twice the
/// budget; if it stays undecided the current bracket is returned.
pub fn t_x(space: &Space, budget: &EvalBudget, seed: u64) -> Result<CertifiedInterval> {
    let mut evals = 0;
    let at_one = delta(space, 1.0, budget, derive_seed(seed, 0))?;
    evals += at_one.evaluations;
    if at_one.hi <= TOL {
        return Ok(CertifiedInterval::new(1.0, 1.0, "bisection", evals));
    }
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut call = 1u64;
    while b - a > 1e-4 {
        let m = 0.5 * (a + b);
        let mut decided = None;
        for attempt in 0..2 {
            let bud = if attempt == 0 { budget.clone() } else { budget.doubled() };
            let iv = delta(space, m, &bud, derive_seed(seed, call))?;
            call += 1;
            evals += iv.evaluations;
            if iv.hi <= 1.0 - m {
                decided = Some(true);
            } else if iv.lo > 1.0 - m {
                decided = Some(false);
            }
            if decided.is_some() {
                break;
            }
        }
        match decided {
            Some(true) => a = m,
            Some(false) => b = m,
            None => return Ok(CertifiedInterval::new(a, b, "bisection/straddle", evals)),
        }
    }
    Ok(CertifiedInterval::new(a, b, "bisection", evals))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NordlanderRow {
    pub t: f64,
    pub delta: CertifiedInterval,
    pub bound: f64,
    pub holds: bool,
    /// `|δ.hi - bound| ≤ 1e-4`.
    pub equality: bool,
    /// `δ.hi < bound` by more than the tolerance.
    pub strict: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NordlanderReport {
    pub rows: Vec<NordlanderRow>,
    pub all_hold: bool,
}

/// `δ_X(t) ≤ 1 - sqrt(1 - t²/4)` at every grid point.
pub fn nordlander_check(space: &Space, grid: &[f64], budget: &EvalBudget, seed: u64) -> Result<NordlanderReport> {
    let mut rows = Vec::with_capacity(grid.len());
    for (j, &t) in grid.iter().enumerate() {
        let iv = delta(space, t, budget, derive_seed(seed, j as u64))?;
        let bound = 1.0 - (1.0 - t * t / 4.0).max(0.0).sqrt();
        rows.push(NordlanderRow {
            t,
            holds: iv.lo <= bound + TOL,
            equality: (iv.hi - bound).abs() <= 1e-4,
            strict: iv.hi < bound - TOL,
            bound,
            delta: iv,
        });
    }
    let all_hold = rows.iter().all(|r| r.holds);
    Ok(NordlanderReport { rows, all_hold })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VarphiDeltaRow {
    pub t: f64,
    pub phi: CertifiedInterval,
    /// `δ(t/(1+φ)) ≤ φ/(1+φ)`: argument, δ.lo there, right side with φ.hi.
    pub first_arg: f64,
    pub first_lhs: f64,
    pub first_rhs: f64,
    pub first_holds: bool,
    /// `φ(t/2 - 2δ(t)) ≤ δ(t)` where the argument is nonnegative.
    pub second: Option<SecondInequality>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SecondInequality {
    pub delta: CertifiedInterval,
    pub arg: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VarphiDeltaReport {
    pub rows: Vec<VarphiDeltaRow>,
    pub all_hold: bool,
}

/// The two inequalities linking φ_X and δ_X, evaluated on `grid ∩ [0, 2)`.
/// δ enters through its lower end on the smaller side and φ through its
/// upper end on the larger side.
pub fn varphi_delta_inequalities(
    space: &Space,
    grid: &[f64],
    budget: &EvalBudget,
    seed: u64,
) -> Result<VarphiDeltaReport> {
    let mut rows = Vec::new();
    for (j, &t) in grid.iter().enumerate().filter(|(_, t)| **t < 2.0) {
        let s = |k: u64| derive_seed(seed, 4 * j as u64 + k);
        let phi = tangential(space, t, budget, s(0))?;
        let first_arg = t / (1.0 + phi.hi);
        let d_small = delta(space, first_arg, budget, s(1))?;
        let first_rhs = phi.hi / (1.0 + phi.hi);
        let first_holds = d_small.lo <= first_rhs + TOL;

        let d = delta(space, t, budget, s(2))?;
        let arg = t / 2.0 - 2.0 * d.hi;
        let second = if arg >= 0.0 {
            let p = tangential(space, arg, budget, s(3))?;
            Some(SecondInequality { arg, lhs: p.lo, rhs: d.hi, holds: p.lo <= d.hi + TOL, delta: d })
        } else {
            None
        };
        rows.push(VarphiDeltaRow {
            t,
            phi,
            first_arg,
            first_lhs: d_small.lo,
            first_rhs,
            first_holds,
            second,
        });
    }
    let all_hold = rows.iter().all(|r| r.first_holds && r.second.as_ref().is_none_or(|s| s.holds));
    Ok(VarphiDeltaReport { rows, all_hold })
}
