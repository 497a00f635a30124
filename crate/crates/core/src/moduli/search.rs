//! Multi-start derivative-free minimization for δ_X, δ_X(x₀,·) and φ_X.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::CertifiedInterval;
use crate::linalg::dot;
use crate::norms::Space;
use crate::rng::{self, derive_seed};

use super::Modulus;

/// Limits for the sampled moduli.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalBudget {
    pub starts: usize,
    /// Cap on norm evaluations per call.
    pub max_norm_evals: u64,
    /// Smallest step of the coordinate search.
    pub min_step: f64,
}

impl Default for EvalBudget {
    fn default() -> Self {
        EvalBudget { starts: 64, max_norm_evals: 500_000_000, min_step: 1e-7 }
    }
}

impl EvalBudget {
    pub fn with_starts(starts: usize) -> Self {
        EvalBudget { starts, ..Default::default() }
    }

    pub fn doubled(&self) -> Self {
        EvalBudget {
            starts: self.starts * 2,
            max_norm_evals: self.max_norm_evals.saturating_mul(2),
            min_step: self.min_step,
        }
    }
}

const GAP_FLOOR: f64 = 1e-6;
const ROOT_TOL: f64 = 1e-13;

struct Counted<'a> {
    space: &'a Space,
    evals: Cell<u64>,
    cap: u64,
}

impl Counted<'_> {
    fn norm(&self, x: &[f64]) -> f64 {
        self.evals.set(self.evals.get() + 1);
        self.space.norm(x)
    }

    fn exhausted(&self) -> bool {
        self.evals.get() >= self.cap
    }
}

fn normalized(c: &Counted, v: &[f64]) -> Option<Vec<f64>> {
    let n = c.norm(v);
    if n > 0.0 && n.is_finite() {
        Some(v.iter().map(|a| a / n).collect())
    } else {
        None
    }
}

/// Point `y` on the unit sphere with `|x - y| = eps`, on the great circle
/// through `x` and the Euclidean direction of `d` orthogonal to `x`.
fn pair_on_circle(c: &Counted, x: &[f64], d: &[f64], eps: f64) -> Option<Vec<f64>> {
    let xx = dot(x, x);
    let k = dot(d, x) / xx;
    let mut e: Vec<f64> = d.iter().zip(x).map(|(a, b)| a - k * b).collect();
    let en = dot(&e, &e).sqrt();
    if !(en > 1e-12 * dot(d, d).sqrt()) || en == 0.0 {
        return None;
    }
    let s = xx.sqrt() / en;
    e.iter_mut().for_each(|v| *v *= s);
    let point = |th: f64| -> Option<Vec<f64>> {
        let (sn, cs) = th.sin_cos();
        let raw: Vec<f64> = x.iter().zip(&e).map(|(a, b)| cs * a + sn * b).collect();
        normalized(c, &raw)
    };
    let g = |y: &[f64]| -> f64 {
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        c.norm(&diff) - eps
    };
    let (mut a, mut fa) = (0.0f64, -eps);
    let mut b = std::f64::consts::PI;
    let yb = x.iter().map(|v| -v).collect::<Vec<f64>>();
    let mut fb = 2.0 - eps;
    if fb <= ROOT_TOL {
        return Some(yb);
    }
    let mut side = 0i8;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..200 {
        let mut th = (a * fb - b * fa) / (fb - fa);
        if !(th > a && th < b) {
            th = 0.5 * (a + b);
        }
        let y = point(th)?;
        let fc = g(&y);
        if best.as_ref().is_none_or(|(r, _)| fc.abs() < *r) {
            best = Some((fc.abs(), y.clone()));
        }
        if fc.abs() <= ROOT_TOL {
            return Some(y);
        }
        if fc < 0.0 {
            a = th;
            fa = fc;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = th;
            fb = fc;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        if b - a <= 1e-15 {
            break;
        }
    }
    match best {
        Some((r, y)) if r <= 1e-9 => Some(y),
        _ => None,
    }
}

fn midpoint_depth(c: &Counted, x: &[f64], y: &[f64]) -> f64 {
    let s: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
    1.0 - c.norm(&s)
}

/// Minimizer of the convex function `λ ↦ |u + λ v|` by golden section.
fn bj_foot(c: &Counted, u: &[f64], v: &[f64]) -> Vec<f64> {
    let nu = c.norm(u);
    let at = |l: f64| -> Vec<f64> { u.iter().zip(v).map(|(a, b)| a + l * b).collect() };
    let (mut a, mut b) = (-2.0 * nu, 2.0 * nu);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let mut f1 = c.norm(&at(x1));
    let mut f2 = c.norm(&at(x2));
    for _ in 0..80 {
        if b - a <= 1e-13 * nu.max(1e-300) {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = c.norm(&at(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = c.norm(&at(x2));
        }
    }
    let lam = if f1 <= f2 { x1 } else { x2 };
    at(lam)
}

/// Unit `x`, `v` with `x ⊥_BJ v` from raw parameters `(u, w)`.
fn bj_pair(c: &Counted, params: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let n = params.len() / 2;
    let v = normalized(c, &params[n..])?;
    // same line {u + λv}, but u no longer nearly parallel to v, which
    // would cost precision in the foot search
    let (uv, vv) = (dot(&params[..n], &v), dot(&v, &v));
    let u: Vec<f64> = params[..n].iter().zip(&v).map(|(a, b)| a - uv / vv * b).collect();
    let foot = bj_foot(c, &u, &v);
    let x = normalized(c, &foot)?;
    Some((x, v))
}

fn growth(c: &Counted, x: &[f64], v: &[f64], t: f64) -> f64 {
    let z: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + t * b).collect();
    c.norm(&z) - 1.0
}

struct Outcome {
    best: f64,
    params: Vec<f64>,
    gap: f64,
}

/// Coordinate pattern search with a halving step.
fn descend<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &mut [f64], min_step: f64, c: &Counted) -> f64 {
    let mut fx = f(x);
    let mut step = 0.5;
    while step >= min_step && !c.exhausted() {
        let mut improved = false;
        for i in 0..x.len() {
            for s in [step, -step] {
                x[i] += s;
                let v = f(x);
                if v < fx {
                    fx = v;
                    improved = true;
                    break;
                }
                x[i] -= s;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    fx
}

fn multistart<F: FnMut(&[f64]) -> f64>(
    c: &Counted,
    dim: usize,
    budget: &EvalBudget,
    seed: u64,
    mut f: F,
) -> Result<Outcome> {
    let starts = budget.starts.max(2);
    let mut vals = Vec::with_capacity(starts);
    let mut best = f64::INFINITY;
    let mut best_params = Vec::new();
    for s in 0..starts {
        if c.exhausted() {
            break;
        }
        let mut r = rng::rng(derive_seed(seed, s as u64));
        let mut x = rng::gaussian_vec(&mut r, dim);
        let v = descend(&mut f, &mut x, budget.min_step, c);
        vals.push(v);
        if v < best {
            best = v;
            best_params = x;
        }
    }
    if !best.is_finite() {
        return Err(Error::BudgetExhausted("no start produced a feasible point".into()));
    }
    let half = vals.len().div_ceil(2);
    let m1 = vals[..half].iter().cloned().fold(f64::INFINITY, f64::min);
    let m2 = vals[half..].iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = if m1.is_finite() && m2.is_finite() { (m1 - m2).abs() } else { 0.0 };
    Ok(Outcome { best, params: best_params, gap: spread + GAP_FLOOR })
}

fn hilbert(space: &Space) -> bool {
    space.lp_exponent() == Some(2.0) && space.dim() >= 2
}

fn interval(best: f64, gap: f64, analytic: Option<f64>, evals: u64) -> CertifiedInterval {
    let hi = best.max(0.0);
    match analytic {
        // a found value below the exact one is rounding in the search
        Some(a) => CertifiedInterval::new(a.min(hi).max(0.0), hi.max(a), "best-found/analytic-bound", evals),
        None => CertifiedInterval::new((hi - gap).max(0.0), hi, "best-found", evals),
    }
}

fn counted<'a>(space: &'a Space, budget: &EvalBudget) -> Counted<'a> {
    Counted { space, evals: Cell::new(0), cap: budget.max_norm_evals }
}

fn check_dim2(space: &Space) -> Result<()> {
    if space.dim() < 2 {
        return Err(Error::InvalidArgument("moduli need dimension at least 2".into()));
    }
    Ok(())
}

fn hilbert_delta(eps: f64) -> f64 {
    1.0 - (1.0 - eps * eps / 4.0).max(0.0).sqrt()
}

fn delta_objective(c: &Counted, params: &[f64], eps: f64) -> f64 {
    let n = params.len() / 2;
    let Some(x) = normalized(c, &params[..n]) else { return f64::INFINITY };
    match pair_on_circle(c, &x, &params[n..], eps) {
        Some(y) => midpoint_depth(c, &x, &y),
        None => f64::INFINITY,
    }
}

/// Modulus of convexity `δ_X(eps)`.
pub fn delta(space: &Space, eps: f64, budget: &EvalBudget, seed: u64) -> Result<CertifiedInterval> {
    Ok(delta_search(space, eps, budget, seed)?.0)
}

fn delta_search(space: &Space, eps: f64, budget: &EvalBudget, seed: u64) -> Result<(CertifiedInterval, Vec<f64>)> {
    if !(0.0..=2.0).contains(&eps) {
        return Err(Error::InvalidArgument(format!("eps must lie in [0, 2], got {eps}")));
    }
    check_dim2(space)?;
    if eps == 0.0 {
        return Ok((CertifiedInterval::new(0.0, 0.0, "exact", 0), Vec::new()));
    }
    let c = counted(space, budget);
    let n = space.dim();
    let out = multistart(&c, 2 * n, budget, seed, |p| delta_objective(&c, p, eps))?;
    let analytic = hilbert(space).then(|| hilbert_delta(eps));
    Ok((interval(out.best, out.gap, analytic, c.evals.get()), out.params))
}

/// Local modulus `δ_X(x0, eps)`.
pub fn delta_local(space: &Space, x0: &[f64], eps: f64, budget: &EvalBudget, seed: u64) -> Result<CertifiedInterval> {
    if !(0.0..=2.0).contains(&eps) {
        return Err(Error::InvalidArgument(format!("eps must lie in [0, 2], got {eps}")));
    }
    if x0.len() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: x0.len() });
    }
    let nx = space.norm(x0);
    if (nx - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!("x0 is not on the unit sphere (norm {nx})")));
    }
    check_dim2(space)?;
    if eps == 0.0 {
        return Ok(CertifiedInterval::new(0.0, 0.0, "exact", 0));
    }
    let c = counted(space, budget);
    let out = multistart(&c, space.dim(), budget, seed, |d| match pair_on_circle(&c, x0, d, eps) {
        Some(y) => midpoint_depth(&c, x0, &y),
        None => f64::INFINITY,
    })?;
    let mut iv = interval(out.best, out.gap, None, c.evals.get());
    if iv.hi > eps / 2.0 {
        iv.hi = eps / 2.0;
        iv.lo = iv.lo.min(iv.hi);
        iv.method = "best-found/clamped".into();
    }
    Ok(iv)
}

fn tangential_objective(c: &Counted, params: &[f64], t: f64) -> f64 {
    match bj_pair(c, params) {
        Some((x, v)) => growth(c, &x, &v, t),
        None => f64::INFINITY,
    }
}

/// Tangential modulus `φ_X(t)`.
pub fn tangential(space: &Space, t: f64, budget: &EvalBudget, seed: u64) -> Result<CertifiedInterval> {
    Ok(tangential_search(space, t, budget, seed)?.0)
}

fn tangential_search(space: &Space, t: f64, budget: &EvalBudget, seed: u64) -> Result<(CertifiedInterval, Vec<f64>)> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("t must be a nonnegative real, got {t}")));
    }
    check_dim2(space)?;
    if t == 0.0 {
        return Ok((CertifiedInterval::new(0.0, 0.0, "exact", 0), Vec::new()));
    }
    let c = counted(space, budget);
    let n = space.dim();
    let out = multistart(&c, 2 * n, budget, seed, |p| tangential_objective(&c, p, t))?;
    let analytic = hilbert(space).then(|| (1.0 + t * t).sqrt() - 1.0);
    Ok((interval(out.best, out.gap, analytic, c.evals.get()), out.params))
}

/// A sampled modulus together with the per-point intervals it came from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampledTable {
    pub modulus: Modulus,
    pub intervals: Vec<CertifiedInterval>,
}

impl SampledTable {
    pub fn grid(&self) -> &[f64] {
        match &self.modulus {
            Modulus::Table { grid, .. } => grid,
            _ => unreachable!("sampled tables are tables"),
        }
    }
}

fn cross_evaluate<F>(grid: &[f64], ivs: &mut [CertifiedInterval], gaps: &[f64], witnesses: &[Vec<f64>], mut value: F)
where
    F: FnMut(&[f64], f64) -> f64,
{
    for (j, &t) in grid.iter().enumerate() {
        if t == 0.0 {
            continue;
        }
        let mut hi = ivs[j].hi;
        for w in witnesses.iter().filter(|w| !w.is_empty()) {
            hi = hi.min(value(w, t).max(0.0));
        }
        if hi < ivs[j].hi {
            let iv = &mut ivs[j];
            iv.hi = hi;
            iv.lo = if iv.method == "best-found" { (hi - gaps[j]).max(0.0) } else { iv.lo.min(hi) };
        }
    }
}

fn check_grid(grid: &[f64], top: f64) -> Result<()> {
    if grid.first() != Some(&0.0) || grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|t| *t > top) {
        return Err(Error::InvalidArgument(format!("grid must increase from 0 and stay within [0, {top}]")));
    }
    Ok(())
}

/// φ_X sampled on `grid`. Every search's best pair is re-evaluated at all
/// grid points, so the stored upper values are a pointwise minimum of
/// functions `t ↦ |x + tv| - 1`.
pub fn tangential_table(space: &Space, grid: &[f64], budget: &EvalBudget, seed: u64) -> Result<SampledTable> {
    check_grid(grid, f64::INFINITY)?;
    let mut ivs = Vec::with_capacity(grid.len());
    let mut gaps = Vec::with_capacity(grid.len());
    let mut wits = Vec::with_capacity(grid.len());
    for (j, &t) in grid.iter().enumerate() {
        let (iv, w) = tangential_search(space, t, budget, derive_seed(seed, j as u64))?;
        gaps.push(iv.hi - iv.lo);
        ivs.push(iv);
        wits.push(w);
    }
    let c = counted(space, &EvalBudget { max_norm_evals: u64::MAX, ..budget.clone() });
    let pairs: Vec<Vec<f64>> = wits
        .iter()
        .map(|w| {
            if w.is_empty() {
                return Vec::new();
            }
            bj_pair(&c, w).map(|(x, v)| [x, v].concat()).unwrap_or_default()
        })
        .collect();
    let n = space.dim();
    cross_evaluate(grid, &mut ivs, &gaps, &pairs, |w, t| growth(&c, &w[..n], &w[n..], t));
    let values = ivs.iter().map(|iv| iv.hi).collect();
    let modulus = Modulus::table(grid.to_vec(), values, format!("tangential {} seed={seed}", space.descriptor().label()))?;
    Ok(SampledTable { modulus, intervals: ivs })
}

/// δ_X sampled on `grid ⊂ [0, 2]`, with the same witness exchange.
pub fn delta_table(space: &Space, grid: &[f64], budget: &EvalBudget, seed: u64) -> Result<SampledTable> {
    check_grid(grid, 2.0)?;
    let mut ivs = Vec::with_capacity(grid.len());
    let mut gaps = Vec::with_capacity(grid.len());
    let mut wits = Vec::with_capacity(grid.len());
    for (j, &t) in grid.iter().enumerate() {
        let (iv, w) = delta_search(space, t, budget, derive_seed(seed, j as u64))?;
        gaps.push(iv.hi - iv.lo);
        ivs.push(iv);
        wits.push(w);
    }
    let c = counted(space, &EvalBudget { max_norm_evals: u64::MAX, ..budget.clone() });
    cross_evaluate(grid, &mut ivs, &gaps, &wits, |w, t| delta_objective(&c, w, t));
    let values = ivs.iter().map(|iv| iv.hi).collect();
    let modulus = Modulus::table(grid.to_vec(), values, format!("delta {} seed={seed}", space.descriptor().label()))?;
    Ok(SampledTable { modulus, intervals: ivs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_pair_hits_requested_distance() {
        let s = Space::lp(3.0, 3).unwrap();
        let c = counted(&s, &EvalBudget::default());
        let x = normalized(&c, &[0.3, -1.0, 0.4]).unwrap();
        for eps in [0.1, 0.9, 1.7, 2.0] {
            let y = pair_on_circle(&c, &x, &[1.0, 0.2, -0.5], eps).unwrap();
            assert!((s.norm(&y) - 1.0).abs() < 1e-12);
            let d: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
            assert!((s.norm(&d) - eps).abs() < 1e-9);
        }
    }

    #[test]
    fn bj_pair_is_orthogonal() {
        let s = Space::lp(4.0, 3).unwrap();
        let c = counted(&s, &EvalBudget::default());
        let (x, v) = bj_pair(&c, &[0.4, 1.0, -0.3, 0.7, 0.1, 0.9]).unwrap();
        assert!(crate::norms::bj_orthogonal(&s, &x, &v, 1e-6).unwrap());
    }
}
