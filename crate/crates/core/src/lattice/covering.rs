//! Certified maxima of 1-Lipschitz periodic functions over the fundamental
//! parallelepiped, and the covering radius / γ* estimates built on them.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::CertifiedInterval;
use crate::norms::Space;

use super::enumerate::Closest;
use super::Lattice;

#[derive(Clone, Debug)]
pub(crate) struct LipschitzOptions {
    pub per_axis: usize,
    pub tol: f64,
    pub max_evals: u64,
    /// Stop as soon as some value exceeds this threshold.
    pub abort_above: Option<f64>,
}

struct Cell {
    ub: f64,
    level: u32,
    center: Vec<f64>,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.ub.total_cmp(&o.ub) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> Ordering {
        self.ub.total_cmp(&o.ub)
    }
}

/// Largest norm of `Σ ±(h/2) b_i` over sign patterns.
fn half_diagonal(space: &Space, basis: &[Vec<f64>], h: f64) -> f64 {
    let m = basis.len();
    let n = basis[0].len();
    let mut best = 0.0f64;
    // fixing the first sign loses nothing by symmetry
    for mask in 0..(1u64 << (m - 1)) {
        let mut v = vec![0.0; n];
        for (i, b) in basis.iter().enumerate() {
            let s = if i > 0 && (mask >> (i - 1)) & 1 == 1 { -0.5 * h } else { 0.5 * h };
            for (vj, bj) in v.iter_mut().zip(b) {
                *vj += s * bj;
            }
        }
        best = best.max(space.norm(&v));
    }
    best
}

/// Branch and bound for `max f` over `{Σ s_i b_i : s ∈ [0,1)^m}` where `f` is
/// 1-Lipschitz in the norm of `space` and periodic under the lattice.
/// `lo` is a value attained by `f`; `hi` bounds `f` everywhere.
pub(crate) fn lipschitz_max<F>(
    space: &Space,
    basis: &[Vec<f64>],
    opts: &LipschitzOptions,
    seeds: &[Vec<f64>],
    mut f: F,
) -> Result<(CertifiedInterval, Vec<f64>)>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let m = basis.len();
    let n = space.dim();
    let k = opts.per_axis.max(1);
    let to_point = |s: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (si, b) in s.iter().zip(basis) {
            for (xj, bj) in x.iter_mut().zip(b) {
                *xj += si * bj;
            }
        }
        x
    };
    let rho0 = half_diagonal(space, basis, 1.0 / k as f64);
    let mut lo = f64::NEG_INFINITY;
    let mut arg = vec![0.0; n];
    let mut evals = 0u64;
    let abort = opts.abort_above.unwrap_or(f64::INFINITY);
    for s in seeds {
        let v = f(s)?;
        evals += 1;
        if v > lo {
            lo = v;
            arg = s.clone();
        }
    }
    if lo > abort {
        return Ok((CertifiedInterval::new(lo, f64::INFINITY, "aborted", evals), arg));
    }
    let total = (k as u64).checked_pow(m as u32).unwrap_or(u64::MAX);
    if total > opts.max_evals.max(1) * 4 + 1_000_000 {
        return Err(Error::BudgetExhausted(format!("initial grid of {total} cells is too large")));
    }
    let mut heap = BinaryHeap::new();
    let mut idx = vec![0usize; m];
    let mut s = vec![0.0; m];
    loop {
        for i in 0..m {
            s[i] = (idx[i] as f64 + 0.5) / k as f64;
        }
        let x = to_point(&s);
        let v = f(&x)?;
        evals += 1;
        if v > lo {
            lo = v;
            arg = x;
        }
        heap.push(Cell { ub: v + rho0, level: 0, center: s.clone() });
        if lo > abort {
            return Ok((CertifiedInterval::new(lo, f64::INFINITY, "aborted", evals), arg));
        }
        let mut i = 0;
        loop {
            if i == m {
                break;
            }
            idx[i] += 1;
            if idx[i] < k {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
        if i == m {
            break;
        }
    }
    let children = 1u64 << m;
    let mut exhausted = false;
    loop {
        let top = heap.peek().expect("heap is never empty");
        if top.ub - lo <= opts.tol {
            break;
        }
        if evals + children > opts.max_evals {
            exhausted = true;
            break;
        }
        let cell = heap.pop().unwrap();
        let level = cell.level + 1;
        let h = 1.0 / (k as f64 * (1u64 << level) as f64);
        let rho = rho0 / (1u64 << level) as f64;
        for mask in 0..children {
            let c: Vec<f64> = (0..m)
                .map(|i| cell.center[i] + if (mask >> i) & 1 == 1 { 0.5 * h } else { -0.5 * h })
                .collect();
            let x = to_point(&c);
            let v = f(&x)?;
            evals += 1;
            if v > lo {
                lo = v;
                arg = x;
            }
            if v + rho > lo {
                heap.push(Cell { ub: v + rho, level, center: c });
            }
        }
        if lo > abort {
            return Ok((CertifiedInterval::new(lo, f64::INFINITY, "aborted", evals), arg));
        }
    }
    let top = heap.peek().map_or(lo, |c| c.ub);
    let hi = top.max(lo) * (1.0 + 1e-12);
    let method = if exhausted { "lipschitz-grid/budget" } else { "lipschitz-grid" };
    Ok((CertifiedInterval::new(lo, hi, method, evals), arg))
}

/// Grid and refinement settings for covering-radius certificates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoveringOptions {
    /// Grid step in basis coordinates; the default is 1/64 in 2D and 1/24 in 3D.
    pub mesh: Option<f64>,
    /// Refine until `hi - lo <= tol`.
    pub tol: Option<f64>,
    pub max_evals: u64,
}

impl Default for CoveringOptions {
    fn default() -> Self {
        CoveringOptions { mesh: None, tol: Some(1e-3), max_evals: 400_000 }
    }
}

impl CoveringOptions {
    pub fn mesh(h: f64) -> Self {
        CoveringOptions { mesh: Some(h), tol: None, max_evals: 400_000 }
    }

    pub(crate) fn to_lipschitz(&self, m: usize) -> Result<LipschitzOptions> {
        let per_axis = match self.mesh {
            Some(h) if h > 0.0 && h.is_finite() => (1.0 / h).ceil() as usize,
            Some(h) => return Err(Error::InvalidArgument(format!("mesh must be positive, got {h}"))),
            None => match m {
                1 => 256,
                2 => 64,
                3 => 24,
                4 => 10,
                _ => 4,
            },
        };
        Ok(LipschitzOptions {
            per_axis,
            tol: self.tol.unwrap_or(f64::INFINITY),
            max_evals: self.max_evals,
            abort_above: None,
        })
    }
}

fn covering_inner(
    space: &Space,
    red: &Lattice,
    opts: &CoveringOptions,
    seeds: &[Vec<f64>],
) -> Result<CertifiedInterval> {
    let lopts = opts.to_lipschitz(red.rank())?;
    let mut cvp = Closest::new(space, red)?;
    let (iv, _) = lipschitz_max(space, red.basis(), &lopts, seeds, |x| cvp.distance(x))?;
    Ok(iv)
}

/// Certified covering radius of a full-rank lattice in the norm of `space`.
pub fn covering_radius(space: &Space, lat: &Lattice, opts: &CoveringOptions) -> Result<CertifiedInterval> {
    if lat.dim() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: lat.dim() });
    }
    if !lat.is_full_rank() {
        return Err(Error::RankDeficient { rank: lat.rank(), dim: lat.dim() });
    }
    let red = lat.lll(0.99);
    covering_inner(space, &red, opts, &[])
}

/// Packing, covering and `γ* = 2μ/λ₁` for one lattice.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GammaStarEstimate {
    pub packing_sep: CertifiedInterval,
    pub covering: CertifiedInterval,
    pub gamma_star: CertifiedInterval,
    pub lattice: Lattice,
}

pub fn gamma_star_of_lattice(space: &Space, lat: &Lattice, opts: &CoveringOptions) -> Result<GammaStarEstimate> {
    if lat.dim() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: lat.dim() });
    }
    if !lat.is_full_rank() {
        return Err(Error::RankDeficient { rank: lat.rank(), dim: lat.dim() });
    }
    let red = lat.lll(0.99);
    let (_, v, lambda1) = Closest::new(space, &red)?.shortest()?;
    // v/2 is exactly λ₁/2 from the lattice, which keeps γ*.lo >= 1
    let half: Vec<f64> = v.iter().map(|c| 0.5 * c).collect();
    let covering = covering_inner(space, &red, opts, &[half])?;
    let g = CertifiedInterval::new(
        2.0 * covering.lo / lambda1,
        2.0 * covering.hi / lambda1,
        covering.method.clone(),
        covering.evaluations,
    );
    Ok(GammaStarEstimate {
        packing_sep: CertifiedInterval::exact(lambda1, "enumeration"),
        covering,
        gamma_star: g,
        lattice: lat.clone(),
    })
}
