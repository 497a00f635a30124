//! Simulated annealing over lattice bases for small γ*.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::Space;
use crate::rng::{self, derive_seed, Rng};

use super::covering::{gamma_star_of_lattice, lipschitz_max, CoveringOptions, GammaStarEstimate, LipschitzOptions};
use super::enumerate::Closest;
use super::Lattice;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptimizeOptions {
    /// Upper limit on proposals; the chain may stop earlier on stagnation.
    pub budget: u64,
    pub seed: u64,
    /// Stop after this many proposals without a new best (once the
    /// temperature has cooled).
    pub stagnation: u64,
    pub initial_temperature: f64,
    /// Grid points per axis of the coarse objective.
    pub coarse_per_axis: usize,
    pub coarse_tol: f64,
    /// Tolerance of the final certificate.
    pub final_tol: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            budget: 200_000,
            seed: 0,
            stagnation: 1500,
            initial_temperature: 0.02,
            coarse_per_axis: 0,
            coarse_tol: 0.01,
            final_tol: 0.002,
        }
    }
}

struct State {
    lat: Lattice,
    hi: f64,
    hole: Vec<f64>,
}

struct Objective<'a> {
    space: &'a Space,
    lopts: LipschitzOptions,
}

impl Objective<'_> {
    /// Reduces, rescales to λ₁ = 2 and returns the coarse certified upper
    /// bound on μ, or `None` when the value provably exceeds `abort`.
    fn eval(&self, basis: Vec<Vec<f64>>, abort: f64, hole: Option<&[f64]>) -> Result<Option<State>> {
        let lat = match Lattice::new(basis) {
            Ok(l) => l.lll(0.99),
            Err(_) => return Ok(None),
        };
        let (_, _, l1) = Closest::new(self.space, &lat)?.shortest()?;
        if !(l1 > 0.0 && l1.is_finite()) {
            return Ok(None);
        }
        let lat = lat.scaled(2.0 / l1);
        let mut opts = self.lopts.clone();
        opts.abort_above = Some(abort);
        let seeds: Vec<Vec<f64>> = hole.map(|h| vec![h.to_vec()]).unwrap_or_default();
        let mut cvp = Closest::new(self.space, &lat)?;
        let (iv, arg) = lipschitz_max(self.space, lat.basis(), &opts, &seeds, |x| cvp.distance(x))?;
        if iv.method == "aborted" || iv.hi > abort {
            return Ok(None);
        }
        Ok(Some(State { lat, hi: iv.hi, hole: arg }))
    }
}

fn starting_bases(n: usize, rng: &mut Rng) -> Vec<Vec<Vec<f64>>> {
    let id: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let mut out = vec![id];
    match n {
        2 => out.push(vec![vec![2.0, 0.0], vec![1.0, 3f64.sqrt()]]),
        3 => {
            out.push(vec![vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]]);
            out.push(vec![vec![2.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![1.0, 1.0, 1.0]]);
        }
        4 => {
            out.push(vec![
                vec![1.0, 1.0, 0.0, 0.0],
                vec![1.0, -1.0, 0.0, 0.0],
                vec![0.0, 1.0, -1.0, 0.0],
                vec![0.0, 0.0, 1.0, -1.0],
            ]);
        }
        _ => {}
    }
    for _ in 0..4 {
        out.push((0..n).map(|_| rng::gaussian_vec(rng, n)).collect());
    }
    out
}

/// Searches for a lattice with small γ* in the norm of `space`.
pub fn optimize_lattice(space: &Space, n: usize, budget: u64, seed: u64) -> Result<GammaStarEstimate> {
    optimize_lattice_with(space, n, &OptimizeOptions { budget, seed, ..Default::default() })
}

pub fn optimize_lattice_with(space: &Space, n: usize, opts: &OptimizeOptions) -> Result<GammaStarEstimate> {
    if n != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: n });
    }
    if !(1..=4).contains(&n) {
        return Err(Error::InvalidArgument(format!("optimize_lattice supports dimensions 1..=4, got {n}")));
    }
    let per_axis = if opts.coarse_per_axis > 0 {
        opts.coarse_per_axis
    } else {
        match n {
            1 => 16,
            2 => 8,
            3 => 5,
            _ => 4,
        }
    };
    let obj = Objective {
        space,
        lopts: LipschitzOptions { per_axis, tol: opts.coarse_tol, max_evals: 20_000, abort_above: None },
    };
    let mut rng = rng::rng(derive_seed(opts.seed, 0x6f70_7469));

    let mut current: Option<State> = None;
    for b in starting_bases(n, &mut rng) {
        let bound = current.as_ref().map_or(f64::INFINITY, |s| s.hi);
        if let Some(s) = obj.eval(b, bound, None)? {
            current = Some(s);
        }
    }
    let mut current = current.ok_or_else(|| Error::InvalidArgument("no admissible starting lattice".into()))?;
    let mut best_lat = current.lat.clone();
    let mut best_hi = current.hi;

    let mut temp = opts.initial_temperature;
    let mut sigma = 0.05 * 2.0;
    let mut since_best = 0u64;
    let mut proposals = 0u64;
    let mut polishing = false;
    let mut since_shrink = 0u64;
    while proposals < opts.budget {
        proposals += 1;
        let mut basis = current.lat.basis().to_vec();
        let i = rng.random_range(0..n);
        let g = rng::gaussian_vec(&mut rng, n);
        for (bj, gj) in basis[i].iter_mut().zip(&g) {
            *bj += sigma * gj;
        }
        let u: f64 = rng.random::<f64>().max(1e-300);
        let threshold = if polishing { current.hi } else { current.hi - temp * u.ln() };
        let accepted = obj.eval(basis, threshold, Some(&current.hole))?;
        if let Some(s) = accepted {
            if s.hi < best_hi - 1e-12 {
                best_hi = s.hi;
                best_lat = s.lat.clone();
                since_best = 0;
                since_shrink = 0;
            }
            current = s;
        }
        since_best += 1;
        since_shrink += 1;
        if !polishing && proposals % 20 == 0 {
            temp *= 0.95;
        }
        if !polishing && since_best >= opts.stagnation && temp < 1e-3 {
            // greedy refinement with shrinking proposals from the best state
            polishing = true;
            current = obj
                .eval(best_lat.basis().to_vec(), f64::INFINITY, None)?
                .expect("best state re-evaluates");
            sigma *= 0.5;
            since_shrink = 0;
        } else if polishing && since_shrink >= 60 {
            sigma *= 0.5;
            since_shrink = 0;
            if sigma < 1e-4 {
                break;
            }
        }
    }

    let fine = CoveringOptions { mesh: None, tol: Some(opts.final_tol), max_evals: 2_000_000 };
    gamma_star_of_lattice(space, &best_lat, &fine)
}
