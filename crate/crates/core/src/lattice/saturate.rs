//! Greedy maximal 2-separated sets on the torus `R^n / Λ`.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::CertifiedInterval;
use crate::norms::Space;
use crate::rng::{self, derive_seed};

use super::covering::{lipschitz_max, LipschitzOptions};
use super::enumerate::Closest;
use super::Lattice;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SaturateOptions {
    pub samples: usize,
    pub seed: u64,
    /// Independent shuffles; the one with the smallest certified radius wins.
    pub restarts: usize,
    /// Rounds of inserting the deepest hole while it is at least 2 away.
    pub deep_hole_rounds: usize,
    pub per_axis: usize,
    pub tol: f64,
}

impl Default for SaturateOptions {
    fn default() -> Self {
        SaturateOptions { samples: 2000, seed: 0, restarts: 4, deep_hole_rounds: 64, per_axis: 32, tol: 0.005 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Saturation {
    /// Representatives in the fundamental domain; the origin is always first.
    pub centers: Vec<Vec<f64>>,
    /// Certified covering radius of `centers + Λ`.
    pub r: CertifiedInterval,
    pub base: Lattice,
}

fn torus_dist(cvp: &mut Closest, x: &[f64], centers: &[Vec<f64>]) -> Result<f64> {
    let mut best = f64::INFINITY;
    let mut d = vec![0.0; x.len()];
    for c in centers {
        for i in 0..x.len() {
            d[i] = x[i] - c[i];
        }
        best = best.min(cvp.distance(&d)?);
    }
    Ok(best)
}

pub fn saturate_packing(space: &Space, base: &Lattice, opts: &SaturateOptions) -> Result<Saturation> {
    if base.dim() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: base.dim() });
    }
    if !base.is_full_rank() {
        return Err(Error::RankDeficient { rank: base.rank(), dim: base.dim() });
    }
    let red = base.lll(0.99);
    let (_, _, l1) = Closest::new(space, &red)?.shortest()?;
    if l1 < 2.0 - 1e-9 {
        return Err(Error::InvalidArgument(format!("base lattice is not 2-separated (shortest vector {l1})")));
    }
    let m = red.rank();
    let mut best: Option<Saturation> = None;
    for restart in 0..opts.restarts.max(1) {
        let mut rng = rng::rng(derive_seed(opts.seed, restart as u64));
        let mut cvp = Closest::new(space, &red)?;
        let mut pts: Vec<Vec<f64>> = (0..opts.samples)
            .map(|_| {
                let s: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
                red.combine(&s)
            })
            .collect();
        pts.shuffle(&mut rng);
        let mut centers = vec![vec![0.0; space.dim()]];
        for x in &pts {
            if torus_dist(&mut cvp, x, &centers)? >= 2.0 {
                centers.push(x.clone());
            }
        }
        let quick = LipschitzOptions { per_axis: opts.per_axis, tol: 0.01, max_evals: 200_000, abort_above: None };
        for _ in 0..opts.deep_hole_rounds {
            let (iv, arg) = lipschitz_max(space, red.basis(), &quick, &[], |x| torus_dist(&mut cvp, x, &centers))?;
            if iv.lo >= 2.0 {
                centers.push(arg);
            } else {
                break;
            }
        }
        let cert = LipschitzOptions { per_axis: opts.per_axis, tol: opts.tol, max_evals: 1_000_000, abort_above: None };
        let (r, _) = lipschitz_max(space, red.basis(), &cert, &[], |x| torus_dist(&mut cvp, x, &centers))?;
        if best.as_ref().is_none_or(|b| r.hi < b.r.hi) {
            best = Some(Saturation { centers, r, base: base.clone() });
        }
    }
    Ok(best.expect("at least one restart"))
}
