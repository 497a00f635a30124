//! Finite dispersion: `m` points in the unit ball with the largest minimum
//! pairwise distance we can find.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{sphere_sample, Space};
use crate::rng::derive_seed;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionBudget {
    /// Full repulsion sweeps per start.
    pub sweeps: usize,
    /// Random starts in addition to the deterministic seeds.
    pub random_starts: usize,
    pub max_m: usize,
}

impl Default for DispersionBudget {
    fn default() -> Self {
        DispersionBudget { sweeps: 400, random_starts: 4, max_m: 512 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DispersionResult {
    pub points: Vec<Vec<f64>>,
    pub min_separation: f64,
    pub method: String,
    pub iterations: u64,
}

/// Exact minimum of `|x_i - x_j|` over all pairs.
pub fn verify_separation(space: &Space, points: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.min(space.dist(&points[i], &points[j]));
        }
    }
    best
}

fn unit(space: &Space, v: Vec<f64>) -> Option<Vec<f64>> {
    let n = space.norm(&v);
    (n > 0.0 && n.is_finite()).then(|| v.iter().map(|a| a / n).collect())
}

/// `±e_1, ±e_2, …` normalized, topped up with sphere samples.
fn signed_basis(space: &Space, m: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = space.dim();
    let mut pts = Vec::with_capacity(m);
    'outer: for i in 0..n {
        for s in [1.0, -1.0] {
            if pts.len() == m {
                break 'outer;
            }
            let mut e = vec![0.0; n];
            e[i] = s;
            pts.extend(unit(space, e));
        }
    }
    let need = m - pts.len();
    pts.extend(sphere_sample(space, need, seed));
    pts
}

/// Farthest-point selection from a pool of sphere samples.
fn spread(space: &Space, m: usize, seed: u64) -> Vec<Vec<f64>> {
    let pool = sphere_sample(space, (8 * m).max(64), seed);
    let mut chosen = vec![pool[0].clone()];
    let mut nearest: Vec<f64> = pool.iter().map(|p| space.dist(p, &pool[0])).collect();
    while chosen.len() < m {
        let (k, _) = nearest
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, d)| if *d > acc.1 { (i, *d) } else { acc });
        chosen.push(pool[k].clone());
        for (i, p) in pool.iter().enumerate() {
            nearest[i] = nearest[i].min(space.dist(p, &pool[k]));
        }
    }
    chosen
}

/// Regular `m`-gon on the Euclidean circle, pushed to the sphere.
fn polygon(space: &Space, m: usize) -> Vec<Vec<f64>> {
    (0..m)
        .filter_map(|i| {
            let a = std::f64::consts::TAU * i as f64 / m as f64;
            unit(space, vec![a.cos(), a.sin()])
        })
        .collect()
}

fn nearest(space: &Space, pts: &[Vec<f64>], i: usize, x: &[f64]) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    for (j, p) in pts.iter().enumerate() {
        if j != i {
            let d = space.dist(x, p);
            if d < best.1 {
                best = (j, d);
            }
        }
    }
    best
}

/// Moves each point away from its nearest neighbour while that increases
/// its own nearest distance; the global minimum can only go up.
fn repel(space: &Space, pts: &mut [Vec<f64>], sweeps: usize) -> u64 {
    let n = space.dim();
    let mut step = 0.25;
    let mut iters = 0;
    let mut cand = vec![0.0; n];
    for _ in 0..sweeps {
        iters += 1;
        let mut improved = false;
        for i in 0..pts.len() {
            let (j, d) = nearest(space, pts, i, &pts[i]);
            if d == 0.0 {
                continue;
            }
            for k in 0..n {
                cand[k] = pts[i][k] + step * (pts[i][k] - pts[j][k]);
            }
            let c = space.norm(&cand);
            if c > 1.0 {
                cand.iter_mut().for_each(|v| *v /= c);
            }
            if space.norm(&cand) > 1.0 {
                continue;
            }
            let (_, nd) = nearest(space, pts, i, &cand);
            if nd > d {
                pts[i].copy_from_slice(&cand);
                improved = true;
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-9 {
                break;
            }
        }
    }
    iters
}

/// Best configuration found from the deterministic seeds and random
/// starts, each polished by repulsion.
pub fn max_min_separation(space: &Space, m: usize, budget: &DispersionBudget, seed: u64) -> Result<DispersionResult> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 points, got {m}")));
    }
    if m > budget.max_m {
        return Err(Error::InvalidArgument(format!("m = {m} exceeds the configured maximum {}", budget.max_m)));
    }
    let mut starts: Vec<(&str, Vec<Vec<f64>>)> = vec![
        ("signed-basis", signed_basis(space, m, derive_seed(seed, 0))),
        ("spread", spread(space, m, derive_seed(seed, 1))),
    ];
    if space.dim() == 2 {
        starts.push(("polygon", polygon(space, m)));
    }
    for r in 0..budget.random_starts {
        starts.push(("random", sphere_sample(space, m, derive_seed(seed, 2 + r as u64))));
    }
    let mut best: Option<DispersionResult> = None;
    for (name, mut pts) in starts {
        if pts.len() != m {
            continue;
        }
        let before = verify_separation(space, &pts);
        let iterations = repel(space, &mut pts, budget.sweeps);
        let sep = verify_separation(space, &pts);
        let method = if sep > before { format!("{name}+repulsion") } else { name.to_string() };
        if best.as_ref().is_none_or(|b| sep > b.min_separation) {
            best = Some(DispersionResult { points: pts, min_separation: sep, method, iterations });
        }
    }
    Ok(best.expect("signed-basis start always has m points"))
}

/// Results for every `m` in `ms`, adjusted so that the separations are
/// non-increasing in `m`: a configuration for `m + 1` minus one point is a
/// candidate for `m`.
pub fn dispersion_sweep(
    space: &Space,
    ms: &[usize],
    budget: &DispersionBudget,
    seed: u64,
) -> Result<Vec<DispersionResult>> {
    let mut order: Vec<usize> = (0..ms.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(ms[i]));
    let mut out: Vec<Option<DispersionResult>> = vec![None; ms.len()];
    let mut larger: Option<DispersionResult> = None;
    for i in order {
        let m = ms[i];
        let mut r = max_min_separation(space, m, budget, derive_seed(seed, m as u64))?;
        if let Some(big) = &larger {
            if let Some(sub) = shrink_to(space, big, m) {
                if sub.min_separation > r.min_separation {
                    r = sub;
                }
            }
        }
        larger = Some(r.clone());
        out[i] = Some(r);
    }
    Ok(out.into_iter().map(|r| r.expect("every slot filled")).collect())
}

/// Drops points, one endpoint of the closest pair at a time.
fn shrink_to(space: &Space, r: &DispersionResult, m: usize) -> Option<DispersionResult> {
    if m < 2 || m > r.points.len() {
        return None;
    }
    let mut pts = r.points.clone();
    while pts.len() > m {
        let (mut a, mut b, mut d) = (0, 1, f64::INFINITY);
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let e = space.dist(&pts[i], &pts[j]);
                if e < d {
                    (a, b, d) = (i, j, e);
                }
            }
        }
        let without = |k: usize| -> Vec<Vec<f64>> {
            pts.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, p)| p.clone()).collect()
        };
        let (pa, pb) = (without(a), without(b));
        pts = if verify_separation(space, &pb) > verify_separation(space, &pa) { pb } else { pa };
    }
    let min_separation = verify_separation(space, &pts);
    Some(DispersionResult { points: pts, min_separation, method: format!("subset of m={}", r.points.len()), iterations: 0 })
}
