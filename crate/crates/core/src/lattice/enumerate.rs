//! Depth-first enumeration of lattice points in Gram–Schmidt coordinates
//! (Schnorr–Euchner order) and the exact shortest/closest vector queries
//! built on it.

use crate::error::{Error, Result};
use crate::norms::Space;

use super::Lattice;

const SAFETY: f64 = 1.0 + 1e-9;

/// Node budget used when the caller does not supply one.
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

struct Walker<'a, F> {
    lat: &'a Lattice,
    center: &'a [f64],
    radius2: f64,
    abs_eps: f64,
    u: Vec<i64>,
    nodes: u64,
    budget: u64,
    visit: F,
}

impl<F: FnMut(&[i64], f64) -> Option<f64>> Walker<'_, F> {
    fn bound(&self) -> f64 {
        self.radius2 * SAFETY + self.abs_eps
    }

    fn level(&mut self, k: usize, partial: f64) -> Result<()> {
        let m = self.lat.rank();
        let mut c = self.center[k];
        for j in k + 1..m {
            c -= self.lat.mu[j][k] * (self.u[j] as f64 - self.center[j]);
        }
        let bk = self.lat.bnorm2[k];
        let u0 = c.round();
        let frac = c - u0;
        // offsets from u0 in order of increasing |u - c|
        let mut step = 0i64;
        loop {
            let off = if step == 0 {
                0
            } else if (step % 2 == 1) == (frac >= 0.0) {
                (step + 1) / 2
            } else {
                -((step + 1) / 2)
            };
            step += 1;
            let uk = u0 + off as f64;
            let d = uk - c;
            let part = partial + d * d * bk;
            if part > self.bound() {
                // candidates come in order of non-decreasing distance
                return Ok(());
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::BudgetExhausted(format!(
                    "lattice enumeration exceeded {} nodes",
                    self.budget
                )));
            }
            self.u[k] = uk as i64;
            if k == 0 {
                if let Some(r2) = (self.visit)(&self.u, part) {
                    self.radius2 = r2;
                }
            } else {
                self.level(k - 1, part)?;
            }
        }
    }
}

/// Visits every integer vector `u` whose in-span squared Euclidean distance
/// `|Σ (u_i - center_i) b_i|^2` is at most `radius2` (with a relative safety
/// factor). The callback may return a smaller `radius2`.
pub(crate) fn enumerate<F>(
    lat: &Lattice,
    center: &[f64],
    radius2: f64,
    budget: u64,
    visit: F,
) -> Result<u64>
where
    F: FnMut(&[i64], f64) -> Option<f64>,
{
    let m = lat.rank();
    let bmax = lat.bnorm2.iter().cloned().fold(0.0, f64::max);
    let mut w = Walker {
        lat,
        center,
        radius2: radius2.max(0.0),
        abs_eps: 1e-12 * bmax,
        u: vec![0; m],
        nodes: 0,
        budget,
        visit,
    };
    w.level(m - 1, 0.0)?;
    Ok(w.nodes)
}

/// Babai nearest-plane coefficients for the projected target `t`.
pub(crate) fn babai(lat: &Lattice, t: &[f64]) -> Vec<i64> {
    let m = lat.rank();
    let mut u = vec![0i64; m];
    for k in (0..m).rev() {
        let mut c = t[k];
        for j in k + 1..m {
            c -= lat.mu[j][k] * (u[j] as f64 - t[j]);
        }
        u[k] = c.round() as i64;
    }
    u
}

/// Reusable exact closest-vector context for one (space, lattice) pair.
pub struct Closest<'a> {
    space: &'a Space,
    lat: Lattice,
    c1: f64,
    budget: u64,
    scratch: Vec<f64>,
}

/// Outcome of a closest-vector query.
#[derive(Clone, Debug)]
pub struct ClosestPoint {
    pub coeffs: Vec<i64>,
    pub point: Vec<f64>,
    pub distance: f64,
    pub nodes: u64,
}

impl<'a> Closest<'a> {
    pub fn new(space: &'a Space, lat: &Lattice) -> Result<Closest<'a>> {
        if space.dim() != lat.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), got: lat.dim() });
        }
        Ok(Closest {
            space,
            lat: lat.clone(),
            c1: space.euclid_bounds().0,
            budget: DEFAULT_NODE_BUDGET,
            scratch: vec![0.0; lat.dim()],
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lat
    }

    fn residual_norm(&mut self, x: &[f64], u: &[i64]) -> f64 {
        self.scratch.copy_from_slice(x);
        for (k, b) in u.iter().zip(&self.lat.basis) {
            if *k != 0 {
                let k = *k as f64;
                for (s, bi) in self.scratch.iter_mut().zip(b) {
                    *s -= k * bi;
                }
            }
        }
        self.space.norm(&self.scratch)
    }

    /// Distance from `x` to the lattice.
    pub fn distance(&mut self, x: &[f64]) -> Result<f64> {
        Ok(self.query(x, None)?.distance)
    }

    /// Closest lattice point to `x`. With `stop_below = Some(r)` the search
    /// returns as soon as some point within `r` is found.
    pub fn query(&mut self, x: &[f64], stop_below: Option<f64>) -> Result<ClosestPoint> {
        let (t, perp2) = self.lat.project(x);
        let mut best_u = babai(&self.lat, &t);
        let mut best = self.residual_norm(x, &best_u);
        let c1 = self.c1;
        let radius2 = |best: f64| ((best / c1).powi(2) * SAFETY - perp2).max(0.0);
        let stop = stop_below.unwrap_or(-1.0);
        let mut nodes = 0;
        if best > stop {
            let mut found = false;
            let space = self.space;
            let basis = &self.lat.basis;
            let scratch = &mut self.scratch;
            nodes = enumerate(&self.lat, &t, radius2(best), self.budget, |u, _| {
                if found {
                    return Some(-1.0);
                }
                scratch.copy_from_slice(x);
                for (k, b) in u.iter().zip(basis) {
                    if *k != 0 {
                        let k = *k as f64;
                        for (s, bi) in scratch.iter_mut().zip(b) {
                            *s -= k * bi;
                        }
                    }
                }
                let d = space.norm(scratch);
                if d < best {
                    best = d;
                    best_u.copy_from_slice(u);
                    if d <= stop {
                        found = true;
                        return Some(-1.0);
                    }
                    return Some(radius2(d));
                }
                None
            })?;
        }
        let point = self.lat.point(&best_u);
        Ok(ClosestPoint { coeffs: best_u, point, distance: best, nodes })
    }

    /// Shortest nonzero lattice vector: (coefficients, vector, norm).
    pub fn shortest(&mut self) -> Result<(Vec<i64>, Vec<f64>, f64)> {
        let m = self.lat.rank();
        let mut best = f64::INFINITY;
        let mut best_u = vec![0i64; m];
        for i in 0..m {
            let d = self.space.norm(&self.lat.basis[i]);
            if d < best {
                best = d;
                best_u = vec![0; m];
                best_u[i] = 1;
            }
        }
        let c1 = self.c1;
        let zero = vec![0.0; m];
        let space = self.space;
        let lat = &self.lat;
        let scratch = &mut self.scratch;
        enumerate(lat, &zero, (best / c1).powi(2) * SAFETY, self.budget, |u, _| {
            if u.iter().all(|&k| k == 0) {
                return None;
            }
            scratch.iter_mut().for_each(|s| *s = 0.0);
            for (k, b) in u.iter().zip(&lat.basis) {
                if *k != 0 {
                    let k = *k as f64;
                    for (s, bi) in scratch.iter_mut().zip(b) {
                        *s += k * bi;
                    }
                }
            }
            let d = space.norm(scratch);
            if d < best {
                best = d;
                best_u.copy_from_slice(u);
                return Some((d / c1).powi(2) * SAFETY);
            }
            None
        })?;
        let v = self.lat.point(&best_u);
        Ok((best_u, v, best))
    }
}

fn prepared(lat: &Lattice) -> Lattice {
    if lat.rank() <= 8 {
        lat.lll(0.99)
    } else {
        lat.clone()
    }
}

/// Exact shortest nonzero lattice vector and its norm.
pub fn shortest_vector(space: &Space, lat: &Lattice) -> Result<(Vec<f64>, f64)> {
    let red = prepared(lat);
    let mut c = Closest::new(space, &red)?;
    let (_, v, d) = c.shortest()?;
    Ok((v, d))
}

/// Exact distance from `x` to the lattice in the norm of `space`.
pub fn dist_to_lattice(space: &Space, lat: &Lattice, x: &[f64]) -> Result<f64> {
    if x.len() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), got: x.len() });
    }
    let red = prepared(lat);
    Closest::new(space, &red)?.distance(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_shortest(space: &Space, lat: &Lattice, box_: i64) -> f64 {
        let m = lat.rank();
        let mut best = f64::INFINITY;
        let mut u = vec![-box_; m];
        loop {
            if u.iter().any(|&k| k != 0) {
                best = best.min(space.norm(&lat.point(&u)));
            }
            let mut i = 0;
            loop {
                if i == m {
                    return best;
                }
                u[i] += 1;
                if u[i] <= box_ {
                    break;
                }
                u[i] = -box_;
                i += 1;
            }
        }
    }

    #[test]
    fn enumeration_counts_ball_points() {
        let l = Lattice::scaled_identity(2, 1.0);
        let mut count = 0;
        enumerate(&l, &[0.0, 0.0], 4.0, 1000, |_, _| {
            count += 1;
            None
        })
        .unwrap();
        // integer points with x^2 + y^2 <= 4
        assert_eq!(count, 13);
    }

    #[test]
    fn hexagonal_shortest_matches_brute_force() {
        let s = Space::lp(2.0, 2).unwrap();
        let l = Lattice::hexagonal();
        let (_, d) = shortest_vector(&s, &l).unwrap();
        assert!((d - brute_shortest(&s, &l, 3)).abs() < 1e-12);
        assert!((d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rank_deficient_closest() {
        let s = Space::lp(1.0, 3).unwrap();
        let l = Lattice::new(vec![vec![1.0, 1.0, 0.0]]).unwrap();
        let d = dist_to_lattice(&s, &l, &[2.2, 1.9, 0.5]).unwrap();
        assert!((d - (0.2 + 0.1 + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn stop_below_returns_early_hit() {
        let s = Space::lp(2.0, 2).unwrap();
        let l = Lattice::scaled_identity(2, 1.0);
        let mut c = Closest::new(&s, &l).unwrap();
        let r = c.query(&[3.1, -0.2], Some(1.0)).unwrap();
        assert!(r.distance <= 1.0);
    }
}
