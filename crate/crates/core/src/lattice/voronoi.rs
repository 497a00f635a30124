//! The norm whose unit ball is the Euclidean Voronoi cell of a lattice.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2};

use super::enumerate::{enumerate, DEFAULT_NODE_BUDGET};
use super::Lattice;

/// Voronoi-relevant vectors `d` stored as `2d / <d,d>`, one per `±d` pair.
#[derive(Clone, Debug)]
pub(crate) struct VoronoiCell {
    scaled: Vec<Vec<f64>>,
    babai_bound: f64,
}

impl VoronoiCell {
    pub fn new(lat: &Lattice) -> Result<VoronoiCell> {
        let red = lat.lll(0.99);
        let bound = 0.5 * red.gs_norms2().iter().sum::<f64>().sqrt();
        let radius2 = (2.0 * bound).powi(2);
        let zero = vec![0.0; red.rank()];
        let mut vecs: Vec<(Vec<i64>, f64)> = Vec::new();
        enumerate(&red, &zero, radius2, DEFAULT_NODE_BUDGET, |u, _| {
            if u.iter().any(|&k| k != 0) {
                let v = red.point(u);
                vecs.push((u.to_vec(), dot(&v, &v)));
            }
            None
        })?;
        // d is relevant iff ±d are the only shortest members of d + 2Λ
        let mut classes: HashMap<Vec<i64>, (f64, usize)> = HashMap::new();
        for (u, n2) in &vecs {
            let key: Vec<i64> = u.iter().map(|k| k.rem_euclid(2)).collect();
            let e = classes.entry(key).or_insert((f64::INFINITY, 0));
            let tol = 1e-9 * n2.max(1.0);
            if *n2 < e.0 - tol {
                *e = (*n2, 1);
            } else if (*n2 - e.0).abs() <= tol {
                e.1 += 1;
            }
        }
        let mut scaled = Vec::new();
        for (u, n2) in &vecs {
            let key: Vec<i64> = u.iter().map(|k| k.rem_euclid(2)).collect();
            let (min, count) = classes[&key];
            let first_nonzero_positive = u.iter().find(|&&k| k != 0).is_some_and(|&k| k > 0);
            if count == 2 && (*n2 - min).abs() <= 1e-9 * n2.max(1.0) && first_nonzero_positive {
                let d = red.point(u);
                scaled.push(d.iter().map(|c| 2.0 * c / n2).collect());
            }
        }
        if scaled.is_empty() {
            return Err(Error::DegenerateLattice("no Voronoi-relevant vectors found".into()));
        }
        Ok(VoronoiCell { scaled, babai_bound: bound })
    }

    #[inline]
    pub fn gauge(&self, x: &[f64]) -> f64 {
        self.scaled.iter().map(|s| dot(s, x).abs()).fold(0.0, f64::max)
    }

    pub fn euclid_bounds(&self) -> (f64, f64) {
        let c2 = self.scaled.iter().map(|s| norm2(s)).fold(0.0, f64::max);
        (1.0 / self.babai_bound, c2)
    }

    #[cfg(test)]
    pub fn relevant_count(&self) -> usize {
        2 * self.scaled.len()
    }
}

/// Gauge of the Euclidean Voronoi cell of `lat` at `x`.
pub fn voronoi_gauge(lat: &Lattice, x: &[f64]) -> Result<f64> {
    if !lat.is_full_rank() {
        return Err(Error::DegenerateLattice("Voronoi gauge needs a full-rank lattice".into()));
    }
    if x.len() != lat.dim() {
        return Err(Error::DimensionMismatch { expected: lat.dim(), got: x.len() });
    }
    Ok(VoronoiCell::new(lat)?.gauge(x))
}
