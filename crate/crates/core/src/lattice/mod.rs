//! Lattices under arbitrary norms.

mod covering;
pub(crate) mod enumerate;
mod optimize;
mod saturate;
pub(crate) mod voronoi;

pub use covering::{covering_radius, gamma_star_of_lattice, CoveringOptions, GammaStarEstimate};

pub use enumerate::{dist_to_lattice, shortest_vector, Closest};
pub use optimize::{optimize_lattice, OptimizeOptions};
pub use saturate::{saturate_packing, SaturateOptions, Saturation};
pub use voronoi::voronoi_gauge;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, solve};

/// `m` linearly independent vectors in `R^n` with cached Gram and
/// Gram–Schmidt data.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "LatticeRepr", into = "LatticeRepr")]
pub struct Lattice {
    basis: Vec<Vec<f64>>,
    gram: Vec<Vec<f64>>,
    /// `mu[i][j]` for `j < i`.
    mu: Vec<Vec<f64>>,
    /// Squared lengths of the Gram–Schmidt vectors.
    bnorm2: Vec<f64>,
    bstar: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeRepr {
    basis: Vec<Vec<f64>>,
}

impl TryFrom<LatticeRepr> for Lattice {
    type Error = Error;
    fn try_from(r: LatticeRepr) -> Result<Lattice> {
        Lattice::new(r.basis)
    }
}

impl From<Lattice> for LatticeRepr {
    fn from(l: Lattice) -> LatticeRepr {
        LatticeRepr { basis: l.basis }
    }
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Lattice) -> bool {
        self.basis == other.basis
    }
}

impl Lattice {
    pub fn new(basis: Vec<Vec<f64>>) -> Result<Lattice> {
        let m = basis.len();
        if m == 0 {
            return Err(Error::DegenerateLattice("empty basis".into()));
        }
        let n = basis[0].len();
        if n == 0 || basis.iter().any(|b| b.len() != n) {
            return Err(Error::DegenerateLattice("basis vectors must share a positive length".into()));
        }
        if m > n {
            return Err(Error::DegenerateLattice(format!("{m} vectors in dimension {n}")));
        }
        if basis.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::DegenerateLattice("non-finite basis entry".into()));
        }
        let gram: Vec<Vec<f64>> =
            basis.iter().map(|a| basis.iter().map(|b| dot(a, b)).collect()).collect();
        let (mu, bnorm2, bstar) = gram_schmidt(&basis);
        for i in 0..m {
            if !(bnorm2[i] > 1e-12 * gram[i][i]) || gram[i][i] == 0.0 {
                return Err(Error::DegenerateLattice(format!(
                    "basis vector {i} is (numerically) dependent on the previous ones"
                )));
            }
        }
        Ok(Lattice { basis, gram, mu, bnorm2, bstar })
    }

    /// `scale * Z^n`.
    pub fn scaled_identity(n: usize, scale: f64) -> Lattice {
        let basis = (0..n)
            .map(|i| (0..n).map(|j| if i == j { scale } else { 0.0 }).collect())
            .collect();
        Lattice::new(basis).expect("scaled identity is a lattice")
    }

    /// Hexagonal lattice with minimal Euclidean length 2: `{(2,0), (1,√3)}`.
    pub fn hexagonal() -> Lattice {
        Lattice::new(vec![vec![2.0, 0.0], vec![1.0, 3f64.sqrt()]]).unwrap()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn gram(&self) -> &[Vec<f64>] {
        &self.gram
    }

    pub fn gs_norms2(&self) -> &[f64] {
        &self.bnorm2
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.basis[0].len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim()
    }

    pub fn determinant(&self) -> f64 {
        self.bnorm2.iter().product::<f64>().sqrt()
    }

    /// `Σ k_i b_i`.
    pub fn point(&self, coeffs: &[i64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        for (k, b) in coeffs.iter().zip(&self.basis) {
            if *k != 0 {
                let k = *k as f64;
                for (yi, bi) in y.iter_mut().zip(b) {
                    *yi += k * bi;
                }
            }
        }
        y
    }

    /// `Σ s_i b_i` for real coordinates `s`.
    pub fn combine(&self, s: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        for (k, b) in s.iter().zip(&self.basis) {
            for (yi, bi) in y.iter_mut().zip(b) {
                *yi += k * bi;
            }
        }
        y
    }

    /// Coordinates of the orthogonal projection of `x` onto the span, and
    /// the squared Euclidean length of the perpendicular remainder.
    pub fn project(&self, x: &[f64]) -> (Vec<f64>, f64) {
        let m = self.rank();
        // coefficients along the Gram–Schmidt vectors, then back-substitute
        let mut c: Vec<f64> = (0..m).map(|i| dot(x, &self.bstar[i]) / self.bnorm2[i]).collect();
        let mut perp = dot(x, x) - (0..m).map(|i| c[i] * c[i] * self.bnorm2[i]).sum::<f64>();
        if perp < 0.0 {
            perp = 0.0;
        }
        for i in (0..m).rev() {
            for j in i + 1..m {
                c[i] -= self.mu[j][i] * c[j];
            }
        }
        (c, perp)
    }

    /// Real coordinates of `x` in a full-rank basis.
    pub fn coordinates(&self, x: &[f64]) -> Result<Vec<f64>> {
        let t: Vec<Vec<f64>> = (0..self.dim())
            .map(|i| self.basis.iter().map(|b| b[i]).collect())
            .collect();
        solve(&t, x).ok_or_else(|| Error::DegenerateLattice("singular basis".into()))
    }

    pub fn scaled(&self, s: f64) -> Lattice {
        Lattice::new(self.basis.iter().map(|b| b.iter().map(|v| v * s).collect()).collect())
            .expect("scaling preserves independence")
    }

    /// LLL reduction with parameter `delta` in the Euclidean metric.
    pub fn lll(&self, delta: f64) -> Lattice {
        let mut b = self.basis.clone();
        let m = b.len();
        let (mut mu, mut bn, _) = gram_schmidt(&b);
        let mut k = 1;
        let mut guard = 0usize;
        while k < m && guard < 100_000 {
            guard += 1;
            for j in (0..k).rev() {
                let q = mu[k][j].round();
                if q != 0.0 {
                    let bj = b[j].clone();
                    for (x, y) in b[k].iter_mut().zip(&bj) {
                        *x -= q * y;
                    }
                    for l in 0..j {
                        mu[k][l] -= q * mu[j][l];
                    }
                    mu[k][j] -= q;
                }
            }
            if bn[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bn[k - 1] {
                k += 1;
            } else {
                b.swap(k, k - 1);
                let g = gram_schmidt(&b);
                mu = g.0;
                bn = g.1;
                k = (k - 1).max(1);
            }
        }
        Lattice::new(b).unwrap_or_else(|_| self.clone())
    }
}

fn gram_schmidt(basis: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>) {
    let m = basis.len();
    let mut mu = vec![vec![0.0; m]; m];
    let mut bn = vec![0.0; m];
    let mut bstar: Vec<Vec<f64>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut v = basis[i].clone();
        // two passes of modified Gram–Schmidt for stability
        for _ in 0..2 {
            for j in 0..i {
                let c = dot(&v, &bstar[j]) / bn[j];
                for (a, b) in v.iter_mut().zip(&bstar[j]) {
                    *a -= c * b;
                }
            }
        }
        for j in 0..i {
            mu[i][j] = dot(&basis[i], &bstar[j]) / bn[j];
        }
        bn[i] = dot(&v, &v);
        bstar.push(v);
    }
    (mu, bn, bstar)
}
