//! Norms, dual norms, supporting functionals and Birkhoff–James orthogonality.

mod descriptor;
mod polytope;

pub use descriptor::SpaceDescriptor;
pub(crate) use descriptor::exponent;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::voronoi::VoronoiCell;
use crate::linalg::dot;
use crate::rng;
use polytope::Polytope;

/// A compiled [`SpaceDescriptor`]: facets, relevant vectors and
/// norm-equivalence constants are computed once here.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "SpaceDescriptor", into = "SpaceDescriptor")]
pub struct Space {
    desc: SpaceDescriptor,
    gauge: Gauge,
    dim: usize,
    c1: f64,
    c2: f64,
}

#[derive(Clone, Debug)]
enum Gauge {
    Lp(f64),
    Weighted(f64, Vec<f64>),
    Polytope(Polytope),
    Sum { r: f64, split: usize, left: Box<Space>, right: Box<Space> },
    Voronoi(VoronoiCell),
}

impl TryFrom<SpaceDescriptor> for Space {
    type Error = Error;
    fn try_from(d: SpaceDescriptor) -> Result<Space> {
        Space::new(d)
    }
}

impl From<Space> for SpaceDescriptor {
    fn from(s: Space) -> SpaceDescriptor {
        s.desc
    }
}

impl PartialEq for Space {
    fn eq(&self, other: &Space) -> bool {
        self.desc == other.desc
    }
}

fn check_exponent(p: f64, what: &str) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidSpace(format!("{what} must be >= 1, got {p}")));
    }
    Ok(())
}

/// `(c1, c2)` with `c1 |x|_2 <= |x|_p <= c2 |x|_2` on `R^n`.
fn lp_euclid_bounds(p: f64, n: usize) -> (f64, f64) {
    let e = (if p.is_infinite() { 0.0 } else { 1.0 / p }) - 0.5;
    let f = (n as f64).powf(e);
    if e >= 0.0 {
        (1.0, f)
    } else {
        (f, 1.0)
    }
}

impl Space {
    pub fn new(desc: SpaceDescriptor) -> Result<Space> {
        let (gauge, dim, c1, c2) = match &desc {
            SpaceDescriptor::Lp { p, n } => {
                check_exponent(*p, "p")?;
                if *n == 0 {
                    return Err(Error::InvalidSpace("dimension must be positive".into()));
                }
                let (c1, c2) = lp_euclid_bounds(*p, *n);
                (Gauge::Lp(*p), *n, c1, c2)
            }
            SpaceDescriptor::WeightedLp { p, weights } => {
                check_exponent(*p, "p")?;
                if weights.is_empty() {
                    return Err(Error::InvalidSpace("dimension must be positive".into()));
                }
                if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return Err(Error::InvalidSpace("weights must be positive and finite".into()));
                }
                let (c1, c2) = lp_euclid_bounds(*p, weights.len());
                let wmin = weights.iter().cloned().fold(f64::INFINITY, f64::min);
                let wmax = weights.iter().cloned().fold(0.0, f64::max);
                (Gauge::Weighted(*p, weights.clone()), weights.len(), c1 * wmin, c2 * wmax)
            }
            SpaceDescriptor::Polytope { vertices } => {
                let poly = Polytope::new(vertices)?;
                let (c1, c2) = poly.euclid_bounds();
                let n = vertices[0].len();
                (Gauge::Polytope(poly), n, c1, c2)
            }
            SpaceDescriptor::Sum { r, left, right } => {
                check_exponent(*r, "r")?;
                let l = Space::new((**left).clone())?;
                let rt = Space::new((**right).clone())?;
                let (o1, o2) = lp_euclid_bounds(*r, 2);
                let c1 = l.c1.min(rt.c1) * o1;
                let c2 = l.c2.max(rt.c2) * o2;
                let split = l.dim;
                let dim = l.dim + rt.dim;
                (Gauge::Sum { r: *r, split, left: Box::new(l), right: Box::new(rt) }, dim, c1, c2)
            }
            SpaceDescriptor::Voronoi { lattice, base } => {
                let euclid = matches!(**base, SpaceDescriptor::Lp { p, n } if p == 2.0 && n == lattice.dim());
                if !euclid {
                    return Err(Error::Unsupported(
                        "Voronoi gauge requires a Euclidean base of the lattice's dimension".into(),
                    ));
                }
                if !lattice.is_full_rank() {
                    return Err(Error::DegenerateLattice("Voronoi gauge needs a full-rank lattice".into()));
                }
                let cell = VoronoiCell::new(lattice)?;
                let (c1, c2) = cell.euclid_bounds();
                (Gauge::Voronoi(cell), lattice.dim(), c1, c2)
            }
        };
        Ok(Space { desc, gauge, dim, c1, c2 })
    }

    pub fn lp(p: f64, n: usize) -> Result<Space> {
        Space::new(SpaceDescriptor::lp(p, n))
    }

    pub fn from_json(s: &str) -> Result<Space> {
        let d: SpaceDescriptor = serde_json::from_str(s)?;
        Space::new(d)
    }

    pub fn descriptor(&self) -> &SpaceDescriptor {
        &self.desc
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(c1, c2)` with `c1 |x|_2 <= |x| <= c2 |x|_2`.
    pub fn euclid_bounds(&self) -> (f64, f64) {
        (self.c1, self.c2)
    }

    /// The exponent when this is an unweighted `l_p` space.
    pub fn lp_exponent(&self) -> Option<f64> {
        match self.gauge {
            Gauge::Lp(p) => Some(p),
            _ => None,
        }
    }

    /// True if `|x| >= |P x|` for every coordinate projection `P`.
    pub fn is_coordinate_monotone(&self) -> bool {
        match &self.gauge {
            Gauge::Lp(_) | Gauge::Weighted(..) => true,
            Gauge::Sum { left, right, .. } => left.is_coordinate_monotone() && right.is_coordinate_monotone(),
            _ => false,
        }
    }

    /// Norm of `x`; the length is only checked in debug builds.
    #[inline]
    pub fn norm(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.gauge {
            Gauge::Lp(p) => lp_norm(*p, x.iter().copied()),
            Gauge::Weighted(p, w) => lp_norm(*p, x.iter().zip(w).map(|(a, b)| a * b)),
            Gauge::Polytope(poly) => poly.gauge(x),
            Gauge::Sum { r, split, left, right } => {
                let a = left.norm(&x[..*split]);
                let b = right.norm(&x[*split..]);
                lp_norm(*r, [a, b].into_iter())
            }
            Gauge::Voronoi(cell) => cell.gauge(x),
        }
    }

    /// Norm of `a - b` without allocating for small dimensions.
    #[inline]
    pub fn dist(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut buf = [0.0f64; 8];
        if a.len() <= 8 {
            for i in 0..a.len() {
                buf[i] = a[i] - b[i];
            }
            self.norm(&buf[..a.len()])
        } else {
            let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            self.norm(&d)
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("point has a non-finite entry".into()));
        }
        Ok(())
    }

    fn dual_unchecked(&self, f: &[f64]) -> Result<f64> {
        Ok(match &self.gauge {
            Gauge::Lp(p) => lp_norm(conjugate(*p), f.iter().copied()),
            Gauge::Weighted(p, w) => lp_norm(conjugate(*p), f.iter().zip(w).map(|(a, b)| a / b)),
            Gauge::Polytope(poly) => poly.dual(f),
            Gauge::Sum { r, split, left, right } => {
                let a = left.dual_unchecked(&f[..*split])?;
                let b = right.dual_unchecked(&f[*split..])?;
                lp_norm(conjugate(*r), [a, b].into_iter())
            }
            Gauge::Voronoi(_) => {
                return Err(Error::Unsupported("dual norm of a Voronoi gauge".into()));
            }
        })
    }

    fn functional_unchecked(&self, x: &[f64]) -> Result<Vec<f64>> {
        match &self.gauge {
            Gauge::Lp(p) => lp_functional(*p, x),
            Gauge::Weighted(p, w) => {
                let y: Vec<f64> = x.iter().zip(w).map(|(a, b)| a * b).collect();
                let g = lp_functional(*p, &y)?;
                Ok(g.iter().zip(w).map(|(a, b)| a * b).collect())
            }
            Gauge::Polytope(poly) => poly.functional(x),
            Gauge::Sum { r, split, left, right } => {
                let (xl, xr) = x.split_at(*split);
                let a = left.norm(xl);
                let b = right.norm(xr);
                let outer = lp_functional(*r, &[a, b])?;
                let mut f = Vec::with_capacity(x.len());
                for (part, xs, n, c) in [(left, xl, a, outer[0]), (right, xr, b, outer[1])] {
                    if c == 0.0 {
                        f.extend(std::iter::repeat_n(0.0, xs.len()));
                    } else {
                        let unit: Vec<f64> = xs.iter().map(|v| v / n).collect();
                        f.extend(part.functional_unchecked(&unit)?.into_iter().map(|v| v * c));
                    }
                }
                Ok(f)
            }
            Gauge::Voronoi(_) => Err(Error::Unsupported("duality map of a Voronoi gauge".into())),
        }
    }
}

fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

#[inline]
fn lp_norm(p: f64, x: impl Iterator<Item = f64>) -> f64 {
    if p == 1.0 {
        x.map(f64::abs).sum()
    } else if p == 2.0 {
        x.map(|v| v * v).sum::<f64>().sqrt()
    } else if p.is_infinite() {
        x.map(f64::abs).fold(0.0, f64::max)
    } else {
        let v: Vec<f64> = x.map(f64::abs).collect();
        let m = v.iter().cloned().fold(0.0, f64::max);
        if m == 0.0 {
            return 0.0;
        }
        m * v.iter().map(|a| (a / m).powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn lp_functional(p: f64, x: &[f64]) -> Result<Vec<f64>> {
    let n = lp_norm(p, x.iter().copied());
    if n == 0.0 {
        return Err(Error::InvalidArgument("zero vector has no norming functional".into()));
    }
    if p == 1.0 {
        if x.iter().any(|&v| v == 0.0) {
            return Err(Error::NonUniqueFunctional);
        }
        return Ok(x.iter().map(|v| v.signum()).collect());
    }
    if p.is_infinite() {
        let tol = 1e-12 * n;
        let top: Vec<usize> = (0..x.len()).filter(|&i| x[i].abs() >= n - tol).collect();
        if top.len() != 1 {
            return Err(Error::NonUniqueFunctional);
        }
        let mut f = vec![0.0; x.len()];
        f[top[0]] = x[top[0]].signum();
        return Ok(f);
    }
    Ok(x.iter().map(|&v| v.signum() * (v.abs() / n).powf(p - 1.0)).collect())
}

/// `|x|` with dimension checking.
pub fn eval_norm(space: &Space, x: &[f64]) -> Result<f64> {
    space.check_dim(x)?;
    Ok(space.norm(x))
}

/// `sup { <f, x> : |x| <= 1 }`.
pub fn dual_eval(space: &Space, f: &[f64]) -> Result<f64> {
    space.check_dim(f)?;
    space.dual_unchecked(f)
}

/// The unique norm-one functional `f` with `<f, x> = |x|`, for `x` on the unit sphere.
pub fn duality_functional(space: &Space, x: &[f64]) -> Result<Vec<f64>> {
    space.check_dim(x)?;
    let n = space.norm(x);
    if (n - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!("point is not on the unit sphere (norm {n})")));
    }
    space.functional_unchecked(x)
}

/// Birkhoff–James orthogonality `x ⊥ v`: `λ ↦ |x + λv|` is minimal at 0,
/// decided from one-sided difference quotients.
pub fn bj_orthogonal(space: &Space, x: &[f64], v: &[f64], tol: f64) -> Result<bool> {
    space.check_dim(x)?;
    space.check_dim(v)?;
    let nx = space.norm(x);
    let nv = space.norm(v);
    if nx == 0.0 {
        return Err(Error::InvalidArgument("x must be nonzero".into()));
    }
    if nv == 0.0 {
        return Err(Error::InvalidArgument("v must be nonzero".into()));
    }
    let h = 1e-6 * (nx / nv).max(1.0);
    let plus: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + h * b).collect();
    let minus: Vec<f64> = x.iter().zip(v).map(|(a, b)| a - h * b).collect();
    let right = (space.norm(&plus) - nx) / h;
    let left = (nx - space.norm(&minus)) / h;
    Ok(left <= tol && right >= -tol)
}

/// `count` points on the unit sphere: Gaussian draws divided by their norm.
pub fn sphere_sample(space: &Space, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut r = rng::rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = rng::gaussian_vec(&mut r, space.dim);
        let n = space.norm(&g);
        if n > 0.0 && n.is_finite() {
            out.push(g.iter().map(|v| v / n).collect());
        }
    }
    out
}

/// `<f, x>`.
pub fn pairing(f: &[f64], x: &[f64]) -> f64 {
    dot(f, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_json_round_trip() {
        let s = r#"{"kind":"sum","r":"inf","left":{"kind":"lp","p":1,"n":2},"right":{"kind":"polytope","vertices":[[1,0],[-1,0],[0,1],[0,-1]]}}"#;
        let sp = Space::from_json(s).unwrap();
        assert_eq!(sp.dim(), 4);
        let back = serde_json::to_string(sp.descriptor()).unwrap();
        let again = Space::from_json(&back).unwrap();
        assert_eq!(sp, again);
        assert_eq!(sp.norm(&[1.0, 1.0, 0.5, 0.25]), 2.0);
    }

    #[test]
    fn lp_equivalence_constants() {
        let s = Space::lp(1.0, 4).unwrap();
        assert_eq!(s.euclid_bounds(), (1.0, 2.0));
        let s = Space::lp(f64::INFINITY, 4).unwrap();
        assert_eq!(s.euclid_bounds(), (0.5, 1.0));
    }

    #[test]
    fn functional_of_sum_space() {
        let d = SpaceDescriptor::sum(2.0, SpaceDescriptor::lp(2.0, 2), SpaceDescriptor::lp(3.0, 1));
        let s = Space::new(d).unwrap();
        let x = [0.6 / 2f64.sqrt(), 0.0, 0.8 / 2f64.sqrt()];
        let x: Vec<f64> = x.iter().map(|v| v / s.norm(&x)).collect();
        let f = duality_functional(&s, &x).unwrap();
        assert!((dot(&f, &x) - 1.0).abs() < 1e-12);
        assert!((dual_eval(&s, &f).unwrap() - 1.0).abs() < 1e-12);
    }
}
