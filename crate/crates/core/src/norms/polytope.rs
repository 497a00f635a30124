use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, rank, solve};

/// Centrally symmetric polytope stored by vertices and by one representative
/// of each pair of opposite facet normals, scaled so that the facet is
/// `{x : <a, x> = 1}`. The gauge is `max_j |<a_j, x>|`.
#[derive(Clone, Debug)]
pub(crate) struct Polytope {
    pub vertices: Vec<Vec<f64>>,
    pub facets: Vec<Vec<f64>>,
}

impl Polytope {
    pub fn new(vertices: &[Vec<f64>]) -> Result<Self> {
        let n = vertices.first().map(|v| v.len()).unwrap_or(0);
        if n == 0 {
            return Err(Error::InvalidSpace("polytope needs at least one non-empty vertex".into()));
        }
        if vertices.iter().any(|v| v.len() != n) {
            return Err(Error::InvalidSpace("polytope vertices have different lengths".into()));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSpace("polytope vertex has a non-finite entry".into()));
        }
        let scale = vertices.iter().map(|v| norm2(v)).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::InvalidSpace("polytope vertices are all zero".into()));
        }
        for (i, v) in vertices.iter().enumerate() {
            let mirrored = vertices
                .iter()
                .any(|u| u.iter().zip(v).all(|(a, b)| (a + b).abs() <= 1e-9 * scale));
            if !mirrored {
                return Err(Error::InvalidSpace(format!(
                    "polytope is not centrally symmetric: vertex {i} has no opposite"
                )));
            }
        }
        if rank(vertices, 1e-10) < n {
            return Err(Error::InvalidSpace("polytope vertices do not span the space".into()));
        }

        let mut facets: Vec<Vec<f64>> = Vec::new();
        let mut idx: Vec<usize> = (0..n).collect();
        let k = vertices.len();
        loop {
            let rows: Vec<Vec<f64>> = idx.iter().map(|&i| vertices[i].clone()).collect();
            if let Some(a) = solve(&rows, &vec![1.0; n]) {
                let tol = 1e-9 * (1.0 + norm2(&a) * scale);
                let supporting = vertices.iter().all(|v| dot(&a, v) <= 1.0 + tol);
                let anorm = norm2(&a);
                let seen = facets.iter().any(|f| {
                    let same = f.iter().zip(&a).all(|(x, y)| (x - y).abs() <= 1e-9 * anorm);
                    let opp = f.iter().zip(&a).all(|(x, y)| (x + y).abs() <= 1e-9 * anorm);
                    same || opp
                });
                if supporting && !seen {
                    facets.push(a);
                }
            }
            // next n-subset in lexicographic order
            let mut i = n;
            loop {
                if i == 0 {
                    return Ok(Polytope { vertices: vertices.to_vec(), facets });
                }
                i -= 1;
                if idx[i] < k - n + i {
                    idx[i] += 1;
                    for j in i + 1..n {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    #[inline]
    pub fn gauge(&self, x: &[f64]) -> f64 {
        self.facets.iter().map(|a| dot(a, x).abs()).fold(0.0, f64::max)
    }

    pub fn dual(&self, f: &[f64]) -> f64 {
        self.vertices.iter().map(|v| dot(f, v).abs()).fold(0.0, f64::max)
    }

    /// The unique facet functional active at `x`, if exactly one facet pair is active.
    pub fn functional(&self, x: &[f64]) -> Result<Vec<f64>> {
        let g = self.gauge(x);
        let tol = 1e-9 * g.max(1.0);
        let active: Vec<(usize, f64)> = self
            .facets
            .iter()
            .enumerate()
            .map(|(j, a)| (j, dot(a, x)))
            .filter(|(_, s)| s.abs() >= g - tol)
            .collect();
        if active.len() != 1 {
            return Err(Error::NonUniqueFunctional);
        }
        let (j, s) = active[0];
        let sign = if s < 0.0 { -1.0 } else { 1.0 };
        Ok(self.facets[j].iter().map(|c| sign * c).collect())
    }

    /// `(c1, c2)` with `c1 |x|_2 <= gauge(x) <= c2 |x|_2`.
    pub fn euclid_bounds(&self) -> (f64, f64) {
        let rmax = self.vertices.iter().map(|v| norm2(v)).fold(0.0, f64::max);
        let amax = self.facets.iter().map(|a| norm2(a)).fold(0.0, f64::max);
        (1.0 / rmax, amax)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_has_two_facet_pairs() {
        let p = Polytope::new(&[vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]).unwrap();
        assert_eq!(p.facets.len(), 2);
        assert!((p.gauge(&[0.5, 0.5]) - 1.0).abs() < 1e-15);
        assert!((p.gauge(&[3.0, -1.0]) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn interior_vertex_is_harmless() {
        let p = Polytope::new(&[
            vec![1.0, 1.0],
            vec![-1.0, -1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![0.2, 0.1],
            vec![-0.2, -0.1],
        ])
        .unwrap();
        assert_eq!(p.facets.len(), 2);
        assert!((p.gauge(&[0.5, -2.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_asymmetric_and_flat() {
        assert!(Polytope::new(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]]).is_err());
        assert!(Polytope::new(&[vec![1.0, 0.0], vec![-1.0, 0.0]]).is_err());
    }
}
