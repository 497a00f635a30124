use serde::{Deserialize, Serialize};

use crate::lattice::Lattice;

/// Recipe for a finite-dimensional normed space. Compile it with
/// [`Space::new`](super::Space::new) before evaluating anything.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceDescriptor {
    Lp {
        #[serde(with = "exponent")]
        p: f64,
        n: usize,
    },
    WeightedLp {
        #[serde(with = "exponent")]
        p: f64,
        weights: Vec<f64>,
    },
    Polytope {
        vertices: Vec<Vec<f64>>,
    },
    Sum {
        #[serde(with = "exponent")]
        r: f64,
        left: Box<SpaceDescriptor>,
        right: Box<SpaceDescriptor>,
    },
    Voronoi {
        lattice: Lattice,
        base: Box<SpaceDescriptor>,
    },
}

impl SpaceDescriptor {
    pub fn lp(p: f64, n: usize) -> Self {
        SpaceDescriptor::Lp { p, n }
    }

    pub fn linf(n: usize) -> Self {
        SpaceDescriptor::Lp { p: f64::INFINITY, n }
    }

    pub fn weighted_lp(p: f64, weights: Vec<f64>) -> Self {
        SpaceDescriptor::WeightedLp { p, weights }
    }

    pub fn polytope(vertices: Vec<Vec<f64>>) -> Self {
        SpaceDescriptor::Polytope { vertices }
    }

    pub fn sum(r: f64, left: SpaceDescriptor, right: SpaceDescriptor) -> Self {
        SpaceDescriptor::Sum { r, left: Box::new(left), right: Box::new(right) }
    }

    pub fn voronoi(lattice: Lattice) -> Self {
        let n = lattice.dim();
        SpaceDescriptor::Voronoi { lattice, base: Box::new(SpaceDescriptor::lp(2.0, n)) }
    }

    /// Regular polygon with `k` vertex pairs, first vertex at angle 0.
    pub fn regular_polygon(k: usize) -> Self {
        let m = 2 * k;
        let vertices = (0..m)
            .map(|i| {
                let a = std::f64::consts::PI * 2.0 * i as f64 / m as f64;
                vec![a.cos(), a.sin()]
            })
            .collect();
        SpaceDescriptor::Polytope { vertices }
    }

    pub fn dim(&self) -> usize {
        match self {
            SpaceDescriptor::Lp { n, .. } => *n,
            SpaceDescriptor::WeightedLp { weights, .. } => weights.len(),
            SpaceDescriptor::Polytope { vertices } => vertices.first().map_or(0, |v| v.len()),
            SpaceDescriptor::Sum { left, right, .. } => left.dim() + right.dim(),
            SpaceDescriptor::Voronoi { lattice, .. } => lattice.dim(),
        }
    }

    /// Short human-readable label used in provenance strings.
    pub fn label(&self) -> String {
        match self {
            SpaceDescriptor::Lp { p, n } => format!("lp p={} n={}", fmt_exp(*p), n),
            SpaceDescriptor::WeightedLp { p, weights } => {
                format!("weighted_lp p={} n={}", fmt_exp(*p), weights.len())
            }
            SpaceDescriptor::Polytope { vertices } => {
                format!("polytope v={} n={}", vertices.len(), self.dim())
            }
            SpaceDescriptor::Sum { r, left, right } => {
                format!("sum r={} ({}) ({})", fmt_exp(*r), left.label(), right.label())
            }
            SpaceDescriptor::Voronoi { lattice, .. } => format!("voronoi n={}", lattice.dim()),
        }
    }
}

fn fmt_exp(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

/// Exponents are JSON numbers, with `"inf"` standing for infinity.
pub(crate) mod exponent {
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};
    use std::fmt;

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
        if p.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*p)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = f64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "inf" | "infinity" | "Infinity" | "∞" => Ok(f64::INFINITY),
                    _ => v.parse().map_err(|_| E::custom(format!("bad exponent {v:?}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}
