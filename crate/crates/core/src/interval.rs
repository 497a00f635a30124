use serde::{Deserialize, Serialize};

/// A bracket `[lo, hi]` together with the name of the argument that justifies it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedInterval {
    pub lo: f64,
    pub hi: f64,
    pub method: String,
    pub evaluations: u64,
}

impl CertifiedInterval {
    pub fn new(lo: f64, hi: f64, method: impl Into<String>, evaluations: u64) -> Self {
        debug_assert!(lo <= hi, "interval [{lo}, {hi}] is inverted");
        CertifiedInterval { lo, hi, method: method.into(), evaluations }
    }

    pub fn exact(v: f64, method: impl Into<String>) -> Self {
        Self::new(v, v, method, 0)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_within(&self, v: f64, tol: f64) -> bool {
        self.lo - tol <= v && v <= self.hi + tol
    }

    pub fn intersects(&self, lo: f64, hi: f64) -> bool {
        self.lo <= hi && lo <= self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}
