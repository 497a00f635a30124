//! Bound chains and exact-value tables for packing/covering constants.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::CertifiedInterval;
use crate::moduli::{check_modulus_axioms, phi_p, t_x, tangential, delta, uniform_grid, EvalBudget, Modulus};
use crate::norms::Space;
use crate::rng::derive_seed;

const TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BoundValue {
    Exact { value: f64 },
    /// `hi = None` when the upper end depends on an unknown input.
    Range { lo: f64, hi: Option<f64> },
    Interval { interval: CertifiedInterval },
    Ladder { values: Vec<f64>, sup: f64 },
}

impl BoundValue {
    fn lo(&self) -> f64 {
        match self {
            BoundValue::Exact { value } => *value,
            BoundValue::Range { lo, .. } => *lo,
            BoundValue::Interval { interval } => interval.lo,
            BoundValue::Ladder { values, .. } => values.first().copied().unwrap_or(f64::NAN),
        }
    }

    fn hi(&self) -> f64 {
        match self {
            BoundValue::Exact { value } => *value,
            BoundValue::Range { hi, .. } => hi.unwrap_or(f64::INFINITY),
            BoundValue::Interval { interval } => interval.hi,
            BoundValue::Ladder { sup, .. } => *sup,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    pub value: BoundValue,
    pub provenance: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    /// `lhs.hi <= rhs.lo`: holds for every value in both intervals.
    Holds,
    /// The intervals overlap; neither outcome is certified.
    Crossing,
    /// `lhs.lo > rhs.hi`.
    Violated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub lhs: String,
    pub rhs: String,
    pub lhs_hi: f64,
    pub rhs_lo: f64,
    pub holds: bool,
    pub status: CheckStatus,
    /// `rhs.lo - lhs.hi`.
    pub slack: f64,
}

impl ChainCheck {
    fn new(lhs: &BoundEntry, rhs: &BoundEntry) -> ChainCheck {
        let (lhs_hi, rhs_lo) = (lhs.value.hi(), rhs.value.lo());
        let status = if lhs_hi <= rhs_lo + TOL {
            CheckStatus::Holds
        } else if lhs.value.lo() > rhs.value.hi() + TOL {
            CheckStatus::Violated
        } else {
            CheckStatus::Crossing
        };
        ChainCheck {
            lhs: lhs.name.clone(),
            rhs: rhs.name.clone(),
            lhs_hi,
            rhs_lo,
            holds: status == CheckStatus::Holds,
            status,
            slack: rhs_lo - lhs_hi,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parameter {
    pub name: String,
    #[serde(with = "crate::norms::exponent")]
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub space_label: String,
    #[serde(default)]
    pub parameters: Vec<Parameter>,
    pub entries: Vec<BoundEntry>,
    pub chain_checks: Vec<ChainCheck>,
}

impl BoundReport {
    pub fn entry(&self, name: &str) -> Option<&BoundEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn all_hold(&self) -> bool {
        self.chain_checks.iter().all(|c| c.holds)
    }

    /// Aligned plain-text rendering.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.space_label);
        for p in &self.parameters {
            let _ = writeln!(out, "  {} = {}", p.name, fmt_num(p.value));
        }
        let w = self.entries.iter().map(|e| e.name.chars().count()).max().unwrap_or(0);
        for e in &self.entries {
            let v = match &e.value {
                BoundValue::Exact { value } => fmt_num(*value),
                BoundValue::Range { lo, hi } => {
                    format!("[{}, {}]", fmt_num(*lo), hi.map_or("?".to_string(), fmt_num))
                }
                BoundValue::Interval { interval } => {
                    format!("[{}, {}] ({})", fmt_num(interval.lo), fmt_num(interval.hi), interval.method)
                }
                BoundValue::Ladder { values, sup } => {
                    let vs: Vec<String> = values.iter().map(|v| fmt_num(*v)).collect();
                    format!("{} -> {}", vs.join(", "), fmt_num(*sup))
                }
            };
            let pad = w - e.name.chars().count();
            let _ = writeln!(out, "  {}{}  {}  [{}]", e.name, " ".repeat(pad), v, e.provenance);
        }
        for c in &self.chain_checks {
            let _ = writeln!(
                out,
                "  check {} <= {}: {:?} (slack {})",
                c.lhs,
                c.rhs,
                c.status,
                fmt_num(c.slack)
            );
        }
        out
    }
}

fn fmt_num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.6}")
    }
}

fn exact(name: &str, value: f64, provenance: &str) -> BoundEntry {
    BoundEntry { name: name.into(), value: BoundValue::Exact { value }, provenance: provenance.into() }
}

fn range(name: &str, lo: f64, hi: Option<f64>, provenance: &str) -> BoundEntry {
    BoundEntry { name: name.into(), value: BoundValue::Range { lo, hi }, provenance: provenance.into() }
}

fn interval(name: &str, lo: f64, hi: f64, method: &str, evaluations: u64, provenance: &str) -> BoundEntry {
    BoundEntry {
        name: name.into(),
        value: BoundValue::Interval { interval: CertifiedInterval::new(lo, hi, method, evaluations) },
        provenance: provenance.into(),
    }
}

/// `2 / (1 + φ(1))`, the covering bound for φ-octahedral spaces.
pub fn phi_octahedral_upper(phi: &Modulus) -> Result<f64> {
    if phi.is_non_modulus() {
        return Err(Error::NonModulus("input table fails the ratio condition".into()));
    }
    let report = check_modulus_axioms(phi, &uniform_grid(2.0, 65));
    if !report.is_modulus() {
        return Err(Error::NonModulus(format!("axiom check failed: {report:?}")));
    }
    Ok(2.0 / (1.0 + phi.eval(1.0)))
}

/// Analytic Kottman constants of infinite-dimensional spaces, which no
/// finite computation reaches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "snake_case")]
pub enum KottmanTable {
    /// `K(l_p) = 2^{1/p}`.
    SequenceLp { p: f64 },
    /// `K(L_p(μ)) = max{2^{1/p}, 2^{1/q}}` for non-atomic `μ`.
    FunctionLp { p: f64 },
}

impl KottmanTable {
    pub fn value(&self) -> f64 {
        match *self {
            KottmanTable::SequenceLp { p } => two_pow_inv(p),
            KottmanTable::FunctionLp { p } => two_pow_inv(p).max(two_pow_inv(conjugate(p))),
        }
    }

    pub fn provenance(&self) -> &'static str {
        match self {
            KottmanTable::SequenceLp { .. } => "analytic table: K(l_p) = 2^{1/p}",
            KottmanTable::FunctionLp { .. } => "analytic table: K(L_p) = max{2^{1/p}, 2^{1/q}}, non-atomic measure",
        }
    }
}

fn two_pow_inv(p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else {
        2f64.powf(1.0 / p)
    }
}

/// Conjugate exponent; `1 ↔ ∞`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `γ(X) >= 2 / K(X)`.
pub fn kottman_lower_bound(k: f64) -> f64 {
    2.0 / k
}

/// `γ(Y) <= d_BM(X, Y) γ(X)`; the same rule holds for `γ*`.
pub fn banach_mazur_upper(gamma_x: f64, d: f64) -> Result<f64> {
    if !(d >= 1.0) {
        return Err(Error::InvalidArgument(format!("Banach-Mazur distance must be >= 1, got {d}")));
    }
    Ok(d * gamma_x)
}

/// Spaces whose constants have closed forms or explicit bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NamedSpace {
    /// `l_p(κ) ⊕_r Y` with `dens Y < κ`.
    SequenceLp {
        p: f64,
        #[serde(with = "crate::norms::exponent")]
        r: f64,
        #[serde(default)]
        gamma_star_y: Option<f64>,
    },
    /// `L_p(μ) ⊕_r Y` with `μ` not purely atomic.
    FunctionLp {
        p: f64,
        #[serde(with = "crate::norms::exponent")]
        r: f64,
        #[serde(default)]
        gamma_star_y: Option<f64>,
    },
    SeparableOctahedral,
    /// `C(K)` for zero-dimensional `K`.
    ContinuousZeroDim {
        #[serde(default)]
        extremally_disconnected: bool,
    },
    LInfinity,
    /// `(⊕_k l_{p_k}(ω_k))_{l_p}` with `p_k → ∞`; the ladder evaluates the
    /// lower bound `2 / 2^{1/M}` for each `M`.
    GammaTwo {
        p: f64,
        #[serde(default)]
        pk: Vec<f64>,
        ms: Vec<f64>,
    },
}

fn check_p(p: f64, what: &str) -> Result<()> {
    if !(p >= 1.0) || p.is_infinite() {
        return Err(Error::InvalidArgument(format!("{what} must lie in [1, inf), got {p}")));
    }
    Ok(())
}

fn lp_sum_report(p: f64, r: f64, gamma_star_y: Option<f64>, function_space: bool) -> Result<BoundReport> {
    check_p(p, "p")?;
    if !(r >= 1.0) {
        return Err(Error::InvalidArgument(format!("r must be >= 1, got {r}")));
    }
    if let Some(g) = gamma_star_y {
        if !(g >= 1.0) {
            return Err(Error::InvalidArgument(format!("gamma*(Y) must be >= 1, got {g}")));
        }
    }
    let q = conjugate(p);
    let at_p = phi_octahedral_upper(&Modulus::PhiP { p })?;
    let (kottman, label) = if function_space {
        (KottmanTable::FunctionLp { p }, format!("L_{p}(mu) (+)_{} Y", fmt_exp(r)))
    } else {
        (KottmanTable::SequenceLp { p }, format!("l_{p}(kappa) (+)_{} Y", fmt_exp(r)))
    };
    let lower = kottman_lower_bound(kottman.value());
    let mut entries = vec![
        exact("K", kottman.value(), kottman.provenance()),
        exact("2/K", lower, "lower-bound rule gamma >= 2/K"),
        exact("2/2^{1/p}", at_p, "bounds::phi_octahedral_upper(phi_p)"),
    ];
    let upper = if r <= p {
        Some(at_p)
    } else if r.is_finite() {
        Some(phi_octahedral_upper(&Modulus::PhiP { p: r })?)
    } else {
        gamma_star_y.map(|g| at_p.max(g))
    };
    let upper_source = if r <= p {
        "phi_p-octahedral sum, r <= p"
    } else if r.is_finite() {
        "phi_r-octahedral sum, p <= r"
    } else {
        "sup-sum rule: max{gamma*(X), gamma*(Y)}"
    };
    if upper == Some(lower) {
        entries.push(exact("gamma = gamma*", lower, upper_source));
    } else {
        entries.push(range("gamma <= gamma*", lower, upper, upper_source));
    }
    let mut chain_checks = Vec::new();
    if let Some(u) = upper {
        chain_checks.push(ChainCheck::new(&entries[1], &exact("upper", u, upper_source)));
    }
    Ok(BoundReport {
        space_label: label,
        parameters: vec![
            Parameter { name: "p".into(), value: p },
            Parameter { name: "q".into(), value: q },
            Parameter { name: "r".into(), value: r },
        ],
        entries,
        chain_checks,
    })
}

fn fmt_exp(r: f64) -> String {
    if r.is_infinite() {
        "inf".into()
    } else {
        format!("{r}")
    }
}

/// Exact values and bounds for the encoded families.
pub fn named_gamma(name: &NamedSpace) -> Result<BoundReport> {
    match name {
        NamedSpace::SequenceLp { p, r, gamma_star_y } => lp_sum_report(*p, *r, *gamma_star_y, false),
        NamedSpace::FunctionLp { p, r, gamma_star_y } => lp_sum_report(*p, *r, *gamma_star_y, true),
        NamedSpace::SeparableOctahedral => Ok(BoundReport {
            space_label: "separable octahedral".into(),
            parameters: vec![],
            entries: vec![
                exact("gamma = gamma*", 1.0, "octahedral spaces: gamma* = 1"),
                exact("phi upper", phi_octahedral_upper(&Modulus::Identity)?, "bounds::phi_octahedral_upper(identity)"),
            ],
            chain_checks: vec![],
        }),
        NamedSpace::ContinuousZeroDim { extremally_disconnected } => {
            let mut entries = vec![exact("gamma = gamma*", 1.0, "C(K; 2Z) is 2-separated and (1+eps)-dense")];
            if *extremally_disconnected {
                entries.push(exact("lattice tiling", 1.0, "even-integer rounding is 1-dense"));
            }
            Ok(BoundReport { space_label: "C(K), K zero-dimensional".into(), parameters: vec![], entries, chain_checks: vec![] })
        }
        NamedSpace::LInfinity => Ok(BoundReport {
            space_label: "L_inf(mu)".into(),
            parameters: vec![],
            entries: vec![
                exact("gamma = gamma*", 1.0, "even-integer rounding tiling"),
                exact("lattice tiling", 1.0, "suptiling::round_even"),
            ],
            chain_checks: vec![],
        }),
        NamedSpace::GammaTwo { p, pk, ms } => {
            check_p(*p, "p")?;
            if let Some(bad) = pk.iter().find(|v| !(**v >= 1.0)) {
                return Err(Error::InvalidArgument(format!("p_k must be >= 1, got {bad}")));
            }
            if ms.is_empty() {
                return Err(Error::InvalidArgument("the ladder needs at least one M".into()));
            }
            if let Some(bad) = ms.iter().find(|m| !(**m >= 1.0 && m.is_finite())) {
                return Err(Error::InvalidArgument(format!("M must be a finite value >= 1, got {bad}")));
            }
            let values: Vec<f64> = ms.iter().map(|m| 2.0 / 2f64.powf(1.0 / m)).collect();
            Ok(BoundReport {
                space_label: format!("(sum_k l_(p_k)(omega_k))_(l_{p})"),
                parameters: vec![Parameter { name: "p".into(), value: *p }],
                entries: vec![
                    BoundEntry {
                        name: "gamma lower ladder 2/2^{1/M}".into(),
                        value: BoundValue::Ladder { values, sup: 2.0 },
                        provenance: "tail Kottman constant <= 2^{1/M}".into(),
                    },
                    exact("gamma", 2.0, "supremum of the ladder"),
                ],
                chain_checks: vec![],
            })
        }
    }
}

/// Lower bound `1/(1-δ(1))` against the upper bounds `2/(1+φ(1))` and
/// `2 t_X`, plus `2/(1+φ_p(φ(1)))` for the outer exponent `p_outer`.
/// Lower bounds use the upper ends of their inputs and upper bounds the
/// lower ends, so a reported "holds" is sound under the intervals.
pub fn chain_report(space: &Space, p_outer: f64, budget: &EvalBudget, seed: u64) -> Result<BoundReport> {
    if space.dim() < 2 {
        return Err(Error::InvalidArgument("chain report needs dimension >= 2".into()));
    }
    if !(p_outer >= 1.0) {
        return Err(Error::InvalidArgument(format!("p_outer must be >= 1, got {p_outer}")));
    }
    let d = delta(space, 1.0, budget, derive_seed(seed, 0))?;
    let f = tangential(space, 1.0, budget, derive_seed(seed, 1))?;
    let t = t_x(space, budget, derive_seed(seed, 2))?;
    let ev = d.evaluations + f.evaluations + t.evaluations;
    let entries = vec![
        BoundEntry { name: "delta(1)".into(), value: BoundValue::Interval { interval: d.clone() }, provenance: "moduli::delta".into() },
        BoundEntry { name: "phi(1)".into(), value: BoundValue::Interval { interval: f.clone() }, provenance: "moduli::tangential".into() },
        BoundEntry { name: "t_X".into(), value: BoundValue::Interval { interval: t.clone() }, provenance: "moduli::t_x".into() },
        interval(
            "1/(1-delta(1))",
            1.0 / (1.0 - d.lo),
            1.0 / (1.0 - d.hi),
            &d.method,
            ev,
            "lower bound on 2/K(X; kappa)",
        ),
        interval(
            "2/(1+phi(1))",
            2.0 / (1.0 + f.hi),
            2.0 / (1.0 + f.lo),
            &f.method,
            ev,
            "phi_X-octahedral covering bound",
        ),
        interval("2 t_X", 2.0 * t.lo, 2.0 * t.hi, &t.method, ev, "covering bound via t_X"),
        interval(
            "2/(1+phi_p(phi(1)))",
            2.0 / (1.0 + phi_p(p_outer, f.hi)?),
            2.0 / (1.0 + phi_p(p_outer, f.lo)?),
            &f.method,
            ev,
            "upper bound for the outer p-sum",
        ),
        interval(
            "2(1-delta(1))",
            2.0 * (1.0 - d.hi),
            2.0 * (1.0 - d.lo),
            &d.method,
            ev,
            "Kottman constant upper bound",
        ),
        interval(
            "1/(1+phi(1))",
            1.0 / (1.0 + f.hi),
            1.0 / (1.0 + f.lo),
            &f.method,
            ev,
            "compared with t_X",
        ),
    ];
    let chain_checks = vec![
        ChainCheck::new(&entries[3], &entries[4]),
        ChainCheck::new(&entries[8], &entries[2]),
    ];
    Ok(BoundReport {
        space_label: space.descriptor().label(),
        parameters: vec![Parameter { name: "p_outer".into(), value: p_outer }],
        entries,
        chain_checks,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiGrid {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub rs: Vec<f64>,
    pub ps: Vec<f64>,
}

impl MinkowskiGrid {
    /// `α, β ∈ {0, 0.5, …, 3}`, `r ∈ {1, 1.5, 2}`, `p ∈ {2, 3, 4}`.
    pub fn standard() -> MinkowskiGrid {
        let ab: Vec<f64> = (0..=6).map(|i| i as f64 * 0.5).collect();
        MinkowskiGrid { alphas: ab.clone(), betas: ab, rs: vec![1.0, 1.5, 2.0], ps: vec![2.0, 3.0, 4.0] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiNode {
    pub alpha: f64,
    pub beta: f64,
    pub r: f64,
    pub p: f64,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinkowskiReport {
    pub nodes: usize,
    pub violations: Vec<MinkowskiNode>,
    pub all_hold: bool,
}

/// `((α^p + 1)^{r/p} + β^r)^{1/r}` and `((α^r + β^r)^{p/r} + 1)^{1/p}`.
pub fn minkowski_sides(alpha: f64, beta: f64, r: f64, p: f64) -> (f64, f64) {
    let lhs = ((alpha.powf(p) + 1.0).powf(r / p) + beta.powf(r)).powf(1.0 / r);
    let rhs = ((alpha.powf(r) + beta.powf(r)).powf(p / r) + 1.0).powf(1.0 / p);
    (lhs, rhs)
}

/// Checks `lhs >= rhs - 1e-12` at every node with `1 <= r <= p`.
pub fn minkowski_type_check(grid: &MinkowskiGrid) -> Result<MinkowskiReport> {
    for &r in &grid.rs {
        for &p in &grid.ps {
            if !(r >= 1.0) || r > p || !p.is_finite() {
                return Err(Error::InvalidArgument(format!("grid node needs 1 <= r <= p < inf, got r={r}, p={p}")));
            }
        }
    }
    if grid.alphas.iter().chain(&grid.betas).any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument("alpha and beta must be finite and nonnegative".into()));
    }
    let mut nodes = 0;
    let mut violations = Vec::new();
    for &alpha in &grid.alphas {
        for &beta in &grid.betas {
            for &r in &grid.rs {
                for &p in &grid.ps {
                    nodes += 1;
                    let (lhs, rhs) = minkowski_sides(alpha, beta, r, p);
                    if lhs < rhs - 1e-12 * rhs.max(1.0) {
                        violations.push(MinkowskiNode { alpha, beta, r, p, lhs, rhs });
                    }
                }
            }
        }
    }
    Ok(MinkowskiReport { nodes, all_hold: violations.is_empty(), violations })
}

/// Least `n >= 1` with `(1 - 2^{-n})^{1/p} - 2^{-n/p} >= 1 - eps`.
pub fn lp_step1_check(p: f64, eps: f64) -> Result<u32> {
    check_p(p, "p")?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 1), got {eps}")));
    }
    for n in 1..=4096u32 {
        let h = 2f64.powi(-(n as i32));
        if (1.0 - h).powf(1.0 / p) - h.powf(1.0 / p) >= 1.0 - eps {
            return Ok(n);
        }
    }
    Err(Error::BudgetExhausted(format!("no n <= 4096 for p={p}, eps={eps}")))
}
