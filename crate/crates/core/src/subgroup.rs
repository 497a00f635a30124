//! Greedy construction of a discrete subgroup that is θ-separated and
//! comes within 1 of every target, plus an exhaustive verifier.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::enumerate::{babai, enumerate};
use crate::lattice::Lattice;
use crate::norms::{Space, SpaceDescriptor};
use crate::rng::{self, derive_seed};

const SEP_TOL: f64 = 1e-9;
const DIST_TOL: f64 = 1e-12;
/// Above this rank the generic closest-vector search during a build
/// switches to a bounded-coefficient heuristic.
const HEURISTIC_RANK: usize = 40;
const NODE_BUDGET: u64 = 500_000_000;
const ORACLE_SAMPLES: usize = 512;

/// Source of new directions `x` with `dist(x, S_Z) >= θ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DirectionOracle {
    /// Unit vectors `e_α` for coordinates outside every support seen so
    /// far. Only for unweighted `l_p` spaces of dimension `n`.
    FreshCoordinate { n: usize },
    /// Candidates are handed out in order; each is checked on samples.
    Custom { candidates: Vec<Vec<f64>>, theta: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "decision", rename_all = "snake_case")]
pub enum Decision {
    CoveredByExisting { coefficients: Vec<i64>, distance: f64 },
    NewGenerator { generator: usize, direction: Vec<f64>, coordinate: Option<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub target: usize,
    #[serde(flatten)]
    pub decision: Decision,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    pub radius: f64,
    /// Subgroup elements of norm at most `radius`, zero included.
    pub enumerated_count: u64,
    /// `None` when zero is the only element within `radius`.
    pub min_nonzero_norm: Option<f64>,
    pub method: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgroupResult {
    pub space: SpaceDescriptor,
    pub generators: Vec<Vec<f64>>,
    pub theta: f64,
    pub eps: f64,
    pub targets: Vec<Vec<f64>>,
    pub log: Vec<LogEntry>,
    /// Some closest-vector query during the build used the heuristic search.
    #[serde(default)]
    pub coverage_heuristic: bool,
    #[serde(default)]
    pub verified: Option<SeparationCertificate>,
}

/// `(1 - eps) 2^{1/p}` for `l_p`.
pub fn default_theta(space: &Space, eps: f64) -> Result<f64> {
    let p = space
        .lp_exponent()
        .ok_or_else(|| Error::Unsupported("default theta is defined for l_p spaces".into()))?;
    Ok((1.0 - eps) * 2f64.powf(if p.is_infinite() { 0.0 } else { 1.0 / p }))
}

fn combination(gens: &[Vec<f64>], k: &[i64], n: usize) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for (c, g) in k.iter().zip(gens) {
        if *c != 0 {
            for (a, b) in y.iter_mut().zip(g) {
                *a += *c as f64 * b;
            }
        }
    }
    y
}

/// How subgroup elements near a point are enumerated.
enum Engine {
    Empty,
    /// Every generator owns a coordinate no other generator touches and the
    /// norm is monotone under coordinate projections; the coordinates that
    /// no remaining generator touches give an exact lower bound.
    Private(PrivateWalk),
    Euclid(Lattice),
}

struct PrivateWalk {
    gens: Vec<Vec<f64>>,
    private: Vec<usize>,
    /// Coordinates whose last toucher is generator `i`.
    settled: Vec<Vec<usize>>,
    /// Coordinates untouched by every generator.
    free: Vec<usize>,
    unit_norm: Vec<f64>,
    supp: Vec<Vec<usize>>,
    /// Exponent of an unweighted `l_p` norm, whose `p`-th power is additive
    /// over coordinates.
    power: Option<f64>,
}

fn private_coordinates(gens: &[Vec<f64>]) -> Option<Vec<usize>> {
    let n = gens.first()?.len();
    let mut out = Vec::with_capacity(gens.len());
    for (i, g) in gens.iter().enumerate() {
        let c = (0..n).find(|&c| g[c] != 0.0 && gens.iter().enumerate().all(|(j, h)| j == i || h[c] == 0.0))?;
        out.push(c);
    }
    Some(out)
}

impl Engine {
    fn new(space: &Space, gens: &[Vec<f64>]) -> Result<Engine> {
        if gens.is_empty() {
            return Ok(Engine::Empty);
        }
        let n = space.dim();
        if space.is_coordinate_monotone() {
            if let Some(private) = private_coordinates(gens) {
                let mut settled = vec![Vec::new(); gens.len()];
                let mut free = Vec::new();
                for c in 0..n {
                    match (0..gens.len()).rev().find(|&i| gens[i][c] != 0.0) {
                        Some(i) => settled[i].push(c),
                        None => free.push(c),
                    }
                }
                let unit_norm = private
                    .iter()
                    .map(|&c| {
                        let mut e = vec![0.0; n];
                        e[c] = 1.0;
                        space.norm(&e)
                    })
                    .collect();
                let supp = gens.iter().map(|g| support(g).collect()).collect();
                return Ok(Engine::Private(PrivateWalk {
                    gens: gens.to_vec(),
                    private,
                    settled,
                    free,
                    unit_norm,
                    supp,
                    power: space.lp_exponent(),
                }));
            }
        }
        Ok(Engine::Euclid(Lattice::new(gens.to_vec())?))
    }

    fn method(&self) -> &'static str {
        match self {
            Engine::Empty => "trivial",
            Engine::Private(_) => "private-coordinate enumeration",
            Engine::Euclid(_) => "euclidean enumeration",
        }
    }

    /// Calls `visit(k, |center - Σ k_i g_i|)` for every element within
    /// `radius` of `center`; `visit` may shrink the radius.
    fn ball<F>(&self, space: &Space, center: &[f64], radius: f64, mut visit: F) -> Result<u64>
    where
        F: FnMut(&[i64], f64) -> Option<f64>,
    {
        match self {
            Engine::Empty => {
                let d = space.norm(center);
                if d <= radius * (1.0 + DIST_TOL) {
                    visit(&[], d);
                }
                Ok(1)
            }
            Engine::Private(w) => w.walk(space, center, radius, visit),
            Engine::Euclid(lat) => {
                let c1 = space.euclid_bounds().0;
                let (t, perp2) = lat.project(center);
                let r2 = |r: f64| ((r / c1).powi(2) * (1.0 + 1e-9) - perp2).max(0.0);
                let mut radius = radius;
                let gens = lat.basis();
                let mut buf = vec![0.0; space.dim()];
                enumerate(lat, &t, r2(radius), NODE_BUDGET, |k, _| {
                    buf.copy_from_slice(center);
                    for (c, g) in k.iter().zip(gens) {
                        if *c != 0 {
                            for (a, b) in buf.iter_mut().zip(g) {
                                *a -= *c as f64 * b;
                            }
                        }
                    }
                    let d = space.norm(&buf);
                    if d <= radius * (1.0 + DIST_TOL) {
                        if let Some(r) = visit(k, d) {
                            radius = r;
                            return Some(r2(r));
                        }
                    }
                    None
                })
            }
        }
    }

    /// Closest element within `radius`, if any.
    fn closest(&self, space: &Space, center: &[f64], radius: f64) -> Result<Option<(Vec<i64>, f64)>> {
        let mut best: Option<(Vec<i64>, f64)> = None;
        self.ball(space, center, radius, |k, d| {
            if best.as_ref().is_none_or(|b| d < b.1) {
                best = Some((k.to_vec(), d));
                return Some(d);
            }
            None
        })?;
        Ok(best)
    }
}

impl PrivateWalk {
    fn walk<F>(&self, space: &Space, center: &[f64], radius: f64, mut visit: F) -> Result<u64>
    where
        F: FnMut(&[i64], f64) -> Option<f64>,
    {
        let n = space.dim();
        let mut masked = vec![0.0; n];
        for &c in &self.free {
            masked[c] = center[c];
        }
        let acc = match self.power {
            Some(p) => self.free.iter().map(|&c| lp_term(p, center[c])).fold(0.0, |a, b| lp_join(p, a, b)),
            None => space.norm(&masked),
        };
        let mut st = WalkState {
            r: center.to_vec(),
            masked,
            k: vec![0; self.gens.len()],
            radius,
            nodes: 0,
            saved: vec![Vec::new(); self.gens.len()],
        };
        if acc <= self.limit(st.radius) {
            self.level(space, 0, acc, &mut st, &mut visit)?;
        }
        Ok(st.nodes)
    }

    /// Pruning threshold in the units of the running lower bound.
    fn limit(&self, radius: f64) -> f64 {
        let r = radius * (1.0 + DIST_TOL);
        match self.power {
            Some(p) if p.is_finite() => r.powf(p) * (1.0 + 1e-9),
            _ => r * (1.0 + 1e-12),
        }
    }

    fn level<F>(&self, space: &Space, i: usize, acc: f64, st: &mut WalkState, visit: &mut F) -> Result<()>
    where
        F: FnMut(&[i64], f64) -> Option<f64>,
    {
        if i == self.gens.len() {
            let d = space.norm(&st.r);
            if d <= st.radius * (1.0 + DIST_TOL) {
                if let Some(r) = visit(&st.k, d) {
                    st.radius = r;
                }
            }
            return Ok(());
        }
        let g = &self.gens[i];
        let supp = &self.supp[i];
        let a = self.private[i];
        let reach = match self.power {
            // the private coordinate's own term must fit in what is left
            Some(p) if p.is_finite() => (self.limit(st.radius) - acc).max(0.0).powf(1.0 / p),
            _ => st.radius * (1.0 + DIST_TOL) / self.unit_norm[i],
        };
        let span = reach / g[a].abs();
        let mid = st.r[a] / g[a];
        let (lo, hi) = ((mid - span).ceil() as i64, (mid + span).floor() as i64);
        let mut saved = std::mem::take(&mut st.saved[i]);
        saved.clear();
        saved.extend(supp.iter().map(|&c| st.r[c]));
        for k in lo..=hi {
            st.nodes += 1;
            if st.nodes > NODE_BUDGET {
                return Err(Error::BudgetExhausted(format!("subgroup enumeration exceeded {NODE_BUDGET} nodes")));
            }
            let kf = k as f64;
            for (&c, &old) in supp.iter().zip(&saved) {
                st.r[c] = old - kf * g[c];
            }
            let child = match self.power {
                Some(p) => self.settled[i].iter().fold(acc, |t, &c| lp_join(p, t, lp_term(p, st.r[c]))),
                None => {
                    let mut changed = false;
                    for &c in &self.settled[i] {
                        st.masked[c] = st.r[c];
                        changed |= st.r[c] != 0.0;
                    }
                    let v = if changed { space.norm(&st.masked) } else { acc };
                    for &c in &self.settled[i] {
                        st.masked[c] = 0.0;
                    }
                    v
                }
            };
            if child <= self.limit(st.radius) {
                st.k[i] = k;
                self.level(space, i + 1, child, st, visit)?;
                st.k[i] = 0;
            }
        }
        for (&c, &old) in supp.iter().zip(&saved) {
            st.r[c] = old;
        }
        st.saved[i] = saved;
        Ok(())
    }
}

fn lp_term(p: f64, x: f64) -> f64 {
    if p.is_infinite() {
        x.abs()
    } else if p == 1.0 {
        x.abs()
    } else if p == 2.0 {
        x * x
    } else {
        x.abs().powf(p)
    }
}

fn lp_join(p: f64, a: f64, b: f64) -> f64 {
    if p.is_infinite() {
        a.max(b)
    } else {
        a + b
    }
}

struct WalkState {
    r: Vec<f64>,
    masked: Vec<f64>,
    k: Vec<i64>,
    radius: f64,
    nodes: u64,
    saved: Vec<Vec<f64>>,
}

/// Coordinate search around the Babai point, for high-rank builds.
fn heuristic_closest(space: &Space, lat: &Lattice, center: &[f64]) -> (Vec<i64>, f64) {
    let (t, _) = lat.project(center);
    let mut k = babai(lat, &t);
    let eval = |k: &[i64]| {
        let y = lat.point(k);
        let d: Vec<f64> = center.iter().zip(&y).map(|(a, b)| a - b).collect();
        space.norm(&d)
    };
    let mut best = eval(&k);
    loop {
        let mut improved = false;
        for i in 0..k.len() {
            for s in [1, -1] {
                k[i] += s;
                let d = eval(&k);
                if d < best {
                    best = d;
                    improved = true;
                } else {
                    k[i] -= s;
                }
            }
        }
        if !improved {
            return (k, best);
        }
    }
}

fn support(v: &[f64]) -> impl Iterator<Item = usize> + '_ {
    v.iter().enumerate().filter(|(_, x)| **x != 0.0).map(|(i, _)| i)
}

struct OracleState<'a> {
    oracle: &'a DirectionOracle,
    next: usize,
}

impl OracleState<'_> {
    fn propose(&mut self, gens: &[Vec<f64>], u: &[f64], target: usize) -> Result<(Vec<f64>, Option<usize>)> {
        match self.oracle {
            DirectionOracle::FreshCoordinate { n } => {
                let mut used = vec![false; *n];
                for v in gens.iter().map(|g| g.as_slice()).chain(std::iter::once(u)) {
                    for c in support(v) {
                        used[c] = true;
                    }
                }
                let a = used.iter().position(|b| !b).ok_or(Error::OracleExhausted { target })?;
                let mut e = vec![0.0; *n];
                e[a] = 1.0;
                Ok((e, Some(a)))
            }
            DirectionOracle::Custom { candidates, .. } => {
                let x = candidates.get(self.next).ok_or(Error::OracleExhausted { target })?.clone();
                self.next += 1;
                Ok((x, None))
            }
        }
    }
}

/// Checks `|x - z| >= θ` for sampled unit vectors `z` of
/// `span(gens ∪ {u})`.
fn check_direction(
    space: &Space,
    gens: &[Vec<f64>],
    u: &[f64],
    x: &[f64],
    theta: f64,
    target: usize,
    seed: u64,
) -> Result<()> {
    let span: Vec<&Vec<f64>> = gens.iter().filter(|g| space.norm(g) > 0.0).collect();
    let u_vec = u.to_vec();
    let mut spanning = span.clone();
    if space.norm(u) > 0.0 {
        spanning.push(&u_vec);
    }
    let mut samples: Vec<Vec<f64>> = Vec::new();
    for g in &span {
        let n = space.norm(g);
        samples.push(g.iter().map(|v| v / n).collect());
    }
    if !spanning.is_empty() {
        let mut r = rng::rng(seed);
        while samples.len() < ORACLE_SAMPLES + span.len() {
            let coef: Vec<f64> = spanning.iter().map(|_| r.random::<f64>() * 2.0 - 1.0).collect();
            let mut z = vec![0.0; space.dim()];
            for (c, v) in coef.iter().zip(&spanning) {
                for (a, b) in z.iter_mut().zip(v.iter()) {
                    *a += c * b;
                }
            }
            let n = space.norm(&z);
            if n > 0.0 {
                samples.push(z.iter().map(|v| v / n).collect());
            }
        }
    }
    for z in samples {
        let d = space.dist(x, &z);
        if d < theta - SEP_TOL {
            return Err(Error::OracleCheckFailed { target, sample: z, distance: d });
        }
    }
    Ok(())
}

/// Processes the targets in order: a target within 1 of the current
/// subgroup is logged as covered, otherwise `u - x` becomes a generator for
/// the oracle's next direction `x`.
pub fn build(
    space: &Space,
    targets: &[Vec<f64>],
    oracle: &DirectionOracle,
    theta: f64,
    eps: f64,
) -> Result<SubgroupResult> {
    if !(theta > 1.0) {
        return Err(Error::InvalidArgument(format!("theta must exceed 1, got {theta}")));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let n = space.dim();
    if let Some(t) = targets.iter().find(|t| t.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: t.len() });
    }
    match oracle {
        DirectionOracle::FreshCoordinate { n: on } => {
            let p = space
                .lp_exponent()
                .ok_or_else(|| Error::Unsupported("the fresh-coordinate oracle needs an unweighted l_p space".into()))?;
            if *on != n {
                return Err(Error::DimensionMismatch { expected: n, got: *on });
            }
            let k = 2f64.powf(if p.is_infinite() { 0.0 } else { 1.0 / p });
            if theta > k * (1.0 + DIST_TOL) {
                return Err(Error::InvalidArgument(format!(
                    "fresh coordinates are only {k}-far from the span; theta {theta} is too large"
                )));
            }
        }
        DirectionOracle::Custom { candidates, theta: declared } => {
            if *declared < theta - SEP_TOL {
                return Err(Error::InvalidArgument(format!("oracle declares theta {declared} < requested {theta}")));
            }
            if let Some(c) = candidates.iter().find(|c| c.len() != n) {
                return Err(Error::DimensionMismatch { expected: n, got: c.len() });
            }
        }
    }
    let mut gens: Vec<Vec<f64>> = Vec::new();
    let mut log = Vec::with_capacity(targets.len());
    let mut heuristic = false;
    let mut engine = Engine::new(space, &gens)?;
    let mut state = OracleState { oracle, next: 0 };
    for (ti, u) in targets.iter().enumerate() {
        let found = match &engine {
            Engine::Euclid(lat) if lat.rank() > HEURISTIC_RANK => {
                heuristic = true;
                let (k, d) = heuristic_closest(space, lat, u);
                (d <= 1.0 + DIST_TOL).then_some((k, d))
            }
            e => e.closest(space, u, 1.0)?,
        };
        if let Some((coefficients, distance)) = found {
            log.push(LogEntry { target: ti, decision: Decision::CoveredByExisting { coefficients, distance } });
            continue;
        }
        let (x, coordinate) = state.propose(&gens, u, ti)?;
        if let DirectionOracle::Custom { .. } = oracle {
            let nx = space.norm(&x);
            if (nx - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!("oracle candidate for target {ti} has norm {nx}")));
            }
            check_direction(space, &gens, u, &x, theta, ti, derive_seed(0x5eed, ti as u64))?;
        }
        let g: Vec<f64> = u.iter().zip(&x).map(|(a, b)| a - b).collect();
        gens.push(g);
        log.push(LogEntry {
            target: ti,
            decision: Decision::NewGenerator { generator: gens.len() - 1, direction: x, coordinate },
        });
        engine = Engine::new(space, &gens)?;
    }
    Ok(SubgroupResult {
        space: space.descriptor().clone(),
        generators: gens,
        theta,
        eps,
        targets: targets.to_vec(),
        log,
        coverage_heuristic: heuristic,
        verified: None,
    })
}

/// Enumerates every subgroup element of norm at most `radius`, checks
/// that the nonzero ones have norm at least `θ`, and re-checks that every
/// target lies within `1 + eps` of the subgroup.
pub fn verify(space: &Space, result: &SubgroupResult, radius: f64) -> Result<SeparationCertificate> {
    if space.descriptor() != &result.space {
        return Err(Error::InvalidArgument("result was built in a different space".into()));
    }
    if !(radius >= result.theta) {
        return Err(Error::InvalidArgument(format!("radius {radius} is below theta {}", result.theta)));
    }
    let n = space.dim();
    let m = result.generators.len();
    if let Some(g) = result.generators.iter().find(|g| g.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: g.len() });
    }
    let floor = result.theta - SEP_TOL;
    for (i, g) in result.generators.iter().enumerate() {
        let d = space.norm(g);
        if d < floor {
            let mut k = vec![0; m];
            k[i] = 1;
            return Err(Error::SeparationViolation { coefficients: k, norm: d });
        }
    }
    let engine = Engine::new(space, &result.generators)?;
    let zero = vec![0.0; n];
    let mut count = 0u64;
    let mut min: Option<(Vec<i64>, f64)> = None;
    engine.ball(space, &zero, radius, |k, d| {
        count += 1;
        if k.iter().any(|&c| c != 0) && min.as_ref().is_none_or(|b| d < b.1) {
            min = Some((k.to_vec(), d));
        }
        None
    })?;
    if let Some((k, d)) = &min {
        if *d < floor {
            return Err(Error::SeparationViolation { coefficients: k.clone(), norm: *d });
        }
    }
    let reach = 1.0 + result.eps;
    for (ti, u) in result.targets.iter().enumerate() {
        if u.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: u.len() });
        }
        if engine.closest(space, u, reach)?.is_none() {
            let distance = engine.closest(space, u, space.norm(u))?.map_or(space.norm(u), |b| b.1);
            return Err(Error::CoverageViolation { target: ti, distance });
        }
    }
    Ok(SeparationCertificate {
        radius,
        enumerated_count: count,
        min_nonzero_norm: min.map(|b| b.1),
        method: engine.method().into(),
    })
}

impl SubgroupResult {
    /// Runs [`verify`] and stores the certificate.
    pub fn certify(&mut self, space: &Space, radius: f64) -> Result<&SeparationCertificate> {
        let cert = verify(space, self, radius)?;
        Ok(self.verified.insert(cert))
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }
}

/// `2 (1 + eps) / θ`: a `(1+eps)`-dense, `θ`-separated subgroup rescaled by
/// `1/(1+eps)` is 1-dense and `θ/(1+eps)`-separated.
pub fn gamma_star_upper_from_build(result: &SubgroupResult) -> Result<f64> {
    if result.verified.is_none() {
        return Err(Error::Unverified);
    }
    Ok(2.0 * (1.0 + result.eps) / result.theta)
}

/// The product of two verified builds inside their `⊕_∞` sum: generators
/// `(g, 0)` and `(0, h)`, separation `min(θ_a, θ_b)`, and target `i` paired
/// as `(a_i, b_i)` with indices taken cyclically. The result is unverified.
pub fn product(a: &SubgroupResult, b: &SubgroupResult) -> Result<SubgroupResult> {
    if a.verified.is_none() || b.verified.is_none() {
        return Err(Error::Unverified);
    }
    let sa = Space::new(a.space.clone())?;
    let sb = Space::new(b.space.clone())?;
    let (na, nb) = (sa.dim(), sb.dim());
    let space = SpaceDescriptor::sum(f64::INFINITY, a.space.clone(), b.space.clone());
    let mut generators = Vec::with_capacity(a.generators.len() + b.generators.len());
    for g in &a.generators {
        let mut v = g.clone();
        v.resize(na + nb, 0.0);
        generators.push(v);
    }
    for h in &b.generators {
        let mut v = vec![0.0; na];
        v.extend_from_slice(h);
        generators.push(v);
    }
    let count = a.targets.len().max(b.targets.len());
    let (ea, eb) = (Engine::new(&sa, &a.generators)?, Engine::new(&sb, &b.generators)?);
    let mut targets = Vec::with_capacity(count);
    let mut log = Vec::with_capacity(count);
    for i in 0..count {
        let (ua, ub) = (&a.targets[i % a.targets.len()], &b.targets[i % b.targets.len()]);
        let ca = ea.closest(&sa, ua, sa.norm(ua))?.unwrap_or_else(|| (vec![0; a.generators.len()], sa.norm(ua)));
        let cb = eb.closest(&sb, ub, sb.norm(ub))?.unwrap_or_else(|| (vec![0; b.generators.len()], sb.norm(ub)));
        let mut t = ua.clone();
        t.extend_from_slice(ub);
        targets.push(t);
        let mut coefficients = ca.0;
        coefficients.extend(cb.0);
        log.push(LogEntry {
            target: i,
            decision: Decision::CoveredByExisting { coefficients, distance: ca.1.max(cb.1) },
        });
    }
    Ok(SubgroupResult {
        space,
        generators,
        theta: a.theta.min(b.theta),
        eps: a.eps.max(b.eps),
        targets,
        log,
        coverage_heuristic: a.coverage_heuristic || b.coverage_heuristic,
        verified: None,
    })
}

/// `count` points drawn uniformly from the radius-`radius` ball of `l_p^2`,
/// rounded to the nearest integer point of that ball and placed in the
/// first two coordinates of `R^n`.
pub fn integer_ball_targets(p: f64, n: usize, count: usize, radius: f64, seed: u64) -> Result<Vec<Vec<f64>>> {
    if n < 2 {
        return Err(Error::InvalidArgument("targets need at least two coordinates".into()));
    }
    let plane = Space::lp(p, 2)?;
    let mut r = rng::rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x = [(r.random::<f64>() * 2.0 - 1.0) * radius, (r.random::<f64>() * 2.0 - 1.0) * radius];
        if plane.norm(&x) > radius {
            continue;
        }
        let k = [x[0].round(), x[1].round()];
        if plane.norm(&k) > radius {
            continue;
        }
        let mut t = vec![0.0; n];
        t[0] = k[0] + 0.0;
        t[1] = k[1] + 0.0;
        out.push(t);
    }
    Ok(out)
}

/// The subgroup element `Σ k_i g_i`.
pub fn element(result: &SubgroupResult, k: &[i64]) -> Vec<f64> {
    combination(&result.generators, k, result.space.dim())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_target_needs_no_generator() {
        let s = Space::lp(2.0, 4).unwrap();
        let r = build(&s, &[vec![0.0; 4]], &DirectionOracle::FreshCoordinate { n: 4 }, 1.3, 0.05).unwrap();
        assert!(r.generators.is_empty());
        assert_eq!(r.log[0].decision, Decision::CoveredByExisting { coefficients: vec![], distance: 0.0 });
        let c = verify(&s, &r, 2.0).unwrap();
        assert_eq!(c.enumerated_count, 1);
        assert_eq!(c.min_nonzero_norm, None);
    }

    #[test]
    fn collinear_generators_fail_verification() {
        let s = Space::lp(2.0, 2).unwrap();
        let r = SubgroupResult {
            space: s.descriptor().clone(),
            generators: vec![vec![1.0, 0.0], vec![0.5, 0.0]],
            theta: 1.0,
            eps: 0.05,
            targets: vec![],
            log: vec![],
            coverage_heuristic: false,
            verified: None,
        };
        match verify(&s, &r, 2.0) {
            Err(Error::SeparationViolation { coefficients, norm }) => {
                assert_eq!(coefficients, vec![0, 1]);
                assert_eq!(norm, 0.5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fresh_theta_cap() {
        let s = Space::lp(3.0, 8).unwrap();
        let o = DirectionOracle::FreshCoordinate { n: 8 };
        assert!(build(&s, &[vec![0.0; 8]], &o, 1.3, 0.05).is_err());
        assert!(build(&s, &[vec![0.0; 8]], &o, 2f64.powf(1.0 / 3.0), 0.05).is_ok());
    }

    #[test]
    fn unverified_bound_is_refused() {
        let s = Space::lp(1.0, 4).unwrap();
        let r = build(&s, &[vec![3.0, 0.0, 0.0, 0.0]], &DirectionOracle::FreshCoordinate { n: 4 }, 1.9, 0.05).unwrap();
        assert!(matches!(gamma_star_upper_from_build(&r), Err(Error::Unverified)));
    }
}
