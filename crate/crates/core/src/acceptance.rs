//! The acceptance battery: one pass/fail outcome per numbered criterion.

use std::time::Instant;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::bounds::{chain_report, minkowski_type_check, named_gamma, BoundValue, MinkowskiGrid, NamedSpace};
use crate::error::Result;
use crate::lattice::{gamma_star_of_lattice, optimize_lattice, saturate_packing, CoveringOptions, SaturateOptions};
use crate::moduli::{
    check_modulus_axioms, delta, phi_p, t_x, tangential, tangential_table, uniform_grid, varphi_delta_inequalities,
    EvalBudget,
};
use crate::rng::{self, derive_seed};
use crate::subgroup::{build, gamma_star_upper_from_build, integer_ball_targets, Decision, DirectionOracle};
use crate::suptiling::{check_even_separation, round_even, sup_distance, SimpleFunction};
use crate::{Lattice, Space, SpaceDescriptor};

/// Criteria cheap enough for the quick tier.
pub const QUICK: [u8; 4] = [3, 4, 6, 9];
pub const ALL: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    /// Measured values, one `key=value` fact per item.
    pub details: Vec<String>,
    pub seconds: f64,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {}: {} ({:.1}s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.details.join("; "),
            self.seconds
        )
    }
}

struct Tally {
    passed: bool,
    details: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally { passed: true, details: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: String) {
        self.passed &= ok;
        self.details.push(if ok { detail } else { format!("FAILED {detail}") });
    }

    /// Errors count as failures and are reported, never propagated.
    fn run(&mut self, label: &str, f: impl FnOnce(&mut Tally) -> Result<()>) {
        if let Err(e) = f(self) {
            self.check(false, format!("{label}: error {e}"));
        }
    }
}

pub fn name(id: u8) -> &'static str {
    match id {
        1 => "octahedron lattice constant",
        2 => "planar octagon constant",
        3 => "cube tiling and even rounding",
        4 => "hexagonal lattice in the plane",
        5 => "subgroup construction in l_p",
        6 => "moduli golden values",
        7 => "inequality chains",
        8 => "torus saturation",
        9 => "gamma = 2 ladder",
        _ => "unknown",
    }
}

pub fn run_criterion(id: u8) -> CriterionOutcome {
    let start = Instant::now();
    let mut t = Tally::new();
    match id {
        1 => octahedron(&mut t),
        2 => octagon(&mut t),
        3 => cube_tiling(&mut t),
        4 => hexagonal(&mut t),
        5 => subgroups(&mut t),
        6 => moduli_values(&mut t),
        7 => chains(&mut t),
        8 => saturation(&mut t),
        9 => ladder(&mut t),
        _ => t.check(false, format!("no criterion {id}")),
    }
    CriterionOutcome {
        id,
        name: name(id).into(),
        passed: t.passed,
        details: t.details,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run(ids: &[u8]) -> Vec<CriterionOutcome> {
    ids.iter().map(|&id| run_criterion(id)).collect()
}

fn octahedron(t: &mut Tally) {
    let target = 7.0 / 6.0;
    t.run("octahedron", |t| {
        let s = Space::lp(1.0, 3)?;
        let mut best = None::<crate::lattice::GammaStarEstimate>;
        for seed in 0..8 {
            let e = optimize_lattice(&s, 3, 200_000, seed)?;
            if best.as_ref().is_none_or(|b| e.gamma_star.hi < b.gamma_star.hi) {
                best = Some(e);
            }
        }
        let g = best.expect("eight seeds ran").gamma_star;
        t.check(g.hi <= target + 0.02, format!("best hi={:.6} <= {:.6}", g.hi, target + 0.02));
        t.check(g.hi >= target - 0.02, format!("interval [{:.6}, {:.6}] reaches {:.6}", g.lo, g.hi, target - 0.02));
        Ok(())
    });
}

/// Symmetric polygon with `k` vertex pairs at random angles and radii.
fn random_polygon(seed: u64) -> SpaceDescriptor {
    let mut r = rng::rng(seed);
    let k = r.random_range(2..=6);
    let mut vertices = Vec::with_capacity(2 * k);
    for _ in 0..k {
        let a = r.random::<f64>() * std::f64::consts::PI;
        let rho = 0.6 + 0.8 * r.random::<f64>();
        vertices.push(vec![rho * a.cos(), rho * a.sin()]);
        vertices.push(vec![-rho * a.cos(), -rho * a.sin()]);
    }
    SpaceDescriptor::polytope(vertices)
}

fn octagon(t: &mut Tally) {
    let target = 2.0 * (2.0 - 2f64.sqrt());
    let best_of = |s: &Space, seeds: u64| -> Result<f64> {
        let mut hi = f64::INFINITY;
        for seed in 0..seeds {
            hi = hi.min(optimize_lattice(s, 2, 200_000, seed)?.gamma_star.hi);
        }
        Ok(hi)
    };
    t.run("octagon", |t| {
        let hi = best_of(&Space::new(SpaceDescriptor::regular_polygon(4))?, 4)?;
        t.check((hi - target).abs() <= 0.01, format!("octagon hi={hi:.6} vs {target:.6}"));
        Ok(())
    });
    let mut named: Vec<(String, SpaceDescriptor)> = vec![
        ("square".into(), SpaceDescriptor::regular_polygon(2)),
        ("hexagon".into(), SpaceDescriptor::regular_polygon(3)),
        ("circle".into(), SpaceDescriptor::lp(2.0, 2)),
        ("octagon".into(), SpaceDescriptor::regular_polygon(4)),
    ];
    for i in 0..20 {
        named.push((format!("random{i}"), random_polygon(derive_seed(0x9017, i))));
    }
    t.run("polygons", |t| {
        let mut worst = (String::new(), 0.0f64);
        for (label, d) in &named {
            let hi = best_of(&Space::new(d.clone())?, 2)?;
            if hi > worst.1 {
                worst = (label.clone(), hi);
            }
            if hi > target + 0.02 {
                t.check(false, format!("{label} hi={hi:.6}"));
            }
        }
        t.check(
            worst.1 <= target + 0.02,
            format!("{} descriptors, worst {} hi={:.6} <= {:.6}", named.len(), worst.0, worst.1, target + 0.02),
        );
        Ok(())
    });
}

fn cube_tiling(t: &mut Tally) {
    let mesh = 1.0 / 16.0;
    for n in [2, 3] {
        t.run("cube", |t| {
            let s = Space::lp(f64::INFINITY, n)?;
            let g = gamma_star_of_lattice(&s, &Lattice::scaled_identity(n, 2.0), &CoveringOptions::mesh(mesh))?.gamma_star;
            t.check(
                g.contains(1.0) && g.width() <= mesh,
                format!("n={n} gamma*=[{:.6}, {:.6}] width {:.2e} <= {mesh}", g.lo, g.hi, g.width()),
            );
            Ok(())
        });
    }
    t.run("rounding", |t| {
        let mut r = rng::rng(0x7111);
        let (mut worst, mut bad_sep, mut odd) = (0.0f64, 0usize, 0usize);
        let mut prev: Option<SimpleFunction> = None;
        let cells = 8;
        for _ in 0..10_000 {
            let values = (0..cells).map(|_| (r.random::<f64>() * 2.0 - 1.0) * 20.0).collect();
            let f = SimpleFunction::on_cells(values);
            let g = round_even(&f);
            odd += usize::from(!g.is_even_valued());
            worst = worst.max(sup_distance(&f, &g)?);
            if let Some(p) = &prev {
                if check_even_separation(p, &g).is_err() {
                    bad_sep += 1;
                }
            }
            prev = Some(g);
        }
        t.check(worst <= 1.0 && odd == 0, format!("10000 functions, max |f - round(f)| = {worst:.6}"));
        t.check(bad_sep == 0, format!("9999 rounded pairs 2-separated, {bad_sep} failures"));
        Ok(())
    });
}

fn hexagonal(t: &mut Tally) {
    let target = 2.0 / 3f64.sqrt();
    t.run("hexagonal", |t| {
        let opts = CoveringOptions { mesh: None, tol: Some(0.005), max_evals: 400_000 };
        let g = gamma_star_of_lattice(&Space::lp(2.0, 2)?, &Lattice::hexagonal(), &opts)?.gamma_star;
        t.check(
            g.contains(target) && g.width() <= 0.01,
            format!("gamma*=[{:.6}, {:.6}] contains {target:.6}, width {:.2e}", g.lo, g.hi, g.width()),
        );
        Ok(())
    });
}

/// Acceptance verification radii; larger ones exceed the enumeration
/// node budget at 64 coordinates.
const VERIFY_RADIUS: [(f64, f64); 3] = [(1.0, 3.0), (2.0, 2.0), (3.0, 1.6)];

fn subgroups(t: &mut Tally) {
    let eps = 0.05;
    for (p, radius) in VERIFY_RADIUS {
        t.run(&format!("p={p}"), |t| {
            let s = Space::lp(p, 64)?;
            let targets = integer_ball_targets(p, 64, 200, 5.0, 11)?;
            // fresh coordinates sit exactly 2^{1/p} from the span
            let theta = 2f64.powf(1.0 / p);
            let mut r = build(&s, &targets, &DirectionOracle::FreshCoordinate { n: 64 }, theta, eps)?;
            let reach = r
                .log
                .iter()
                .map(|e| match &e.decision {
                    Decision::CoveredByExisting { distance, .. } => *distance,
                    Decision::NewGenerator { direction, .. } => s.norm(direction),
                })
                .fold(0.0, f64::max);
            let cert = r.certify(&s, radius)?.clone();
            let min = cert.min_nonzero_norm.unwrap_or(f64::INFINITY);
            let floor = (1.0 - eps) * theta - 1e-9;
            let upper = gamma_star_upper_from_build(&r)?;
            let exact = 2.0 / 2f64.powf(1.0 / p);
            t.check(
                min >= floor && reach <= 1.0 + 1e-12,
                format!(
                    "p={p}: {} generators, {} elements within {radius}, min norm {min:.6} >= {floor:.6}, coverage {reach:.3}",
                    r.generator_count(),
                    cert.enumerated_count
                ),
            );
            t.check(
                upper <= (1.0 + eps) * exact * (1.0 + 1e-12),
                format!("p={p}: gamma* <= {upper:.6} vs (1+eps)*{exact:.6} = {:.6}", (1.0 + eps) * exact),
            );
            Ok(())
        });
    }
}

fn moduli_values(t: &mut Tally) {
    let b = EvalBudget::default();
    t.run("delta", |t| {
        let s = Space::lp(2.0, 2)?;
        for (j, eps) in [0.5, 1.0, 1.5].into_iter().enumerate() {
            let d = delta(&s, eps, &b, j as u64)?;
            let exact = 1.0 - (1.0 - eps * eps / 4.0).sqrt();
            t.check((d.hi - exact).abs() <= 1e-4, format!("delta({eps}).hi={:.8} vs {exact:.8}", d.hi));
        }
        Ok(())
    });
    t.run("tangential", |t| {
        for n in [2, 3] {
            let f = tangential(&Space::lp(2.0, n)?, 1.0, &b, 7)?;
            let exact = 2f64.sqrt() - 1.0;
            t.check((f.hi - exact).abs() <= 1e-4, format!("phi(1) n={n}: {:.8} vs {exact:.8}", f.hi));
        }
        Ok(())
    });
    t.run("phi_p", |t| {
        for p in [1.0, 2.0, 4.0] {
            let v = phi_p(p, 1.0)?;
            t.check(v == 2f64.powf(1.0 / p) - 1.0, format!("phi_{p}(1)={v}"));
        }
        Ok(())
    });
}

fn chains(t: &mut Tally) {
    let b = EvalBudget::default();
    let lo = 2.0 / 5f64.sqrt();
    for p in [1.0, 1.5, 2.0, 3.0, 4.0] {
        t.run(&format!("p={p}"), |t| {
            let s = Space::lp(p, 2)?;
            let grid = uniform_grid(2.0, 9);
            let table = tangential_table(&s, &grid, &b, 21)?;
            let ivs = &table.intervals;
            let mut lipschitz = ivs[0].hi == 0.0;
            for i in 0..grid.len() {
                for j in i + 1..grid.len() {
                    let slack = 2.0 * (ivs[i].width() + ivs[j].width()) + 1e-9;
                    lipschitz &= (ivs[j].hi - ivs[i].hi).abs() <= grid[j] - grid[i] + slack;
                }
            }
            let axioms = check_modulus_axioms(&table.modulus, &grid);
            let ineq = varphi_delta_inequalities(&s, &[0.5, 1.0, 1.5], &b, 22)?;
            let tx = t_x(&s, &b, 23)?;
            t.check(
                lipschitz && axioms.phi3_ok && ineq.all_hold && tx.intersects(lo, 1.0),
                format!(
                    "p={p}: phi(0)=0 and 1-Lipschitz {lipschitz}, rescaling {}, delta/phi inequalities {}, t_X=[{:.4}, {:.4}]",
                    axioms.phi3_ok, ineq.all_hold, tx.lo, tx.hi
                ),
            );
            Ok(())
        });
    }
    t.run("minkowski", |t| {
        let r = minkowski_type_check(&MinkowskiGrid::standard())?;
        t.check(r.all_hold, format!("{} grid nodes, {} violations", r.nodes, r.violations.len()));
        Ok(())
    });
    for p in [1.5, 2.0, 3.0, 4.0] {
        t.run(&format!("chain p={p}"), |t| {
            let rep = chain_report(&Space::lp(p, 2)?, 2.0, &b, 31)?;
            let slack = rep.chain_checks.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
            t.check(rep.all_hold(), format!("chain p={p}: min slack {slack:.2e}"));
            Ok(())
        });
    }
}

fn saturation(t: &mut Tally) {
    for p in [2.0, 1.0] {
        t.run(&format!("p={p}"), |t| {
            let s = Space::lp(p, 2)?;
            let r = saturate_packing(&s, &Lattice::scaled_identity(2, 4.0), &SaturateOptions::default())?;
            t.check(
                r.r.hi <= 1.95,
                format!("p={p}: {} centers, r=[{:.4}, {:.4}] <= 1.95", r.centers.len(), r.r.lo, r.r.hi),
            );
            Ok(())
        });
    }
}

fn ladder(t: &mut Tally) {
    let printed = [1.414214, 1.681793, 1.834008, 1.915207];
    t.run("ladder", |t| {
        let rep = named_gamma(&NamedSpace::GammaTwo { p: 2.0, pk: vec![], ms: vec![2.0, 4.0, 8.0, 16.0] })?;
        let entry = rep.entries.iter().find_map(|e| match &e.value {
            BoundValue::Ladder { values, sup } => Some((values.clone(), *sup)),
            _ => None,
        });
        let Some((values, sup)) = entry else {
            t.check(false, "no ladder entry".into());
            return Ok(());
        };
        let close = values.len() == 4 && values.iter().zip(printed).all(|(v, w)| (v - w).abs() <= 1e-6);
        let rising = values.windows(2).all(|w| w[0] < w[1]) && values.iter().all(|v| *v < sup) && sup == 2.0;
        let shown: Vec<String> = values.iter().map(|v| format!("{v:.6}")).collect();
        t.check(close && rising, format!("ladder {} -> {sup}", shown.join(", ")));
        Ok(())
    });
}
