use packcover::dispersion::{dispersion_sweep, max_min_separation, verify_separation, DispersionBudget};
use packcover::{Space, SpaceDescriptor};
use proptest::prelude::*;

fn budget() -> DispersionBudget {
    DispersionBudget::default()
}

#[test]
fn cross_polytope_vertices() {
    let s = Space::lp(1.0, 2).unwrap();
    let r = max_min_separation(&s, 4, &budget(), 0).unwrap();
    assert_eq!(r.min_separation, 2.0);
    let basis = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
    assert_eq!(verify_separation(&s, &basis), 2.0);
}

#[test]
fn coordinate_vectors_bound() {
    for (p, n) in [(1.5, 3), (2.0, 4), (3.0, 3), (f64::INFINITY, 3)] {
        let r = max_min_separation(&Space::lp(p, n).unwrap(), n, &budget(), 1).unwrap();
        let floor = if p.is_infinite() { 1.0 } else { 2f64.powf(1.0 / p) };
        assert!(r.min_separation >= floor - 1e-12, "p={p} n={n}: {}", r.min_separation);
    }
}

/// Three points on the circle: first fixed at angle 0, the others on a
/// 720-step grid.
fn brute_three_on_circle() -> f64 {
    let s = Space::lp(2.0, 2).unwrap();
    let pt = |k: usize| {
        let a = std::f64::consts::TAU * k as f64 / 720.0;
        vec![a.cos(), a.sin()]
    };
    let x0 = pt(0);
    let mut best = 0.0f64;
    for i in 1..720 {
        for j in i + 1..720 {
            let (a, b) = (pt(i), pt(j));
            best = best.max(s.dist(&x0, &a).min(s.dist(&x0, &b)).min(s.dist(&a, &b)));
        }
    }
    best
}

#[test]
fn equilateral_triangle_in_the_disc() {
    let oracle = brute_three_on_circle();
    assert!((oracle - 3f64.sqrt()).abs() < 1e-12);
    let r = max_min_separation(&Space::lp(2.0, 2).unwrap(), 3, &budget(), 2).unwrap();
    assert!((r.min_separation - oracle).abs() <= 1e-3, "{}", r.min_separation);
}

#[test]
fn reported_separation_is_recomputed() {
    for m in [2, 5, 9] {
        let s = Space::lp(3.0, 3).unwrap();
        let r = max_min_separation(&s, m, &budget(), 3).unwrap();
        assert_eq!(verify_separation(&s, &r.points), r.min_separation);
        assert_eq!(r.points.len(), m);
        assert!(r.points.iter().all(|p| s.norm(p) <= 1.0 + 1e-12));
    }
    let s = Space::lp(2.0, 2).unwrap();
    assert_eq!(verify_separation(&s, &[vec![0.5, 0.5], vec![0.5, 0.5]]), 0.0);
}

#[test]
fn sweep_is_monotone() {
    let s = Space::new(SpaceDescriptor::regular_polygon(3)).unwrap();
    let ms = [2, 3, 4, 5, 6, 7, 8, 10, 12];
    let rs = dispersion_sweep(&s, &ms, &DispersionBudget { sweeps: 150, ..budget() }, 4).unwrap();
    for w in rs.windows(2) {
        assert!(w[1].min_separation <= w[0].min_separation + 1e-9);
    }
    assert_eq!(rs[0].min_separation, 2.0);
}

#[test]
fn dilated_ball_scales_exactly() {
    // weights 1/2 make the unit ball twice as large
    let s = Space::lp(2.0, 3).unwrap();
    let big = Space::new(SpaceDescriptor::weighted_lp(2.0, vec![0.5; 3])).unwrap();
    let a = max_min_separation(&s, 6, &budget(), 5).unwrap();
    let b = max_min_separation(&big, 6, &budget(), 5).unwrap();
    assert_eq!(verify_separation(&s, &b.points), 2.0 * a.min_separation);
}

#[test]
fn banach_mazur_close_polytopes() {
    let base = SpaceDescriptor::regular_polygon(4);
    let SpaceDescriptor::Polytope { vertices } = &base else { unreachable!() };
    let d = 1.04;
    let stretched: Vec<Vec<f64>> = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let k = if i % 2 == 0 { d } else { 1.0 };
            v.iter().map(|c| c * k).collect()
        })
        .collect();
    let a = Space::new(base.clone()).unwrap();
    let b = Space::new(SpaceDescriptor::polytope(stretched)).unwrap();
    for m in [3, 5, 8] {
        let sa = max_min_separation(&a, m, &budget(), 6).unwrap().min_separation;
        let sb = max_min_separation(&b, m, &budget(), 6).unwrap().min_separation;
        let ratio = (sa / sb).max(sb / sa);
        assert!(ratio <= d + 0.05, "m={m}: {sa} vs {sb}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn separation_matches_points(p in 1.0f64..5.0, m in 2usize..10, seed in any::<u64>()) {
        let s = Space::lp(p, 2).unwrap();
        let r = max_min_separation(&s, m, &DispersionBudget { sweeps: 60, random_starts: 1, max_m: 16 }, seed).unwrap();
        prop_assert_eq!(verify_separation(&s, &r.points), r.min_separation);
        prop_assert!(r.min_separation <= 2.0 + 1e-12);
        prop_assert!(r.points.iter().all(|x| s.norm(x) <= 1.0 + 1e-12));
    }
}
