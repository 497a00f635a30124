use packcover::lattice::{
    covering_radius, dist_to_lattice, gamma_star_of_lattice, optimize_lattice, shortest_vector, voronoi_gauge,
    CoveringOptions,
};
use packcover::rng::{gaussian_vec, rng};
use packcover::{Lattice, Space, SpaceDescriptor};
use proptest::prelude::*;
use rand::Rng as _;

fn brute_shortest(space: &Space, lat: &Lattice, bound: i64) -> (Vec<i64>, f64) {
    let n = lat.rank();
    let mut best = (vec![], f64::INFINITY);
    let side = (2 * bound + 1) as usize;
    for idx in 0..side.pow(n as u32) {
        let mut r = idx;
        let k: Vec<i64> = (0..n)
            .map(|_| {
                let c = (r % side) as i64 - bound;
                r /= side;
                c
            })
            .collect();
        if k.iter().all(|&c| c == 0) {
            continue;
        }
        let d = space.norm(&lat.point(&k));
        if d < best.1 {
            best = (k, d);
        }
    }
    best
}

#[test]
fn shortest_vector_examples() {
    let (_, l) = shortest_vector(&Space::lp(f64::INFINITY, 2).unwrap(), &Lattice::scaled_identity(2, 2.0)).unwrap();
    assert_eq!(l, 2.0);
    let (_, l) = shortest_vector(&Space::lp(2.0, 2).unwrap(), &Lattice::hexagonal()).unwrap();
    assert!((l - 2.0).abs() < 1e-12);
    let (_, l) = shortest_vector(&Space::lp(1.0, 3).unwrap(), &Lattice::scaled_identity(3, 2.0)).unwrap();
    assert_eq!(l, 2.0);
}

#[test]
fn shortest_vector_matches_brute_force() {
    let spaces = [Space::lp(1.0, 2).unwrap(), Space::lp(2.0, 2).unwrap(), Space::lp(3.0, 3).unwrap(), Space::lp(f64::INFINITY, 3).unwrap()];
    let mut r = rng(404);
    let mut compared = 0;
    for trial in 0..50 {
        let s = &spaces[trial % spaces.len()];
        let n = s.dim();
        let basis: Vec<Vec<f64>> = (0..n).map(|_| gaussian_vec(&mut r, n)).collect();
        let Ok(lat) = Lattice::new(basis) else { continue };
        let (v, l) = shortest_vector(s, &lat).unwrap();
        let (bk, bl) = brute_shortest(s, &lat, 4);
        assert!(l <= bl + 1e-9, "enumeration missed {bk:?}: {l} > {bl}");
        assert!((s.norm(&v) - l).abs() <= 1e-9);
        let k = lat.coordinates(&v).unwrap();
        if k.iter().all(|c| c.abs() <= 4.0 + 1e-6) {
            assert!((l - bl).abs() <= 1e-9, "trial {trial}: {l} vs brute {bl}");
            compared += 1;
        }
    }
    assert!(compared >= 40, "only {compared} instances inside the box");
}

#[test]
fn distance_examples() {
    let z2 = Lattice::scaled_identity(2, 2.0);
    assert_eq!(dist_to_lattice(&Space::lp(f64::INFINITY, 2).unwrap(), &z2, &[1.0, 1.0]).unwrap(), 1.0);
    assert!((dist_to_lattice(&Space::lp(2.0, 2).unwrap(), &z2, &[1.0, 1.0]).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    let hex = Lattice::hexagonal();
    let p = hex.point(&[3, -2]);
    assert!(dist_to_lattice(&Space::lp(1.5, 2).unwrap(), &hex, &p).unwrap() < 1e-12);
}

#[test]
fn covering_examples() {
    let iv = covering_radius(&Space::lp(f64::INFINITY, 2).unwrap(), &Lattice::scaled_identity(2, 2.0), &CoveringOptions::mesh(0.25)).unwrap();
    assert!(iv.contains(1.0) && iv.width() <= 0.25 + 1e-9, "{iv:?}");
    let iv = covering_radius(&Space::lp(2.0, 2).unwrap(), &Lattice::hexagonal(), &CoveringOptions::default()).unwrap();
    assert!(iv.contains(2.0 / 3f64.sqrt()), "{iv:?}");
    let iv = covering_radius(&Space::lp(1.0, 3).unwrap(), &Lattice::scaled_identity(3, 2.0), &CoveringOptions::default()).unwrap();
    assert!(iv.contains_within(3.0, 1e-9), "{iv:?}");
    let flat = Lattice::new(vec![vec![1.0, 0.0], vec![2.0, 0.0]]);
    assert!(flat.is_err() || covering_radius(&Space::lp(2.0, 2).unwrap(), &flat.unwrap(), &CoveringOptions::default()).is_err());
}

#[test]
fn gamma_star_examples() {
    for n in [2, 3] {
        let g = gamma_star_of_lattice(&Space::lp(f64::INFINITY, n).unwrap(), &Lattice::scaled_identity(n, 2.0), &CoveringOptions::default()).unwrap();
        assert!(g.gamma_star.contains(1.0));
    }
    let g = gamma_star_of_lattice(&Space::lp(2.0, 2).unwrap(), &Lattice::hexagonal(), &CoveringOptions::default()).unwrap();
    assert!(g.gamma_star.contains(2.0 / 3f64.sqrt()));
}

/// A lattice found by search for the octahedron; frozen so the value is
/// checked without rerunning the optimizer.
#[test]
fn frozen_octahedron_witness() {
    let basis = vec![
        vec![0.6780277731332076, 0.6559195927271291, -0.668070692263634],
        vec![0.3451691287851352, 0.9984999692762203, 0.6564902868392025],
        vec![0.6841661459249353, -0.33222476729119166, 0.9873263102590231],
    ];
    let g = gamma_star_of_lattice(&Space::lp(1.0, 3).unwrap(), &Lattice::new(basis).unwrap(), &CoveringOptions { mesh: None, tol: Some(0.002), max_evals: 2_000_000 }).unwrap();
    assert!(g.gamma_star.hi <= 7.0 / 6.0 + 0.02, "{:?}", g.gamma_star);
    assert!(g.gamma_star.hi >= 7.0 / 6.0 - 0.02);
}

#[test]
fn optimizer_small_cases() {
    let e = optimize_lattice(&Space::lp(f64::INFINITY, 2).unwrap(), 2, 20_000, 1).unwrap();
    assert!(e.gamma_star.hi <= 1.0 + 0.02, "{:?}", e.gamma_star);
    let e = optimize_lattice(&Space::lp(2.0, 2).unwrap(), 2, 20_000, 1).unwrap();
    assert!((e.gamma_star.hi - 2.0 / 3f64.sqrt()).abs() <= 0.01, "{:?}", e.gamma_star);
    let e = optimize_lattice(&Space::new(SpaceDescriptor::regular_polygon(4)).unwrap(), 2, 50_000, 0).unwrap();
    let oct = 2.0 * (2.0 - 2f64.sqrt());
    assert!((e.gamma_star.hi - oct).abs() <= 0.01, "{:?}", e.gamma_star);
    assert_eq!(
        optimize_lattice(&Space::lp(2.0, 2).unwrap(), 2, 2_000, 5).unwrap().gamma_star,
        optimize_lattice(&Space::lp(2.0, 2).unwrap(), 2, 2_000, 5).unwrap().gamma_star
    );
}

#[test]
fn three_dimensional_bound() {
    for d in [SpaceDescriptor::lp(2.0, 3), SpaceDescriptor::lp(3.0, 3), SpaceDescriptor::linf(3)] {
        let e = optimize_lattice(&Space::new(d.clone()).unwrap(), 3, 20_000, 2).unwrap();
        assert!(e.gamma_star.hi <= 1.75 + 0.02, "{d:?}: {:?}", e.gamma_star);
    }
}

#[test]
fn voronoi_gauge_examples() {
    let z2 = Lattice::scaled_identity(2, 2.0);
    assert!((voronoi_gauge(&z2, &[1.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
    assert!((voronoi_gauge(&z2, &[2.0, 0.0]).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn voronoi_renorming_tiles() {
    let mut r = rng(77);
    for lat in [Lattice::hexagonal(), Lattice::new(vec![vec![1.0, 0.3, 0.0], vec![0.2, 1.1, 0.4], vec![0.0, -0.5, 0.9]]).unwrap()] {
        let s = Space::new(SpaceDescriptor::voronoi(lat.clone())).unwrap();
        for _ in 0..1000 {
            let x: Vec<f64> = (0..lat.dim()).map(|_| r.random::<f64>() * 10.0 - 5.0).collect();
            assert!(dist_to_lattice(&s, &lat, &x).unwrap() <= 1.0 + 1e-6);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn covering_certificate_dominates_samples(
        b in prop::collection::vec(-2.0f64..2.0, 4),
        p in prop::sample::select(vec![1.0, 2.0, 3.0, f64::INFINITY]),
        seed in any::<u64>(),
    ) {
        let basis = vec![vec![1.0 + b[0].abs(), b[1]], vec![b[2], 1.0 + b[3].abs()]];
        let Ok(lat) = Lattice::new(basis) else { return Ok(()) };
        prop_assume!(lat.determinant().abs() > 0.2);
        let s = Space::lp(p, 2).unwrap();
        let g = gamma_star_of_lattice(&s, &lat, &CoveringOptions::default()).unwrap();
        prop_assert!(g.gamma_star.lo >= 1.0 - 1e-9);
        let mut r = rng(seed);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..2).map(|_| r.random::<f64>() * 8.0 - 4.0).collect();
            prop_assert!(dist_to_lattice(&s, &lat, &x).unwrap() <= g.covering.hi + 1e-9);
        }
    }
}
