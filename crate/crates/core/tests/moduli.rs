use packcover::moduli::{
    check_modulus_axioms, compose, delta, delta_local, delta_table, nordlander_check, phi_p, t_x, tangential,
    tangential_table, uniform_grid, varphi_delta_inequalities, EvalBudget, Modulus,
};
use packcover::{Space, SpaceDescriptor};
use proptest::prelude::*;

fn budget() -> EvalBudget {
    EvalBudget::default()
}

/// Brute-force values on the l_p circle: x on a 20000-point angle grid,
/// the partner y solved by bisection on `|x - y| = eps`.
const DELTA_ORACLE: [(f64, [f64; 3]); 3] = [
    (1.5, [0.015878505551330413, 0.0671226104063718, 0.17375788153377503]),
    (3.0, [0.005235698115463316, 0.043534408926634405, 0.16694453725181835]),
    (4.0, [0.00097799628209283, 0.01600516488412196, 0.0907160593774603]),
];

/// Brute-force φ(1) with v spanning the kernel of the gradient at x.
const PHI_ORACLE: [(f64, f64); 3] = [(1.5, 0.2381352586974088), (3.0, 0.17066370126601793), (4.0, 0.076114652610759)];

#[test]
fn delta_matches_brute_force() {
    for (p, vals) in DELTA_ORACLE {
        let s = Space::lp(p, 2).unwrap();
        for (eps, want) in [0.5, 1.0, 1.5].into_iter().zip(vals) {
            let iv = delta(&s, eps, &budget(), 3).unwrap();
            assert!((iv.hi - want).abs() <= 2e-4, "p={p} eps={eps}: {iv:?} vs {want}");
        }
    }
}

#[test]
fn tangential_matches_brute_force() {
    for (p, want) in PHI_ORACLE {
        let iv = tangential(&Space::lp(p, 2).unwrap(), 1.0, &budget(), 4).unwrap();
        assert!((iv.hi - want).abs() <= 2e-4, "p={p}: {iv:?} vs {want}");
    }
}

#[test]
fn delta_examples() {
    let l2 = Space::lp(2.0, 2).unwrap();
    assert!(delta(&l2, 1.0, &budget(), 0).unwrap().contains_within(1.0 - 3f64.sqrt() / 2.0, 1e-9));
    assert!(delta(&Space::lp(1.0, 2).unwrap(), 1.0, &budget(), 0).unwrap().contains_within(0.0, 1e-9));
    let z = delta(&Space::lp(3.0, 3).unwrap(), 0.0, &budget(), 0).unwrap();
    assert_eq!((z.lo, z.hi), (0.0, 0.0));
    assert!(delta(&l2, 2.5, &budget(), 0).is_err());
}

#[test]
fn delta_local_examples() {
    let l2 = Space::lp(2.0, 2).unwrap();
    let g = delta(&l2, 1.0, &budget(), 0).unwrap();
    let l = delta_local(&l2, &[1.0, 0.0], 1.0, &budget(), 1).unwrap();
    assert!((g.hi - l.hi).abs() <= 1e-4);
    let l1 = Space::lp(1.0, 2).unwrap();
    assert!(delta_local(&l1, &[1.0, 0.0], 0.5, &budget(), 1).unwrap().contains_within(0.0, 1e-9));
    let z = delta_local(&l1, &[0.5, 0.5], 0.0, &budget(), 1).unwrap();
    assert_eq!((z.lo, z.hi), (0.0, 0.0));
    assert!(delta_local(&l1, &[2.0, 0.0], 0.5, &budget(), 1).is_err());
}

#[test]
fn tangential_examples() {
    for n in [2, 4] {
        let iv = tangential(&Space::lp(2.0, n).unwrap(), 1.0, &budget(), 2).unwrap();
        assert!(iv.contains_within(2f64.sqrt() - 1.0, 1e-9), "{iv:?}");
    }
    assert!(tangential(&Space::lp(1.0, 2).unwrap(), 1.0, &budget(), 2).unwrap().contains_within(0.0, 1e-9));
    let z = tangential(&Space::lp(3.0, 2).unwrap(), 0.0, &budget(), 2).unwrap();
    assert_eq!((z.lo, z.hi), (0.0, 0.0));
}

#[test]
fn phi_p_and_composition() {
    assert_eq!(phi_p(2.0, 1.0).unwrap(), 2f64.sqrt() - 1.0);
    assert_eq!(phi_p(1.0, 0.731).unwrap(), 0.731);
    assert_eq!(phi_p(7.0, 0.0).unwrap(), 0.0);
    let c = compose(&Modulus::PhiP { p: 2.0 }, &Modulus::PhiP { p: 2.0 }).unwrap();
    assert!((c.eval(1.0) - 0.082392).abs() < 1e-6);
    let id = compose(&Modulus::Identity, &Modulus::PhiP { p: 3.0 }).unwrap();
    for t in uniform_grid(2.0, 11) {
        assert_eq!(id.eval(t), phi_p(3.0, t).unwrap());
    }
    let bad = Modulus::table(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.1], "sublinear").unwrap();
    assert!(bad.is_non_modulus());
    assert!(compose(&Modulus::Identity, &bad).is_err());
}

#[test]
fn axiom_examples() {
    let grid = uniform_grid(2.0, 41);
    for p in [1.0, 1.5, 2.0, 4.0, 8.0] {
        let r = check_modulus_axioms(&Modulus::PhiP { p }, &grid);
        assert!(r.is_modulus() && r.positive, "p={p}: {r:?}");
    }
    let sq = Modulus::table(grid.clone(), grid.iter().map(|t| t * t).collect(), "t^2").unwrap();
    assert!(check_modulus_axioms(&sq, &grid).is_modulus());
    let table = tangential_table(&Space::lp(3.0, 2).unwrap(), &uniform_grid(2.0, 9), &budget(), 5).unwrap();
    assert!(check_modulus_axioms(&table.modulus, table.grid()).phi2_ok);
}

#[test]
fn t_x_examples() {
    let tol = 1e-9;
    let h = t_x(&Space::lp(2.0, 2).unwrap(), &budget(), 0).unwrap();
    assert!(h.contains_within(2.0 / 5f64.sqrt(), 1e-4), "{h:?}");
    let f = t_x(&Space::lp(1.0, 2).unwrap(), &budget(), 0).unwrap();
    assert!(f.contains(1.0));
    for p in [1.3, 6.0] {
        let iv = t_x(&Space::lp(p, 2).unwrap(), &budget(), 0).unwrap();
        assert!(iv.lo >= 2.0 / 5f64.sqrt() - 1e-4 - tol, "p={p}: {iv:?}");
    }
}

#[test]
fn nordlander_examples() {
    let grid = [0.0, 0.5, 1.0, 1.5, 2.0];
    let h = nordlander_check(&Space::lp(2.0, 2).unwrap(), &grid, &budget(), 0).unwrap();
    assert!(h.all_hold && h.rows.iter().all(|r| r.equality));
    let q = nordlander_check(&Space::lp(4.0, 2).unwrap(), &[0.0, 1.0], &budget(), 0).unwrap();
    assert!(q.all_hold && q.rows[1].strict);
    assert_eq!(q.rows[0].delta.hi, 0.0);
}

#[test]
fn varphi_delta_small_t() {
    let r = varphi_delta_inequalities(&Space::lp(2.0, 2).unwrap(), &[1e-3], &budget(), 0).unwrap();
    assert!(r.all_hold);
    let row = &r.rows[0];
    assert!(row.first_lhs < 1e-6 && row.first_rhs < 1e-6);
}

#[test]
fn subspace_monotonicity() {
    for p in [1.5, 3.0] {
        let small = tangential(&Space::lp(p, 2).unwrap(), 1.0, &budget(), 8).unwrap();
        let big = tangential(&Space::lp(p, 4).unwrap(), 1.0, &budget(), 8).unwrap();
        assert!(small.hi >= big.lo - small.width() - big.width() - 1e-9, "p={p}: {small:?} vs {big:?}");
    }
}

#[test]
fn positivity_equivalence() {
    let grid = [0.0, 0.1, 0.5, 1.0];
    for p in [1.5, 2.0, 4.0] {
        let s = Space::lp(p, 2).unwrap();
        let d = delta_table(&s, &grid, &budget(), 1).unwrap();
        let f = tangential_table(&s, &grid, &budget(), 1).unwrap();
        for j in 1..grid.len() {
            assert!(d.intervals[j].lo > 0.0 && f.intervals[j].lo > 0.0, "p={p} t={}", grid[j]);
        }
    }
    let s = Space::lp(1.0, 2).unwrap();
    let d = delta_table(&s, &grid, &budget(), 1).unwrap();
    let f = tangential_table(&s, &grid, &budget(), 1).unwrap();
    for j in 0..grid.len() {
        assert!(d.intervals[j].hi <= 1e-9 && f.intervals[j].hi <= 1e-9, "t={}", grid[j]);
    }
}

#[test]
fn perturbed_polytope_smoke() {
    let base = match SpaceDescriptor::regular_polygon(6) {
        SpaceDescriptor::Polytope { vertices } => vertices,
        _ => unreachable!(),
    };
    // vertices i and i + 6 are opposite and share the factor
    let scaled: Vec<Vec<f64>> = base
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let k = 1.0 + 0.01 * ((i % 6) as f64 / 5.0);
            v.iter().map(|c| c * k).collect()
        })
        .collect();
    let a = tangential(&Space::new(SpaceDescriptor::polytope(base)).unwrap(), 1.0, &budget(), 3).unwrap();
    let b = tangential(&Space::new(SpaceDescriptor::polytope(scaled)).unwrap(), 1.0, &budget(), 3).unwrap();
    assert!((a.hi - b.hi).abs() <= 0.1, "{a:?} vs {b:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn sampled_tables_are_lipschitz_and_rescalable(p in 1.1f64..6.0, seed in any::<u64>()) {
        let s = Space::lp(p, 2).unwrap();
        let grid = uniform_grid(2.0, 7);
        let t = tangential_table(&s, &grid, &EvalBudget::with_starts(24), seed).unwrap();
        prop_assert_eq!(t.intervals[0].hi, 0.0);
        for i in 0..grid.len() {
            for j in i + 1..grid.len() {
                let slack = 2.0 * (t.intervals[i].width() + t.intervals[j].width()) + 1e-9;
                prop_assert!((t.intervals[j].hi - t.intervals[i].hi).abs() <= grid[j] - grid[i] + slack);
            }
        }
        prop_assert!(check_modulus_axioms(&t.modulus, &grid).phi3_ok);
    }

    #[test]
    fn phi_p_is_a_modulus(p in 1.0f64..8.0, t in 0.0f64..4.0, l in 0.0f64..1.0) {
        let v = phi_p(p, t).unwrap();
        prop_assert!(v >= 0.0 && v <= t + 1e-15);
        prop_assert!(phi_p(p, l * t).unwrap() <= l * v + 1e-12);
    }
}
