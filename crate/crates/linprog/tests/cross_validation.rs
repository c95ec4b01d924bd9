//! Randomized agreement tests between the two solve paths, plus duality
//! identities that hold at any optimum.

use linprog::{Outcome, Problem, Relation};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Build a random LP with all-free variables and Ge/Eq rows only (the shape
/// `solve_via_dual` accepts). Box rows keep it bounded.
fn random_lp(rng: &mut ChaCha8Rng) -> Problem {
    let n = rng.random_range(2..=5);
    let m = rng.random_range(2..=8);
    let mut p = Problem::new(n);
    for j in 0..n {
        // Small integer-ish objective, sometimes zero.
        let c = rng.random_range(-4..=4) as f64 / 2.0;
        p.set_objective(j as u32, c).unwrap();
    }
    for _ in 0..m {
        let rel = if rng.random_bool(0.3) {
            Relation::Eq
        } else {
            Relation::Ge
        };
        let mut coeffs = Vec::new();
        for j in 0..n {
            if rng.random_bool(0.7) {
                let v = rng.random_range(-3..=3) as f64;
                coeffs.push((j as u32, v));
            }
        }
        let rhs = rng.random_range(-5..=5) as f64;
        p.add_row(rel, rhs, &coeffs).unwrap();
    }
    // Box: -B <= x_j <= B expressed as Ge rows so the dual shape is kept.
    let bound = 50.0;
    for j in 0..n {
        p.add_row(Relation::Ge, -bound, &[(j as u32, 1.0)]).unwrap();
        p.add_row(Relation::Ge, -bound, &[(j as u32, -1.0)]).unwrap();
    }
    p
}

#[test]
fn direct_and_dual_paths_agree_on_random_lps() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut optimal = 0;
    let mut infeasible = 0;
    for case in 0..400 {
        let p = random_lp(&mut rng);
        let direct = p.solve().unwrap();
        let viadual = p.solve_via_dual(true).unwrap();
        match (&direct, &viadual) {
            (Outcome::Optimal(a), Outcome::Optimal(b)) => {
                assert!(
                    (a.objective - b.objective).abs() <= 1e-6 * (1.0 + a.objective.abs()),
                    "case {case}: direct {} vs dual {}",
                    a.objective,
                    b.objective
                );
                optimal += 1;
            }
            (Outcome::Infeasible, Outcome::Infeasible) => infeasible += 1,
            other => panic!("case {case}: paths disagree: {other:?}"),
        }
    }
    // The generator must actually exercise both outcomes.
    assert!(optimal >= 50, "only {optimal} optimal cases");
    assert!(infeasible >= 20, "only {infeasible} infeasible cases");
}

#[test]
fn strong_duality_holds_at_optimum() {
    // With every variable free, the optimum satisfies c'x = sum_i y_i b_i
    // exactly (no bound terms contribute to the Lagrangian).
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut checked = 0;
    for _ in 0..200 {
        let p = random_lp(&mut rng);
        if let Outcome::Optimal(sol) = p.solve().unwrap() {
            let dual_obj: f64 = sol
                .duals
                .iter()
                .zip(p.rhs_iter())
                .map(|(&y, b)| y * b)
                .sum();
            assert!(
                (sol.objective - dual_obj).abs() <= 1e-6 * (1.0 + sol.objective.abs()),
                "primal {} vs dual {}",
                sol.objective,
                dual_obj
            );
            checked += 1;
        }
    }
    assert!(checked >= 50);
}

#[test]
fn bounded_variables_match_row_encoded_bounds() {
    // The same LP solved with native bounds and with bounds as rows must
    // agree; exercises bound flips in the ratio test.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..200 {
        let n = rng.random_range(2..=4);
        let m = rng.random_range(1..=5);
        let mut boxed = Problem::new(n);
        let mut rowed = Problem::new(n);
        let mut bounds = Vec::new();
        for j in 0..n {
            let lo = rng.random_range(-4..=0) as f64;
            let hi = rng.random_range(0..=4) as f64;
            let c = rng.random_range(-4..=4) as f64 / 2.0;
            boxed.set_objective(j as u32, c).unwrap();
            rowed.set_objective(j as u32, c).unwrap();
            boxed.set_bounds(j as u32, lo, hi).unwrap();
            rowed.add_row(Relation::Ge, lo, &[(j as u32, 1.0)]).unwrap();
            rowed.add_row(Relation::Ge, -hi, &[(j as u32, -1.0)]).unwrap();
            bounds.push((lo, hi));
        }
        for _ in 0..m {
            let mut coeffs = Vec::new();
            for j in 0..n {
                if rng.random_bool(0.7) {
                    coeffs.push((j as u32, rng.random_range(-3..=3) as f64));
                }
            }
            let rhs = rng.random_range(-4..=4) as f64;
            boxed.add_row(Relation::Ge, rhs, &coeffs).unwrap();
            rowed.add_row(Relation::Ge, rhs, &coeffs).unwrap();
        }
        let a = boxed.solve().unwrap();
        let b = rowed.solve().unwrap();
        match (&a, &b) {
            (Outcome::Optimal(sa), Outcome::Optimal(sb)) => {
                assert!(
                    (sa.objective - sb.objective).abs() <= 1e-6 * (1.0 + sa.objective.abs()),
                    "case {case}: {} vs {}",
                    sa.objective,
                    sb.objective
                );
                for (j, &(lo, hi)) in bounds.iter().enumerate() {
                    assert!(sa.x[j] >= lo - 1e-7 && sa.x[j] <= hi + 1e-7);
                }
            }
            (Outcome::Infeasible, Outcome::Infeasible) => {}
            other => panic!("case {case}: encodings disagree: {other:?}"),
        }
    }
}

#[test]
fn min_cost_flow_shaped_lp() {
    // Unit-capacity flow on a 5-path a-b-c-d-e: one unit from a to e. The
    // minimum number of interior vertices carrying flow is 3 (b, c, d).
    // Variables: arc flows f_uv both directions (8), vertex indicators x for
    // the 3 interior vertices. Conservation at interior vertices; capacity
    // f_in(v) <= x_v; x in [0,1]. Minimize sum x_v -> 3.
    // Arc list: (0:a->b) (1:b->a) (2:b->c) (3:c->b) (4:c->d) (5:d->c)
    //           (6:d->e) (7:e->d); x_b=8, x_c=9, x_d=10.
    let mut p = Problem::new(11);
    for j in 0..8 {
        p.set_bounds(j, 0.0, f64::INFINITY).unwrap();
    }
    for j in 8..11 {
        p.set_bounds(j, 0.0, 1.0).unwrap();
        p.set_objective(j, 1.0).unwrap();
    }
    // Source a: out - in = 1.
    p.add_row(Relation::Eq, 1.0, &[(0, 1.0), (1, -1.0)]).unwrap();
    // b: in - out = 0  -> f_ab + f_cb - f_ba - f_bc = 0.
    p.add_row(Relation::Eq, 0.0, &[(0, 1.0), (3, 1.0), (1, -1.0), (2, -1.0)])
        .unwrap();
    // c: f_bc + f_dc - f_cb - f_cd = 0.
    p.add_row(Relation::Eq, 0.0, &[(2, 1.0), (5, 1.0), (3, -1.0), (4, -1.0)])
        .unwrap();
    // d: f_cd + f_ed - f_dc - f_de = 0.
    p.add_row(Relation::Eq, 0.0, &[(4, 1.0), (7, 1.0), (5, -1.0), (6, -1.0)])
        .unwrap();
    // Sink e: in - out = 1.
    p.add_row(Relation::Eq, 1.0, &[(6, 1.0), (7, -1.0)]).unwrap();
    // Capacity: inflow(v) <= x_v.
    p.add_row(Relation::Le, 0.0, &[(0, 1.0), (3, 1.0), (8, -1.0)]).unwrap();
    p.add_row(Relation::Le, 0.0, &[(2, 1.0), (5, 1.0), (9, -1.0)]).unwrap();
    p.add_row(Relation::Le, 0.0, &[(4, 1.0), (7, 1.0), (10, -1.0)]).unwrap();
    let sol = p.solve().unwrap().optimal().unwrap();
    assert!((sol.objective - 3.0).abs() < 1e-8, "got {}", sol.objective);
}
