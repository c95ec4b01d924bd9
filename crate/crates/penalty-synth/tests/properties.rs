//! Structural properties of synthesis: bound monotonicity, certificate
//! soundness, explicit/implicit fault-model consistency, and cache
//! round-trips.

use std::collections::BTreeSet;

use ising_core::{ParameterBounds, SimpleGraph, Tuple};
use penalty_synth::{
    reify, signature_key, synthesize_faulty_penalty, synthesize_penalty, verify_penalty,
    PenaltyLibrary, Placement,
};
use rand::seq::IteratorRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn complete_bipartite(a: usize, b: usize) -> SimpleGraph {
    let mut g = SimpleGraph::new(a + b);
    for u in 0..a as u32 {
        for v in 0..b as u32 {
            g.add_edge(u, a as u32 + v).unwrap();
        }
    }
    g
}

fn random_feasible_sets(n_vars: usize, count: usize, seed: u64) -> Vec<BTreeSet<Tuple>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = 1u64 << n_vars;
    let mut out = Vec::new();
    while out.len() < count {
        let size = (1..space).choose(&mut rng).unwrap_or(1);
        let f: BTreeSet<Tuple> = (0..space).choose_multiple(&mut rng, size as usize).into_iter().collect();
        if !f.is_empty() && (f.len() as u64) < space && !out.contains(&f) {
            out.push(f);
        }
    }
    out
}

#[test]
fn enlarging_bounds_never_decreases_gap() {
    let pl = Placement::new(complete_bipartite(2, 2), vec![0, 2]).unwrap();
    let tight = ParameterBounds {
        h_min: -1.0,
        h_max: 1.0,
        j_min: -0.5,
        j_max: 0.5,
    };
    let wide = ParameterBounds::default(); // h in [-2,2], J in [-1,1]
    for f in random_feasible_sets(2, 8, 11) {
        let g_tight = match synthesize_penalty(&pl, &f, &tight) {
            Ok(pm) => pm.gap,
            Err(_) => 0.0,
        };
        let g_wide = synthesize_penalty(&pl, &f, &wide)
            .map(|pm| pm.gap)
            .unwrap_or(0.0);
        assert!(
            g_wide >= g_tight - 1e-6,
            "gap shrank when bounds grew: {g_tight} -> {g_wide} for {f:?}"
        );
    }
}

#[test]
fn every_synthesized_model_passes_verification_at_its_gap() {
    let pl = Placement::new(complete_bipartite(3, 3), vec![0, 1, 2]).unwrap();
    for f in random_feasible_sets(3, 10, 23) {
        if let Ok(pm) = synthesize_penalty(&pl, &f, &ParameterBounds::default()) {
            let report = verify_penalty(&pm, &f, &BTreeSet::new()).unwrap();
            assert!((report.realized_g - pm.gap).abs() <= 1e-6 * (1.0 + pm.gap.abs()));
            assert!(report.min_feasible.abs() <= 1e-6);
            assert!(report.global_min >= -1e-6);
            // Every feasible state has a recorded witness reaching 0.
            for s in &f {
                assert!(pm.report.witnesses.contains_key(s));
            }
        }
    }
}

#[test]
fn explicit_health_variable_matches_implicit_levels() {
    // Implicit: three-level model over n variables. Explicit: reify the
    // health bit and synthesize two-level over n+1 variables. Decoding the
    // health bit of the explicit model's zero-energy states must reproduce
    // the implicit model's 0-vs-e classification.
    let g = complete_bipartite(3, 3);
    // Variables x1, x2, y of an AND gate; faulty = stuck-at-0 output.
    let f1: BTreeSet<Tuple> = [0b000u64, 0b001, 0b010, 0b111].into_iter().collect();
    let f2: BTreeSet<Tuple> = [0b011u64].into_iter().collect();

    let pl_implicit = Placement::new(g.clone(), vec![0, 1, 2]).unwrap();
    let implicit =
        synthesize_faulty_penalty(&pl_implicit, &f1, &f2, 1.0, &ParameterBounds::default())
            .unwrap();
    let report = verify_penalty(&implicit, &f1, &f2).unwrap();

    let reified = reify(&f1, &f2, 3).unwrap();
    let pl_explicit = Placement::new(g, vec![0, 1, 2, 3]).unwrap();
    let explicit =
        synthesize_penalty(&pl_explicit, &reified, &ParameterBounds::default()).unwrap();

    // Classification per variable state (x1, x2, y): healthy iff the
    // explicit model admits health = +1 at energy 0, which reify encodes as
    // bit 3 set; the implicit model classifies by level 0 vs e.
    for s in 0u64..8 {
        let healthy_explicit = explicit.report.witnesses.contains_key(&(s | 0b1000));
        let faulty_explicit = explicit.report.witnesses.contains_key(&s);
        let healthy_implicit = f1.contains(&s);
        let faulty_implicit = f2.contains(&s);
        assert_eq!(healthy_explicit, healthy_implicit, "state {s:03b}");
        assert_eq!(faulty_explicit, faulty_implicit, "state {s:03b}");
    }
    // The implicit model's fault level sits strictly between the ground
    // level and the infeasible floor.
    let e = report.realized_e.unwrap();
    assert!(e > 0.0 && e <= report.realized_g + 1e-6);
}

#[test]
fn library_cache_hits_and_roundtrips() {
    let pl = Placement::new(complete_bipartite(2, 2), vec![0, 2]).unwrap();
    let f: BTreeSet<Tuple> = [0b01u64, 0b10].into_iter().collect();
    let bounds = ParameterBounds::default();

    let mut lib = PenaltyLibrary::new();
    let first = lib.get_or_synthesize(&pl, &f, &bounds).unwrap().clone();
    assert_eq!(lib.len(), 1);
    let second = lib.get_or_synthesize(&pl, &f, &bounds).unwrap().clone();
    assert_eq!(lib.len(), 1, "second lookup must hit the cache");
    assert_eq!(first.model, second.model);

    // Distinct bounds are distinct entries.
    let tight = ParameterBounds {
        h_min: -1.0,
        h_max: 1.0,
        j_min: -1.0,
        j_max: 1.0,
    };
    lib.get_or_synthesize(&pl, &f, &tight).unwrap();
    assert_eq!(lib.len(), 2);

    // Save, load, and confirm the entry survives with its certificate.
    let dir = std::env::temp_dir().join("penalty-lib-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("library.txt");
    lib.save(&path).unwrap();
    let loaded = PenaltyLibrary::load(&path).unwrap();
    assert_eq!(loaded.len(), 2);
    let levels: std::collections::BTreeMap<Tuple, f64> =
        f.iter().map(|&t| (t, 0.0)).collect();
    let key = signature_key(&pl, &levels, None, &bounds);
    let cached = loaded.get(&key).expect("entry present after reload");
    assert_eq!(cached.model, first.model);
    assert_eq!(cached.gap, first.gap);
    std::fs::remove_file(&path).ok();
}

#[test]
fn unrepresentable_constraint_reports_an_error() {
    // Parity of three variables on a path with no usable ancilla cannot
    // be separated: a 3-variable XOR needs either higher connectivity or
    // ancillas.
    let mut g = SimpleGraph::new(3);
    g.add_edge(0, 1).unwrap();
    g.add_edge(1, 2).unwrap();
    let pl = Placement::new(g, vec![0, 1, 2]).unwrap();
    let odd: BTreeSet<Tuple> = (0..8).filter(|t: &u64| t.count_ones() % 2 == 1).collect();
    let err = synthesize_penalty(&pl, &odd, &ParameterBounds::default());
    assert!(
        matches!(err, Err(penalty_synth::PenaltyError::NotRepresentable { .. })),
        "expected NotRepresentable, got {err:?}"
    );
}
