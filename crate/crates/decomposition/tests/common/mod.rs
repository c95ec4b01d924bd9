//! Shared instance generators for the decomposition tests.

use std::collections::BTreeSet;

use decomposition::{RegionGraph, RegionSpec};
use ising_core::{spins_to_bits, Constraint, Csp, IsingModel, Spin};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// A random Ising model whose couplings form a tree, split into two regions
/// that overlap on exactly one variable (the endpoint of a removed edge's
/// child side). On such instances message passing is exact, so the joint
/// model is returned alongside for ground-truth checks.
pub fn two_region_tree(n: usize, seed: u64) -> (RegionGraph, IsingModel<f64>) {
    assert!(n >= 3, "need at least three variables to split a tree");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parent = vec![0usize; n];
    for (i, p) in parent.iter_mut().enumerate().skip(1) {
        *p = rng.random_range(0..i);
    }
    let h: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let j: Vec<f64> = (0..n)
        .map(|_| {
            let mag = rng.random_range(0.5..1.5);
            if rng.random_bool(0.5) {
                mag
            } else {
                -mag
            }
        })
        .collect();

    let mut joint = IsingModel::new(n);
    for i in 0..n {
        joint.add_h(i as u32, h[i]).unwrap();
    }
    for i in 1..n {
        joint.add_j(parent[i] as u32, i as u32, j[i]).unwrap();
    }

    // Cut one edge (parent[c], c): component membership by walking to the
    // root and checking whether the path crosses c.
    let cut = rng.random_range(1..n);
    let below = |mut x: usize| -> bool {
        loop {
            if x == cut {
                return true;
            }
            if x == 0 {
                return false;
            }
            x = parent[x];
        }
    };
    let comp_b: BTreeSet<usize> = (0..n).filter(|&x| below(x)).collect();
    let mut scope_a: Vec<u32> = (0..n).filter(|x| !comp_b.contains(x)).map(|x| x as u32).collect();
    scope_a.push(cut as u32);
    scope_a.sort_unstable();
    let scope_b: Vec<u32> = comp_b.iter().map(|&x| x as u32).collect();

    let build = |scope: &[u32], own_h: &dyn Fn(usize) -> bool, own_edge: &dyn Fn(usize) -> bool| {
        let mut m = IsingModel::new(scope.len());
        let local = |g: usize| scope.binary_search(&(g as u32)).unwrap() as u32;
        for i in 0..n {
            if own_h(i) {
                m.add_h(local(i), h[i]).unwrap();
            }
        }
        for c in 1..n {
            if own_edge(c) {
                m.add_j(local(parent[c]), local(c), j[c]).unwrap();
            }
        }
        m
    };
    // Region A keeps the cut edge and everything outside comp_b; the shared
    // variable's field goes to region B.
    let model_a = build(
        &scope_a,
        &|i| !comp_b.contains(&i),
        &|c| c == cut || (!comp_b.contains(&c) && !comp_b.contains(&parent[c])),
    );
    let model_b = build(
        &scope_b,
        &|i| comp_b.contains(&i),
        &|c| c != cut && comp_b.contains(&c) && comp_b.contains(&parent[c]),
    );

    let rg = RegionGraph::new(
        n,
        vec![
            RegionSpec { constraints: vec![], scope: scope_a, model: model_a, gap: 1.0 },
            RegionSpec { constraints: vec![], scope: scope_b, model: model_b, gap: 1.0 },
        ],
        None,
    )
    .unwrap();
    (rg, joint)
}

/// A satisfiable 20-variable constraint problem split into three regions
/// that overlap pairwise on two variables, with zero energy models (for
/// oracles that work on the constraints directly).
pub fn random_planted_csp(seed: u64) -> (Csp, RegionGraph) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let planted: Vec<Spin> = (0..20).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();
    let blocks: [std::ops::Range<u32>; 3] = [0..8, 6..14, 12..20];

    let mut constraints = Vec::new();
    let mut owners: Vec<Vec<usize>> = vec![Vec::new(); 3];
    for (b, block) in blocks.iter().enumerate() {
        for _ in 0..5 {
            let mut scope: BTreeSet<u32> = BTreeSet::new();
            while scope.len() < 3 {
                scope.insert(rng.random_range(block.clone()));
            }
            let scope: Vec<u32> = scope.into_iter().collect();
            let planted_tuple = {
                let z: Vec<Spin> = scope.iter().map(|&v| planted[v as usize]).collect();
                spins_to_bits(&z)
            };
            let mut feasible: BTreeSet<u64> = BTreeSet::new();
            feasible.insert(planted_tuple);
            for t in 0u64..8 {
                if t != planted_tuple && rng.random_bool(0.45) {
                    feasible.insert(t);
                }
            }
            owners[b].push(constraints.len());
            constraints.push(Constraint::new(scope, feasible).unwrap());
        }
    }
    let csp = Csp::new(20, constraints).unwrap();

    let specs = blocks
        .iter()
        .zip(&owners)
        .map(|(block, owned)| {
            let scope: Vec<u32> = block.clone().collect();
            RegionSpec {
                constraints: owned.clone(),
                model: IsingModel::new(scope.len()),
                scope,
                gap: 1.0,
            }
        })
        .collect();
    let rg = RegionGraph::new(20, specs, Some(csp.clone())).unwrap();
    assert!(csp.is_satisfied(&planted), "the planted assignment must satisfy the instance");
    (csp, rg)
}
