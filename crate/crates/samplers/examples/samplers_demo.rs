//! End-to-end drive of the samplers public API: exact ground states and
//! Boltzmann marginals of a frustrated ring, annealing with seeded reads,
//! chain decoding, greedy descent, and the samples-to-solution statistic —
//! plus one penalty synthesis to show the exact coefficient grid.

use std::collections::{BTreeMap, BTreeSet};

use ising_core::{IsingModel, ParameterBounds, SimpleGraph};
use penalty_synth::{synthesize_penalty, Placement};
use samplers::{
    exact_boltzmann_marginals, exact_ground_states, greedy_descent_ising, majority_vote_decode,
    sa_sample, st99, ChainMap, EliminationOrder, Schedule,
};

fn main() {
    // A frustrated 8-spin ring: odd number of antiferromagnetic bonds.
    let mut model = IsingModel::new(8);
    for i in 0..8u32 {
        let j = if i == 0 { 1.0 } else { -1.0 };
        model.set_j(i, (i + 1) % 8, j).unwrap();
    }
    model.set_h(3, 0.25).unwrap();

    let order = EliminationOrder::min_fill(&model);
    println!("elimination width {}", order.width());

    let gs = exact_ground_states(&model, Some(&order)).unwrap();
    println!(
        "exact: min energy {} with {} ground states",
        gs.min_energy,
        gs.states.len()
    );

    let mg = exact_boltzmann_marginals(&model, 1.0, None).unwrap();
    println!("boltzmann at T=1: logZ {:.6}", mg.log_z);
    println!("  P[z3=+1] = {:.6}", mg.unary[3][1]);

    let schedule = Schedule::default_for(&model);
    println!("schedule: {}", schedule.describe());
    let samples = sa_sample(&model, &schedule, 500, 42).unwrap();
    let hit = samples.fraction_at(gs.min_energy, 1e-9);
    println!(
        "annealer: {} reads, ground fraction {:.3}, st99 {:.1}",
        samples.total_reads(),
        hit,
        st99(hit).unwrap()
    );

    // Descent repairs an excited read into a local optimum.
    let worst = &samples.rows.last().unwrap().config;
    let repaired = greedy_descent_ising(&model, worst).unwrap();
    println!(
        "descent: {} -> {}",
        model.energy(worst).unwrap(),
        model.energy(&repaired).unwrap()
    );

    // Majority-vote decoding of a 2-chain toy: physical pairs (0,1), (2,3).
    let mut physical = IsingModel::new(4);
    physical.set_j(0, 1, -1.0).unwrap();
    physical.set_j(2, 3, -1.0).unwrap();
    physical.set_j(1, 2, 1.0).unwrap();
    let chains: ChainMap = BTreeMap::from([
        (0, BTreeSet::from([0, 1])),
        (1, BTreeSet::from([2, 3])),
    ]);
    let mut logical = IsingModel::new(2);
    logical.set_j(0, 1, 1.0).unwrap();
    let phys_samples = sa_sample(&physical, &Schedule::default_for(&physical), 200, 7).unwrap();
    let (decoded, stats) = majority_vote_decode(&phys_samples, &chains, &logical, 7).unwrap();
    println!(
        "decode: {} logical rows, broken fraction {:.3}, ties {}",
        decoded.rows.len(),
        stats.broken_fraction,
        stats.ties
    );

    // One penalty synthesis: three-variable parity on a bipartite cell.
    let mut g = SimpleGraph::new(6);
    for a in 0..3 {
        for b in 3..6 {
            g.add_edge(a, b).unwrap();
        }
    }
    let placement = Placement::new(g, vec![0, 1, 2]).unwrap();
    let feasible: BTreeSet<u64> = (0u64..8).filter(|t| t.count_ones() % 2 == 1).collect();
    let penalty = synthesize_penalty(&placement, &feasible, &ParameterBounds::default()).unwrap();
    println!("parity penalty: gap {}, offset {}", penalty.gap, penalty.model.offset());
}
