//! Behavioral tests for the annealer: ground-state hit rates on easy
//! instances, symmetry on unbiased models, seed determinism (including the
//! read-prefix property), sample validity, and gauge transforms.

use ising_core::IsingModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use samplers::{exact_ground_states, sa_configs, sa_sample, sa_sample_gauged, Schedule};

fn random_model(n: usize, seed: u64) -> IsingModel<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = IsingModel::new(n);
    for i in 0..n as u32 {
        m.set_h(i, rng.random_range(-1.0..1.0)).unwrap();
    }
    for i in 0..n as u32 {
        for j in i + 1..n as u32 {
            if rng.random_bool(0.4) {
                m.set_j(i, j, rng.random_range(-1.0..1.0)).unwrap();
            }
        }
    }
    m
}

#[test]
fn ferromagnetic_pair_lands_in_the_ground_states() {
    let mut model = IsingModel::new(2);
    model.set_j(0, 1, -1.0).unwrap();
    let exact = exact_ground_states(&model, None).unwrap();
    assert_eq!(exact.min_energy, -1.0);
    assert_eq!(exact.states.len(), 2);

    let schedule = Schedule::default_for(&model);
    let samples = sa_sample(&model, &schedule, 1000, 42).unwrap();
    assert_eq!(samples.total_reads(), 1000);
    let ground = samples.fraction_at(exact.min_energy, 1e-9);
    assert!(
        ground >= 0.99,
        "ground-state fraction {ground} below 0.99 on a two-spin instance"
    );
    // Both symmetric ground states occur.
    let hit: Vec<_> = samples
        .rows
        .iter()
        .filter(|r| (r.energy - exact.min_energy).abs() < 1e-9)
        .map(|r| r.config.clone())
        .collect();
    assert!(hit.contains(&vec![1, 1]) && hit.contains(&vec![-1, -1]));
}

#[test]
fn unbiased_model_shows_no_spin_preference() {
    // No fields, no couplings: every configuration is equally likely.
    let model = IsingModel::new(5);
    let schedule = Schedule::constant(1, 1.0).unwrap();
    let samples = sa_sample(&model, &schedule, 10_000, 7).unwrap();
    assert_eq!(samples.total_reads(), 10_000);
    let mut sums = [0i64; 5];
    for row in &samples.rows {
        for (k, &s) in row.config.iter().enumerate() {
            sums[k] += s as i64 * row.multiplicity as i64;
        }
    }
    for (k, &s) in sums.iter().enumerate() {
        let mean = s as f64 / 10_000.0;
        assert!(
            mean.abs() <= 0.05,
            "variable {k}: mean magnetization {mean} on an unbiased model"
        );
    }
}

#[test]
fn sampling_is_deterministic_in_the_seed() {
    let model = random_model(8, 11);
    let schedule = Schedule::geometric(50, 0.2, 4.0).unwrap();
    let a = sa_sample(&model, &schedule, 64, 5).unwrap();
    let b = sa_sample(&model, &schedule, 64, 5).unwrap();
    assert_eq!(a, b);

    // Reads are independent streams: a shorter run is a prefix of a longer.
    let three = sa_configs(&model, &schedule, 3, 5).unwrap();
    let five = sa_configs(&model, &schedule, 5, 5).unwrap();
    assert_eq!(three[..], five[..3]);

    let c = sa_sample(&model, &schedule, 64, 6).unwrap();
    assert_ne!(a.rows, c.rows, "different seeds produced identical samples");
}

#[test]
fn samples_are_valid_for_their_model() {
    let model = random_model(12, 23);
    let schedule = Schedule::default_for(&model);
    let samples = sa_sample(&model, &schedule, 100, 9).unwrap();
    samples.validate(&model).unwrap();
    assert_eq!(samples.meta.seed, 9);
    assert_eq!(samples.meta.schedule, schedule.describe());
    assert!(samples.meta.gauge.is_none());
    // Aggregation accounting: multiplicities sum to the read count.
    assert_eq!(samples.total_reads(), 100);
    assert!(samples.min_energy().is_some());
}

#[test]
fn gauge_transform_reports_original_energies() {
    let mut model = IsingModel::new(3);
    model.set_h(0, 1.5).unwrap();
    model.set_h(1, -0.5).unwrap();
    model.set_j(0, 1, -1.0).unwrap();
    model.set_j(1, 2, 2.0).unwrap();
    let schedule = Schedule::default_for(&model);

    let flip = [true, false, true];
    let gauged = sa_sample_gauged(&model, &schedule, 200, 3, &flip).unwrap();
    // Energies must be those of the untransformed model.
    gauged.validate(&model).unwrap();
    assert_eq!(gauged.meta.gauge.as_deref(), Some(&flip[..]));
    assert_eq!(gauged.total_reads(), 200);

    // The identity mask reproduces plain sampling row-for-row.
    let plain = sa_sample(&model, &schedule, 200, 3).unwrap();
    let identity = sa_sample_gauged(&model, &schedule, 200, 3, &[false; 3]).unwrap();
    assert_eq!(plain.rows, identity.rows);
}
