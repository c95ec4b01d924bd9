//! Post-processing of hardware-level samples: majority-vote chain repair,
//! greedy single-flip descent (Ising and constraint-space), and the ST99
//! samples-to-solution statistic.

use std::collections::{BTreeMap, BTreeSet};

use ising_core::{Csp, IsingModel, Spin, SpinConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SamplerError;
use crate::sampleset::{SampleMeta, SampleSet};

/// Chains of an embedding: logical variable → its hardware vertices.
pub type ChainMap = BTreeMap<u32, BTreeSet<u32>>;

/// What majority-vote decoding observed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeStats {
    /// Fraction of (read, chain) pairs whose chain spins disagreed.
    pub broken_fraction: f64,
    /// Number of exact ties resolved by the seeded coin, weighted by reads.
    pub ties: u64,
    /// Chains decoded per read.
    pub chains: usize,
}

/// Decode physical samples to logical ones: each chain votes by the sign of
/// its spin sum; an exact tie falls to a deterministic coin drawn from
/// `seed` and the row's position (ascending variable order within a row).
/// Logical energies are recomputed under `logical`. The total read count is
/// preserved (equal decoded configurations merge).
pub fn majority_vote_decode(
    samples: &SampleSet,
    chains: &ChainMap,
    logical: &IsingModel<f64>,
    seed: u64,
) -> Result<(SampleSet, DecodeStats), SamplerError> {
    let n = logical.num_vars();
    for v in 0..n as u32 {
        match chains.get(&v) {
            None => {
                return Err(SamplerError::BadChains(format!(
                    "logical variable {v} has no chain"
                )))
            }
            Some(c) if c.is_empty() => {
                return Err(SamplerError::BadChains(format!(
                    "logical variable {v} has an empty chain"
                )))
            }
            _ => {}
        }
    }
    if let Some((&v, _)) = chains.iter().find(|&(&v, _)| v as usize >= n) {
        return Err(SamplerError::BadChains(format!(
            "chain variable {v} outside the logical model ({n} variables)"
        )));
    }

    let mut decoded: Vec<(SpinConfig, u64)> = Vec::with_capacity(samples.rows.len());
    let mut broken_pairs: u64 = 0;
    let mut ties: u64 = 0;
    for (ri, row) in samples.rows.iter().enumerate() {
        let mut rng: Option<ChaCha8Rng> = None;
        let mut logical_config: SpinConfig = Vec::with_capacity(n);
        for v in 0..n as u32 {
            let chain = &chains[&v];
            let mut sum: i64 = 0;
            let mut first: Option<Spin> = None;
            let mut broken = false;
            for &q in chain {
                let s = *row.config.get(q as usize).ok_or_else(|| {
                    SamplerError::BadChains(format!(
                        "chain vertex {q} outside sampled configuration of length {}",
                        row.config.len()
                    ))
                })?;
                sum += s as i64;
                match first {
                    None => first = Some(s),
                    Some(f) if f != s => broken = true,
                    _ => {}
                }
            }
            if broken {
                broken_pairs += row.multiplicity;
            }
            let spin = match sum.cmp(&0) {
                std::cmp::Ordering::Greater => 1,
                std::cmp::Ordering::Less => -1,
                std::cmp::Ordering::Equal => {
                    ties += row.multiplicity;
                    let r = rng.get_or_insert_with(|| {
                        let mut r = ChaCha8Rng::seed_from_u64(seed);
                        r.set_stream(ri as u64);
                        r
                    });
                    if r.random::<bool>() {
                        1
                    } else {
                        -1
                    }
                }
            };
            logical_config.push(spin);
        }
        decoded.push((logical_config, row.multiplicity));
    }

    let reads = samples.total_reads();
    let stats = DecodeStats {
        broken_fraction: if reads == 0 || chains.is_empty() {
            0.0
        } else {
            broken_pairs as f64 / (reads as f64 * chains.len() as f64)
        },
        ties,
        chains: chains.len(),
    };
    let set = SampleSet::from_weighted_configs(
        logical,
        decoded,
        SampleMeta {
            seed,
            schedule: samples.meta.schedule.clone(),
            gauge: None,
        },
    )?;
    Ok((set, stats))
}

/// Greedy single-flip descent on an Ising energy: repeatedly flip the
/// variable with the largest strict energy decrease (ties to the smallest
/// id) until no flip improves. The energy never increases.
pub fn greedy_descent_ising(
    model: &IsingModel<f64>,
    start: &[Spin],
) -> Result<SpinConfig, SamplerError> {
    let n = model.num_vars();
    if start.len() != n {
        return Err(SamplerError::InvalidParam(format!(
            "assignment length {} for {n} variables",
            start.len()
        )));
    }
    let mut z: SpinConfig = start.to_vec();
    loop {
        let mut best: Option<(f64, usize)> = None;
        for i in 0..n {
            let delta = model.flip_delta(&z, i as u32)?;
            if delta < 0.0 && best.is_none_or(|(d, _)| delta < d) {
                best = Some((delta, i));
            }
        }
        match best {
            Some((_, i)) => z[i] = -z[i],
            None => return Ok(z),
        }
    }
}

/// Lexicographic constraint-space cost: hard violations (assignments outside
/// feasible ∪ fault modes) first, then the number of constraints realizing a
/// fault mode. For constraints without fault modes this is plain
/// unsatisfied-count descent.
fn csp_cost(csp: &Csp, z: &[Spin]) -> (usize, usize) {
    (csp.violations(z), csp.faulty_constraints(z).len())
}

/// Greedy single-flip descent in constraint space: repeatedly flip the
/// variable giving the lexicographically largest decrease of
/// (violations, fault count); stop at a local minimum. Never increases the
/// cost.
pub fn greedy_descent_csp(csp: &Csp, start: &[Spin]) -> Result<SpinConfig, SamplerError> {
    if start.len() != csp.num_vars {
        return Err(SamplerError::InvalidParam(format!(
            "assignment length {} for {} variables",
            start.len(),
            csp.num_vars
        )));
    }
    let mut z: SpinConfig = start.to_vec();
    let mut cost = csp_cost(csp, &z);
    loop {
        let mut best: Option<((usize, usize), usize)> = None;
        for i in 0..z.len() {
            z[i] = -z[i];
            let c = csp_cost(csp, &z);
            z[i] = -z[i];
            if c < cost && best.is_none_or(|(bc, _)| c < bc) {
                best = Some((c, i));
            }
        }
        match best {
            Some((c, i)) => {
                z[i] = -z[i];
                cost = c;
            }
            None => return Ok(z),
        }
    }
}

/// Expected number of samples for 99% success probability given a
/// per-sample success fraction `p`: log(1 − 0.99) / log(1 − p), with
/// `p = 1` answering 1. `p` outside (0, 1] is an error.
pub fn st99(p: f64) -> Result<f64, SamplerError> {
    if p.is_nan() || p <= 0.0 || p > 1.0 {
        return Err(SamplerError::InvalidParam(format!(
            "success fraction must lie in (0, 1], got {p}"
        )));
    }
    if p == 1.0 {
        return Ok(1.0);
    }
    Ok((0.01f64).ln() / (1.0 - p).ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn st99_matches_closed_form() {
        assert_eq!(st99(1.0).unwrap(), 1.0);
        assert!((st99(0.5).unwrap() - 6.6439).abs() < 1e-3);
        assert!((st99(0.01).unwrap() - 458.21).abs() < 1e-1);
        assert!(st99(0.0).is_err());
        assert!(st99(-0.2).is_err());
        assert!(st99(1.5).is_err());
        assert!(st99(f64::NAN).is_err());
    }

    #[test]
    fn descent_monotone_on_ferromagnetic_pair() {
        let mut m = IsingModel::new(2);
        m.set_j(0, 1, -1.0).unwrap();
        // Already a ground state: unchanged.
        assert_eq!(greedy_descent_ising(&m, &[1, 1]).unwrap(), vec![1, 1]);
        // Misaligned: one flip fixes it.
        let z = greedy_descent_ising(&m, &[1, -1]).unwrap();
        assert_eq!(m.energy(&z).unwrap(), -1.0);
    }
}
