//! Simulated annealing by single-spin Metropolis sweeps under a geometric
//! inverse-temperature ramp. Every read is an independent anneal seeded by
//! (seed, read index), so adding reads never perturbs earlier ones.

use ising_core::{IsingModel, SpinConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::SamplerError;
use crate::sampleset::{SampleMeta, SampleSet};

/// An inverse-temperature ramp: β moves geometrically from `beta_start` to
/// `beta_end` over `sweeps` full passes. Equal endpoints give a
/// fixed-temperature (equilibrium) sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    sweeps: usize,
    beta_start: f64,
    beta_end: f64,
}

impl Schedule {
    pub fn geometric(sweeps: usize, beta_start: f64, beta_end: f64) -> Result<Self, SamplerError> {
        if sweeps == 0 {
            return Err(SamplerError::InvalidParam("schedule needs ≥ 1 sweep".into()));
        }
        for b in [beta_start, beta_end] {
            if !b.is_finite() || b <= 0.0 {
                return Err(SamplerError::InvalidParam(format!(
                    "inverse temperature must be positive and finite, got {b}"
                )));
            }
        }
        Ok(Schedule { sweeps, beta_start, beta_end })
    }

    /// Fixed inverse temperature for all sweeps.
    pub fn constant(sweeps: usize, beta: f64) -> Result<Self, SamplerError> {
        Schedule::geometric(sweeps, beta, beta)
    }

    /// Default anneal for a model: 1000 sweeps, β from 0.1 up to
    /// 10 / ⟨|J|⟩ (mean absolute coupling).
    pub fn default_for(model: &IsingModel<f64>) -> Schedule {
        let end = 10.0 / model.mean_abs_coupling();
        Schedule {
            sweeps: 1000,
            beta_start: 0.1,
            beta_end: end.max(f64::MIN_POSITIVE),
        }
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn beta_start(&self) -> f64 {
        self.beta_start
    }

    pub fn beta_end(&self) -> f64 {
        self.beta_end
    }

    /// β for sweep `t` (0-based); the last sweep runs exactly at `beta_end`.
    pub fn beta_at(&self, t: usize) -> f64 {
        if self.sweeps <= 1 {
            return self.beta_end;
        }
        let frac = t as f64 / (self.sweeps - 1) as f64;
        self.beta_start * (self.beta_end / self.beta_start).powf(frac)
    }

    /// One-line description for sample metadata.
    pub fn describe(&self) -> String {
        format!(
            "geometric beta {:?} {:?} sweeps {}",
            self.beta_start, self.beta_end, self.sweeps
        )
    }
}

/// The raw per-read final configurations of a simulated anneal.
/// Read `r` depends only on `(model, schedule, seed, r)`.
pub fn sa_configs(
    model: &IsingModel<f64>,
    schedule: &Schedule,
    num_reads: usize,
    seed: u64,
) -> Result<Vec<SpinConfig>, SamplerError> {
    if num_reads == 0 {
        return Err(SamplerError::InvalidParam("num_reads must be ≥ 1".into()));
    }
    let n = model.num_vars();
    let mut h = vec![0.0f64; n];
    for (i, v) in model.linear() {
        h[i as usize] = v;
    }
    let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for (i, j, v) in model.quadratic() {
        if v != 0.0 {
            adj[i as usize].push((j, v));
            adj[j as usize].push((i, v));
        }
    }

    let mut out = Vec::with_capacity(num_reads);
    for read in 0..num_reads {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(read as u64);
        let mut z: SpinConfig = (0..n)
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        for t in 0..schedule.sweeps() {
            let beta = schedule.beta_at(t);
            for i in 0..n {
                let local: f64 = h[i]
                    + adj[i]
                        .iter()
                        .map(|&(j, v)| v * z[j as usize] as f64)
                        .sum::<f64>();
                let delta = -2.0 * z[i] as f64 * local;
                if delta <= 0.0 || rng.random::<f64>() < (-beta * delta).exp() {
                    z[i] = -z[i];
                }
            }
        }
        out.push(z);
    }
    Ok(out)
}

/// Run `num_reads` independent anneals and aggregate the final
/// configurations (energies recomputed from the model).
pub fn sa_sample(
    model: &IsingModel<f64>,
    schedule: &Schedule,
    num_reads: usize,
    seed: u64,
) -> Result<SampleSet, SamplerError> {
    let configs = sa_configs(model, schedule, num_reads, seed)?;
    SampleSet::from_configs(
        model,
        configs,
        SampleMeta { seed, schedule: schedule.describe(), gauge: None },
    )
}

/// Sample under a spin-reversal transform: anneal the gauged model (h and J
/// sign-flipped per `flip`), then map the configurations back. Energies are
/// those of the *original* model; the mask is recorded in the metadata.
pub fn sa_sample_gauged(
    model: &IsingModel<f64>,
    schedule: &Schedule,
    num_reads: usize,
    seed: u64,
    flip: &[bool],
) -> Result<SampleSet, SamplerError> {
    let gauged = model.spin_reversal(flip)?;
    let configs = sa_configs(&gauged, schedule, num_reads, seed)?;
    let unflipped = configs.into_iter().map(|mut c| {
        for (s, &f) in c.iter_mut().zip(flip) {
            if f {
                *s = -*s;
            }
        }
        c
    });
    SampleSet::from_configs(
        model,
        unflipped,
        SampleMeta {
            seed,
            schedule: schedule.describe(),
            gauge: Some(flip.to_vec()),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_endpoints_are_exact() {
        let s = Schedule::geometric(100, 0.1, 10.0).unwrap();
        assert_eq!(s.beta_at(0), 0.1);
        assert!((s.beta_at(99) - 10.0).abs() < 1e-12);
        let mid = s.beta_at(49);
        assert!(mid > 0.1 && mid < 10.0);
        let c = Schedule::constant(5, 2.0).unwrap();
        for t in 0..5 {
            assert_eq!(c.beta_at(t), 2.0);
        }
    }

    #[test]
    fn schedule_rejects_bad_parameters() {
        assert!(Schedule::geometric(0, 0.1, 1.0).is_err());
        assert!(Schedule::geometric(10, 0.0, 1.0).is_err());
        assert!(Schedule::geometric(10, 0.1, -1.0).is_err());
        assert!(Schedule::geometric(10, 0.1, f64::INFINITY).is_err());
    }

    #[test]
    fn default_schedule_targets_mean_coupling() {
        let mut m = IsingModel::new(2);
        m.set_j(0, 1, -2.0).unwrap();
        let s = Schedule::default_for(&m);
        assert_eq!(s.sweeps(), 1000);
        assert_eq!(s.beta_start(), 0.1);
        assert!((s.beta_end() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn zero_reads_is_an_error() {
        let m = IsingModel::new(1);
        let s = Schedule::constant(1, 1.0).unwrap();
        assert!(sa_sample(&m, &s, 0, 0).is_err());
    }

    #[test]
    fn gauged_sampling_reports_original_energies() {
        let mut m = IsingModel::new(2);
        m.set_j(0, 1, -1.0).unwrap();
        m.set_h(0, 0.5).unwrap();
        let s = Schedule::default_for(&m);
        let flip = vec![true, false];
        let set = sa_sample_gauged(&m, &s, 20, 3, &flip).unwrap();
        set.validate(&m).unwrap();
        assert_eq!(set.meta.gauge, Some(flip));
        assert_eq!(set.total_reads(), 20);
    }
}
