use ising_core::IsingModel;
use samplers::{exact_boltzmann_marginals, sa_sample, Schedule};

use crate::error::DecompError;
use crate::oracle::OracleCtx;
use crate::seed_mix;

/// A source of single-variable Boltzmann marginals for a region's (possibly
/// bias-corrected) energy at temperature `t`.
///
/// The result has one `[p(-1), p(+1)]` pair per model variable.
/// Implementations must be deterministic functions of their inputs and `ctx`.
pub trait RegionSampler: Sync {
    fn marginals(
        &self,
        model: &IsingModel<f64>,
        t: f64,
        ctx: OracleCtx,
    ) -> Result<Vec<[f64; 2]>, DecompError>;
}

/// Exact marginals by weighted model counting.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactSampler;

impl RegionSampler for ExactSampler {
    fn marginals(
        &self,
        model: &IsingModel<f64>,
        t: f64,
        _ctx: OracleCtx,
    ) -> Result<Vec<[f64; 2]>, DecompError> {
        Ok(exact_boltzmann_marginals(model, t, None)?.unary)
    }
}

/// Empirical marginals from annealed samples, standing in for reads from
/// analogue hardware. The anneal ends at the target inverse temperature, so
/// the sample frequencies approximate the Boltzmann weights at `t` up to
/// sampling noise of order `1/sqrt(reads)`.
#[derive(Debug, Clone)]
pub struct SaSampler {
    pub reads: usize,
    /// Sweeps per read.
    pub sweeps: usize,
    /// The anneal starts this factor hotter than the target temperature.
    pub warm_ratio: f64,
    pub seed: u64,
}

impl SaSampler {
    pub fn new(reads: usize, seed: u64) -> Self {
        SaSampler { reads, sweeps: 200, warm_ratio: 50.0, seed }
    }
}

impl RegionSampler for SaSampler {
    fn marginals(
        &self,
        model: &IsingModel<f64>,
        t: f64,
        ctx: OracleCtx,
    ) -> Result<Vec<[f64; 2]>, DecompError> {
        if !(t.is_finite() && t > 0.0) {
            return Err(DecompError::BadInput(format!("temperature must be positive, got {t}")));
        }
        if !(self.warm_ratio.is_finite() && self.warm_ratio >= 1.0) {
            return Err(DecompError::BadInput(format!(
                "warm ratio must be at least 1, got {}",
                self.warm_ratio
            )));
        }
        let beta_end = 1.0 / t;
        let schedule = Schedule::geometric(self.sweeps, beta_end / self.warm_ratio, beta_end)?;
        let seed = seed_mix(self.seed, ctx.iteration as u64, ctx.region as u64);
        let set = sa_sample(model, &schedule, self.reads, seed)?;
        let mut up = vec![0.0f64; model.num_vars()];
        let mut total = 0.0f64;
        for row in &set.rows {
            let w = row.multiplicity as f64;
            total += w;
            for (i, &s) in row.config.iter().enumerate() {
                if s > 0 {
                    up[i] += w;
                }
            }
        }
        if total == 0.0 {
            return Err(DecompError::BadInput("sampler returned no reads".into()));
        }
        Ok(up.into_iter().map(|u| [1.0 - u / total, u / total]).collect())
    }
}
