use ising_core::Spin;
use samplers::{exact_ground_states, greedy_descent_ising, sa_sample, Schedule};

use crate::error::DecompError;
use crate::region::RegionGraph;
use crate::seed_mix;

/// Where in the outer iteration an oracle call happens. Oracles derive any
/// randomness from this, so a parallel sweep over regions gives the same
/// answers in any execution order.
#[derive(Debug, Clone, Copy)]
pub struct OracleCtx {
    pub iteration: usize,
    pub region: usize,
}

/// A minimizer for one region's energy plus a linear tilt.
///
/// `bias` is indexed by scope position: the oracle minimizes
/// `E_R(z) + sum_k bias[k] * z[k]` over the region's variables and returns
/// one minimizing configuration (scope order). Implementations must be
/// deterministic functions of their inputs and `ctx`.
pub trait RegionOracle: Sync {
    fn minimize(
        &self,
        rg: &RegionGraph,
        bias: &[f64],
        ctx: OracleCtx,
    ) -> Result<Vec<Spin>, DecompError>;
}

fn check_bias(rg: &RegionGraph, bias: &[f64], ctx: OracleCtx) -> Result<(), DecompError> {
    let region = &rg.regions()[ctx.region];
    if bias.len() != region.scope.len() {
        return Err(DecompError::BadInput(format!(
            "bias has {} entries for a region of {} variables",
            bias.len(),
            region.scope.len()
        )));
    }
    if bias.iter().any(|b| !b.is_finite()) {
        return Err(DecompError::BadInput("bias entries must be finite".into()));
    }
    Ok(())
}

/// Exhaustive minimization of the region's energy model.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactOracle;

impl RegionOracle for ExactOracle {
    fn minimize(
        &self,
        rg: &RegionGraph,
        bias: &[f64],
        ctx: OracleCtx,
    ) -> Result<Vec<Spin>, DecompError> {
        check_bias(rg, bias, ctx)?;
        let region = &rg.regions()[ctx.region];
        let mut model = region.model.clone();
        for (k, &b) in bias.iter().enumerate() {
            model.add_h(k as u32, b)?;
        }
        let ground = exact_ground_states(&model, None)?;
        // Ties break to the lexicographically smallest configuration; the
        // enumeration order is deterministic even when truncated.
        ground
            .states
            .into_iter()
            .min()
            .ok_or_else(|| DecompError::Oracle {
                region: ctx.region,
                reason: "no ground state returned".into(),
            })
    }
}

/// Annealing-based minimization: the best of `reads` annealed samples,
/// polished by greedy descent.
#[derive(Debug, Clone)]
pub struct SaOracle {
    /// Annealing schedule; defaults to one fitted to the region's model.
    pub schedule: Option<Schedule>,
    pub reads: usize,
    pub seed: u64,
}

impl SaOracle {
    pub fn new(reads: usize, seed: u64) -> Self {
        SaOracle { schedule: None, reads, seed }
    }
}

impl RegionOracle for SaOracle {
    fn minimize(
        &self,
        rg: &RegionGraph,
        bias: &[f64],
        ctx: OracleCtx,
    ) -> Result<Vec<Spin>, DecompError> {
        check_bias(rg, bias, ctx)?;
        let region = &rg.regions()[ctx.region];
        let mut model = region.model.clone();
        for (k, &b) in bias.iter().enumerate() {
            model.add_h(k as u32, b)?;
        }
        let schedule = match &self.schedule {
            Some(s) => s.clone(),
            None => Schedule::default_for(&model),
        };
        let seed = seed_mix(self.seed, ctx.iteration as u64, ctx.region as u64);
        let set = sa_sample(&model, &schedule, self.reads, seed)?;
        let best = set.rows.first().ok_or_else(|| DecompError::Oracle {
            region: ctx.region,
            reason: "no samples returned".into(),
        })?;
        Ok(greedy_descent_ising(&model, &best.config)?)
    }
}

/// Exhaustive minimization directly on the attached constraint problem,
/// bypassing penalty models: infeasible assignments are ranked by violation
/// count first, then by `fault_level` per fault mode plus the linear tilt.
#[derive(Debug, Clone, Copy)]
pub struct CspOracle {
    /// Energy charged per constraint resolved by a fault mode.
    pub fault_level: f64,
}

impl Default for CspOracle {
    fn default() -> Self {
        CspOracle { fault_level: 1.0 }
    }
}

const CSP_ENUM_LIMIT: usize = 24;

impl RegionOracle for CspOracle {
    fn minimize(
        &self,
        rg: &RegionGraph,
        bias: &[f64],
        ctx: OracleCtx,
    ) -> Result<Vec<Spin>, DecompError> {
        check_bias(rg, bias, ctx)?;
        let csp = rg.csp().ok_or_else(|| DecompError::Oracle {
            region: ctx.region,
            reason: "no constraint problem attached to the region graph".into(),
        })?;
        let region = &rg.regions()[ctx.region];
        let k = region.scope.len();
        if k > CSP_ENUM_LIMIT {
            return Err(DecompError::Oracle {
                region: ctx.region,
                reason: format!("{k} variables is too many for exhaustive search"),
            });
        }
        let mut scratch: Vec<Spin> = vec![1; rg.num_vars()];
        let mut best: Option<(usize, f64, Vec<Spin>)> = None;
        for tuple in 0u64..(1u64 << k) {
            let z = ising_core::bits_to_spins(tuple, k);
            for (pos, &v) in region.scope.iter().enumerate() {
                scratch[v as usize] = z[pos];
            }
            let mut violations = 0usize;
            let mut faults = 0usize;
            for &ci in &region.constraints {
                let c = &csp.constraints[ci];
                if c.is_satisfied(&scratch) {
                    continue;
                }
                if c.is_faulty(&scratch) {
                    faults += 1;
                } else {
                    violations += 1;
                }
            }
            let tilt: f64 = bias.iter().zip(&z).map(|(b, &s)| b * f64::from(s)).sum();
            let score = self.fault_level * faults as f64 + tilt;
            let better = match &best {
                None => true,
                Some((bv, bs, _)) => violations < *bv || (violations == *bv && score < *bs),
            };
            if better {
                best = Some((violations, score, z));
            }
        }
        Ok(best.expect("at least one tuple was scored").2)
    }
}
