use std::collections::BTreeMap;

use ising_core::bits_to_spins;
use samplers::exact_boltzmann_marginals;

use crate::error::DecompError;
use crate::region::{corrective_energy, RegionGraph};

/// A belief over one region's configurations.
#[derive(Debug, Clone)]
pub enum RegionBelief {
    /// Explicit probabilities, one per configuration of the region's scope
    /// in listing order (bit k of the index is scope position k).
    Table(Vec<f64>),
    /// Factored form: the Boltzmann distribution of the region's energy
    /// corrected by per-variable biases `[V(-1), V(+1)]` on boundary
    /// variables (keyed by global id). This is how message passing
    /// parameterizes its region beliefs, and it stays tractable when the
    /// region is too large to tabulate.
    Corrected { v: BTreeMap<u32, [f64; 2]> },
}

/// Region and single-variable beliefs over a region graph.
#[derive(Debug, Clone)]
pub struct Beliefs {
    /// One belief per region, in region order.
    pub regions: Vec<RegionBelief>,
    /// `[p(-1), p(+1)]` per variable, indexed by global id.
    pub unary: Vec<[f64; 2]>,
}

fn xlnx(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.ln()
    }
}

const TABLE_LIMIT: usize = 20;
const NORM_TOL: f64 = 1e-6;

/// The region-based free energy of `beliefs` at temperature `t`: the sum
/// over regions of average energy plus `t` times negative entropy, with each
/// shared variable's entropy counted once via `(1 - c_i)` single-variable
/// correction terms (`c_i` = number of regions containing variable `i`).
///
/// At the message-passing fixpoint this approximates the true free energy
/// `-t ln Z`, and equals it exactly when the regions form a tree overlapping
/// on single variables.
///
/// Beliefs must be normalized (tolerance 1e-6); tabulated regions must have
/// at most 20 variables.
pub fn regional_bethe_energy(
    rg: &RegionGraph,
    beliefs: &Beliefs,
    t: f64,
) -> Result<f64, DecompError> {
    if !(t.is_finite() && t > 0.0) {
        return Err(DecompError::BadInput(format!("temperature must be positive, got {t}")));
    }
    let regions = rg.regions();
    if beliefs.regions.len() != regions.len() {
        return Err(DecompError::BadInput(format!(
            "{} region beliefs for {} regions",
            beliefs.regions.len(),
            regions.len()
        )));
    }
    if beliefs.unary.len() != rg.num_vars() {
        return Err(DecompError::BadInput(format!(
            "{} single-variable beliefs for {} variables",
            beliefs.unary.len(),
            rg.num_vars()
        )));
    }
    for (i, b) in beliefs.unary.iter().enumerate() {
        if !(b[0].is_finite() && b[1].is_finite()) || b[0] < -1e-12 || b[1] < -1e-12 {
            return Err(DecompError::BadInput(format!("belief for variable {i} is not a distribution")));
        }
        if (b[0] + b[1] - 1.0).abs() > NORM_TOL {
            return Err(DecompError::BadInput(format!("unnormalized belief for variable {i}")));
        }
    }

    let mut total = 0.0f64;
    for (ri, (region, belief)) in regions.iter().zip(&beliefs.regions).enumerate() {
        match belief {
            RegionBelief::Table(tb) => {
                let k = region.scope.len();
                if k > TABLE_LIMIT {
                    return Err(DecompError::BadInput(format!(
                        "region {ri} has {k} variables: too large for a tabulated belief, use the factored form"
                    )));
                }
                if tb.len() != 1usize << k {
                    return Err(DecompError::BadInput(format!(
                        "region {ri}: table has {} entries for {k} variables",
                        tb.len()
                    )));
                }
                let mut sum = 0.0f64;
                for &p in tb {
                    if !p.is_finite() || p < -1e-12 {
                        return Err(DecompError::BadInput(format!(
                            "region {ri}: table entries must be probabilities"
                        )));
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > NORM_TOL {
                    return Err(DecompError::BadInput(format!("unnormalized belief for region {ri}")));
                }
                for (tuple, &p) in tb.iter().enumerate() {
                    if p <= 0.0 {
                        continue;
                    }
                    let z = bits_to_spins(tuple as u64, k);
                    total += p * region.model.energy(&z)? + t * xlnx(p);
                }
            }
            RegionBelief::Corrected { v } => {
                // For b ∝ exp(-(E + Σ V_i)/t):
                //   Σ b E + t Σ b ln b = -Σ_i E_b[V_i] - t ln Z̃,
                // both of which the corrected model yields exactly.
                let corrected = corrective_energy(region, v)?;
                let m = exact_boltzmann_marginals(&corrected, t, None)?;
                let mut term = -t * m.log_z;
                for (&i, vi) in v {
                    let local = region
                        .local(i)
                        .expect("corrective_energy already validated membership")
                        as usize;
                    term -= m.unary[local][0] * vi[0] + m.unary[local][1] * vi[1];
                }
                total += term;
            }
        }
    }

    // Each variable's entropy is over-counted c_i - 1 times by the regions.
    for (i, b) in beliefs.unary.iter().enumerate() {
        let c = rg.count(i as u32);
        if c == 0 {
            continue;
        }
        total += t * (1.0 - c as f64) * (xlnx(b[0]) + xlnx(b[1]));
    }
    Ok(total)
}
