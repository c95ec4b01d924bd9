use std::collections::BTreeMap;

use ising_core::Spin;
use rayon::prelude::*;
use samplers::{greedy_descent_csp, greedy_descent_ising};

use crate::bethe::{regional_bethe_energy, Beliefs, RegionBelief};
use crate::error::DecompError;
use crate::oracle::OracleCtx;
use crate::region::{corrective_energy, RegionGraph};
use crate::sampler::RegionSampler;

/// Parameters of the generalized-belief-propagation loop.
#[derive(Debug, Clone, Copy)]
pub struct GbpParams {
    pub max_iters: usize,
    /// Fraction of the old region-to-variable message kept per update.
    pub damping: f64,
    /// Lower bound on message entries, keeping log-messages finite.
    pub floor: f64,
    /// Converged when no message entry moves more than this in a sweep.
    pub tol: f64,
    /// Update regions sequentially, each seeing the messages already updated
    /// this sweep, instead of the default simultaneous (and parallel) sweep.
    pub gauss_seidel: bool,
    /// Record the regional free energy of the running beliefs per iteration.
    pub trace_bethe: bool,
}

impl Default for GbpParams {
    fn default() -> Self {
        GbpParams {
            max_iters: 200,
            damping: 0.5,
            floor: 1e-6,
            tol: 1e-4,
            gauss_seidel: false,
            trace_bethe: false,
        }
    }
}

/// How a belief-propagation run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GbpVerdict {
    /// All messages moved less than the tolerance in the final sweep.
    Converged,
    /// The iteration cap was hit first; beliefs are the current (possibly
    /// oscillating) state, reported as a failure rather than an error.
    Failure,
}

/// One sweep of the run, for convergence monitoring.
#[derive(Debug, Clone, Copy)]
pub struct GbpTraceLine {
    pub iteration: usize,
    /// Largest message-entry change in this sweep.
    pub max_delta: f64,
    /// Regional free energy of the running beliefs, when traced.
    pub bethe: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct GbpOutcome {
    pub verdict: GbpVerdict,
    pub beliefs: Beliefs,
    /// Most probable value per variable under the final beliefs (ties to
    /// +1), polished by greedy descent.
    pub assignment: Vec<Spin>,
    pub iterations: usize,
    pub trace: Vec<GbpTraceLine>,
}

/// A reasonable operating temperature for a region graph: a fifth of the
/// smallest feasible-to-infeasible gap, cold enough that beliefs concentrate
/// on good configurations but warm enough to keep messages well-conditioned.
pub fn default_temperature(rg: &RegionGraph) -> f64 {
    0.2 * rg.regions().iter().map(|r| r.gap).fold(f64::INFINITY, f64::min)
}

/// Normalize a positive 2-vector and clamp both entries into
/// `[floor, 1 - floor]`. Returns the uninformative message on degenerate
/// input (which the update rules never produce).
pub(crate) fn floor_norm(m: [f64; 2], floor: f64) -> [f64; 2] {
    let s = m[0] + m[1];
    if !(s.is_finite() && s > 0.0) {
        return [0.5, 0.5];
    }
    let a = (m[0] / s).clamp(floor, 1.0 - floor);
    [a, 1.0 - a]
}

/// Messages indexed `[region][boundary position]`, in both directions.
struct Messages {
    /// From each boundary variable into the region.
    to_region: Vec<Vec<[f64; 2]>>,
    /// From the region out to each boundary variable.
    to_var: Vec<Vec<[f64; 2]>>,
}

/// Run generalized belief propagation over the regions at temperature `t`.
///
/// Each sweep turns the incoming variable-to-region messages of a region
/// into corrective single-variable biases, asks the sampler for the
/// corrected Boltzmann marginals, and divides out the incoming message to
/// form the new region-to-variable message (damped, floored); then every
/// shared variable redistributes what the other regions say about it. On
/// tree-structured overlaps the fixpoint beliefs are the exact marginals.
pub fn gbp_solve(
    rg: &RegionGraph,
    sampler: &dyn RegionSampler,
    t: f64,
    params: &GbpParams,
) -> Result<GbpOutcome, DecompError> {
    if !(t.is_finite() && t > 0.0) {
        return Err(DecompError::BadInput(format!("temperature must be positive, got {t}")));
    }
    if !(params.damping >= 0.0 && params.damping < 1.0) {
        return Err(DecompError::BadInput(format!(
            "damping must be in [0, 1), got {}",
            params.damping
        )));
    }
    if !(params.floor > 0.0 && params.floor <= 0.1) {
        return Err(DecompError::BadInput(format!(
            "message floor must be in (0, 0.1], got {}",
            params.floor
        )));
    }
    if !(params.tol.is_finite() && params.tol > 0.0) {
        return Err(DecompError::BadInput(format!("tolerance must be positive, got {}", params.tol)));
    }
    if params.max_iters == 0 {
        return Err(DecompError::BadInput("max_iters must be at least 1".into()));
    }

    let regions = rg.regions();
    let mut msgs = Messages {
        to_region: regions.iter().map(|r| vec![[0.5, 0.5]; r.boundary().len()]).collect(),
        to_var: regions.iter().map(|r| vec![[0.5, 0.5]; r.boundary().len()]).collect(),
    };
    // Every (region, boundary position) hosting each shared variable.
    let mut slots: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    for (ri, region) in regions.iter().enumerate() {
        for (pos, &v) in region.boundary().iter().enumerate() {
            slots.entry(v).or_default().push((ri, pos));
        }
    }
    let mut last_marg: Vec<Vec<[f64; 2]>> =
        regions.iter().map(|r| vec![[0.5, 0.5]; r.scope.len()]).collect();

    let mut trace = Vec::new();
    let mut verdict = GbpVerdict::Failure;
    let mut iterations = params.max_iters;
    for iteration in 0..params.max_iters {
        let max_delta = if params.gauss_seidel {
            sweep_gauss_seidel(rg, sampler, t, params, iteration, &mut msgs, &slots, &mut last_marg)?
        } else {
            sweep_jacobi(rg, sampler, t, params, iteration, &mut msgs, &slots, &mut last_marg)?
        };
        let bethe = if params.trace_bethe {
            Some(regional_bethe_energy(rg, &beliefs_from(rg, &msgs, &slots, t, &last_marg), t)?)
        } else {
            None
        };
        trace.push(GbpTraceLine { iteration, max_delta, bethe });
        if max_delta < params.tol {
            verdict = GbpVerdict::Converged;
            iterations = iteration + 1;
            break;
        }
    }

    // Refresh the marginals against the final messages so region beliefs and
    // single-variable beliefs describe the same state.
    let finals: Vec<Vec<[f64; 2]>> = regions
        .par_iter()
        .enumerate()
        .map(|(ri, _)| {
            region_marginals(rg, sampler, t, iterations, ri, &msgs.to_region[ri])
        })
        .collect::<Result<_, _>>()?;
    last_marg = finals;
    let beliefs = beliefs_from(rg, &msgs, &slots, t, &last_marg);

    let mut assignment: Vec<Spin> =
        beliefs.unary.iter().map(|b| if b[1] >= b[0] { 1 } else { -1 }).collect();
    if let Some(csp) = rg.csp() {
        let polished = greedy_descent_csp(csp, &assignment[..csp.num_vars])?;
        assignment[..csp.num_vars].copy_from_slice(&polished);
    } else {
        assignment = greedy_descent_ising(&rg.joint_model()?, &assignment)?;
    }

    Ok(GbpOutcome { verdict, beliefs, assignment, iterations, trace })
}

/// The corrected Boltzmann marginals of one region given its incoming
/// messages, validated and normalized.
fn region_marginals(
    rg: &RegionGraph,
    sampler: &dyn RegionSampler,
    t: f64,
    iteration: usize,
    ri: usize,
    incoming: &[[f64; 2]],
) -> Result<Vec<[f64; 2]>, DecompError> {
    let region = &rg.regions()[ri];
    let mut v = BTreeMap::new();
    for (pos, &i) in region.boundary().iter().enumerate() {
        let f = incoming[pos];
        v.insert(i, [-t * f[0].ln(), -t * f[1].ln()]);
    }
    let corrected = corrective_energy(region, &v)?;
    let raw = sampler.marginals(&corrected, t, OracleCtx { iteration, region: ri })?;
    if raw.len() != region.scope.len() {
        return Err(DecompError::Oracle {
            region: ri,
            reason: format!(
                "sampler returned {} marginals for {} variables",
                raw.len(),
                region.scope.len()
            ),
        });
    }
    raw.into_iter()
        .enumerate()
        .map(|(k, m)| {
            let s = m[0] + m[1];
            if !(m[0].is_finite() && m[1].is_finite()) || m[0] < -1e-12 || m[1] < -1e-12 || s <= 0.0
            {
                return Err(DecompError::Oracle {
                    region: ri,
                    reason: format!("sampler marginal for variable {k} is not a distribution"),
                });
            }
            Ok([m[0] / s, m[1] / s])
        })
        .collect()
}

/// New outgoing messages for one region from its marginals: the marginal
/// with the incoming message divided out, damped toward the old value.
fn outgoing(
    region_boundary_len: usize,
    marg: &[[f64; 2]],
    boundary_pos: impl Fn(usize) -> usize,
    incoming: &[[f64; 2]],
    old: &[[f64; 2]],
    params: &GbpParams,
) -> Vec<[f64; 2]> {
    (0..region_boundary_len)
        .map(|pos| {
            let m = marg[boundary_pos(pos)];
            let f = incoming[pos];
            let raw = floor_norm([m[0] / f[0], m[1] / f[1]], params.floor);
            floor_norm(
                [
                    params.damping * old[pos][0] + (1.0 - params.damping) * raw[0],
                    params.damping * old[pos][1] + (1.0 - params.damping) * raw[1],
                ],
                params.floor,
            )
        })
        .collect()
}

/// Recomputed variable-to-region message for one slot: the product of what
/// every other region says about the variable.
fn collect_to_region(
    slots: &[(usize, usize)],
    skip: usize,
    to_var: &[Vec<[f64; 2]>],
    floor: f64,
) -> [f64; 2] {
    let mut prod = [1.0f64, 1.0];
    for &(si, spos) in slots {
        if si == skip {
            continue;
        }
        prod[0] *= to_var[si][spos][0];
        prod[1] *= to_var[si][spos][1];
    }
    floor_norm(prod, floor)
}

#[allow(clippy::too_many_arguments)]
fn sweep_jacobi(
    rg: &RegionGraph,
    sampler: &dyn RegionSampler,
    t: f64,
    params: &GbpParams,
    iteration: usize,
    msgs: &mut Messages,
    slots: &BTreeMap<u32, Vec<(usize, usize)>>,
    last_marg: &mut [Vec<[f64; 2]>],
) -> Result<f64, DecompError> {
    let regions = rg.regions();
    let updates: Vec<(Vec<[f64; 2]>, Vec<[f64; 2]>)> = regions
        .par_iter()
        .enumerate()
        .map(|(ri, region)| {
            let marg = region_marginals(rg, sampler, t, iteration, ri, &msgs.to_region[ri])?;
            let out = outgoing(
                region.boundary().len(),
                &marg,
                |pos| {
                    region
                        .local(region.boundary()[pos])
                        .expect("boundary variables are in scope") as usize
                },
                &msgs.to_region[ri],
                &msgs.to_var[ri],
                params,
            );
            Ok((marg, out))
        })
        .collect::<Result<_, DecompError>>()?;

    let mut max_delta = 0.0f64;
    for (ri, (marg, out)) in updates.into_iter().enumerate() {
        for (pos, m) in out.iter().enumerate() {
            max_delta = max_delta.max((m[0] - msgs.to_var[ri][pos][0]).abs());
            max_delta = max_delta.max((m[1] - msgs.to_var[ri][pos][1]).abs());
        }
        msgs.to_var[ri] = out;
        last_marg[ri] = marg;
    }
    for var_slots in slots.values() {
        for &(ri, pos) in var_slots {
            let new = collect_to_region(var_slots, ri, &msgs.to_var, params.floor);
            let old = msgs.to_region[ri][pos];
            max_delta = max_delta.max((new[0] - old[0]).abs()).max((new[1] - old[1]).abs());
            msgs.to_region[ri][pos] = new;
        }
    }
    Ok(max_delta)
}

#[allow(clippy::too_many_arguments)]
fn sweep_gauss_seidel(
    rg: &RegionGraph,
    sampler: &dyn RegionSampler,
    t: f64,
    params: &GbpParams,
    iteration: usize,
    msgs: &mut Messages,
    slots: &BTreeMap<u32, Vec<(usize, usize)>>,
    last_marg: &mut [Vec<[f64; 2]>],
) -> Result<f64, DecompError> {
    let regions = rg.regions();
    let mut max_delta = 0.0f64;
    for (ri, region) in regions.iter().enumerate() {
        let marg = region_marginals(rg, sampler, t, iteration, ri, &msgs.to_region[ri])?;
        let out = outgoing(
            region.boundary().len(),
            &marg,
            |pos| {
                region.local(region.boundary()[pos]).expect("boundary variables are in scope")
                    as usize
            },
            &msgs.to_region[ri],
            &msgs.to_var[ri],
            params,
        );
        for (pos, m) in out.iter().enumerate() {
            max_delta = max_delta.max((m[0] - msgs.to_var[ri][pos][0]).abs());
            max_delta = max_delta.max((m[1] - msgs.to_var[ri][pos][1]).abs());
        }
        msgs.to_var[ri] = out;
        last_marg[ri] = marg;
        // Re-estimate the incoming messages this region just influenced.
        for &i in region.boundary() {
            let var_slots = &slots[&i];
            for &(si, spos) in var_slots {
                let new = collect_to_region(var_slots, si, &msgs.to_var, params.floor);
                let old = msgs.to_region[si][spos];
                max_delta = max_delta.max((new[0] - old[0]).abs()).max((new[1] - old[1]).abs());
                msgs.to_region[si][spos] = new;
            }
        }
    }
    Ok(max_delta)
}

/// Assemble beliefs from the current messages: region beliefs in factored
/// form, shared variables from message products, private variables from the
/// owning region's marginals.
fn beliefs_from(
    rg: &RegionGraph,
    msgs: &Messages,
    slots: &BTreeMap<u32, Vec<(usize, usize)>>,
    t: f64,
    last_marg: &[Vec<[f64; 2]>],
) -> Beliefs {
    let regions = rg.regions();
    let region_beliefs = regions
        .iter()
        .enumerate()
        .map(|(ri, region)| {
            let v = region
                .boundary()
                .iter()
                .enumerate()
                .map(|(pos, &i)| {
                    let f = msgs.to_region[ri][pos];
                    (i, [-t * f[0].ln(), -t * f[1].ln()])
                })
                .collect();
            RegionBelief::Corrected { v }
        })
        .collect();
    let unary = (0..rg.num_vars() as u32)
        .map(|i| {
            if let Some(var_slots) = slots.get(&i) {
                let mut prod = [1.0f64, 1.0];
                for &(si, spos) in var_slots {
                    prod[0] *= msgs.to_var[si][spos][0];
                    prod[1] *= msgs.to_var[si][spos][1];
                }
                let s = prod[0] + prod[1];
                return [prod[0] / s, prod[1] / s];
            }
            match rg.membership(i).first() {
                Some(&ri) => {
                    let pos = rg.regions()[ri].local(i).expect("membership implies scope") as usize;
                    last_marg[ri][pos]
                }
                None => [0.5, 0.5],
            }
        })
        .collect();
    Beliefs { regions: region_beliefs, unary }
}

#[cfg(test)]
mod tests {
    use super::floor_norm;

    #[test]
    fn floored_messages_stay_proper() {
        let f = 1e-6;
        for m in [[1.0, 0.0], [0.0, 3.0], [0.3, 0.1], [1e-300, 1.0], [2.0, 2.0]] {
            let out = floor_norm(m, f);
            assert!(out[0] >= f && out[1] >= f, "{out:?} below floor");
            assert!((out[0] + out[1] - 1.0).abs() < 1e-12, "{out:?} not normalized");
        }
        assert_eq!(floor_norm([0.0, 0.0], f), [0.5, 0.5]);
        assert_eq!(floor_norm([2.0, 2.0], f), [0.5, 0.5]);
    }
}
