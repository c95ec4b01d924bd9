use ising_core::Spin;
use rayon::prelude::*;

use crate::error::DecompError;
use crate::oracle::{OracleCtx, RegionOracle};
use crate::region::RegionGraph;

/// Parameters of the divide-and-concur loop.
#[derive(Debug, Clone, Copy)]
pub struct DcParams {
    pub max_iters: usize,
    /// Use the difference-map update (beta = 1) instead of plain averaging;
    /// the difference map escapes the fixed points that trap plain
    /// divide-and-concur.
    pub difference_map: bool,
    /// Energy scale dividing each region's model in the divide step. By
    /// default it is chosen per region and iteration as
    /// `(1 + sum |replica|) / gap`, which keeps the divide minimum on
    /// feasible configurations.
    pub scale: Option<f64>,
}

impl Default for DcParams {
    fn default() -> Self {
        DcParams { max_iters: 500, difference_map: true, scale: None }
    }
}

/// How a divide-and-concur run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DcVerdict {
    /// Every shared variable's copies agreed and the merged assignment
    /// leaves no constraint violated.
    Consensus,
    /// The iteration cap was reached; the assignment is the best one seen.
    Timeout,
}

/// One iteration of the run, for convergence monitoring.
#[derive(Debug, Clone, Copy)]
pub struct DcTraceLine {
    pub iteration: usize,
    /// Largest replica change in this iteration (0 on the consensus round).
    pub max_delta: f64,
    /// Violated constraints in this iteration's merged assignment.
    pub violations: usize,
    /// Violated constraints in the best assignment seen so far.
    pub best_violations: usize,
}

#[derive(Debug, Clone)]
pub struct DcOutcome {
    pub verdict: DcVerdict,
    /// Assignment over the problem's variables: the consensus on success,
    /// otherwise the merged assignment with the fewest violations (ties by
    /// fault count) seen across all iterations.
    pub assignment: Vec<Spin>,
    pub iterations: usize,
    pub trace: Vec<DcTraceLine>,
}

/// Solve the attached constraint problem by divide-and-concur message
/// passing over the regions.
///
/// Each iteration independently minimizes every region's scaled energy
/// tilted toward the current replica values (the divide step, dispatched in
/// parallel), then replaces each replica with information from the
/// per-variable average of the region copies (the concur step). The verdict
/// is [`DcVerdict::Consensus`] only when all copies of every shared variable
/// agree *and* the merged assignment violates nothing, so a consensus on a
/// satisfiable problem is always an actual solution.
pub fn dc_solve(
    rg: &RegionGraph,
    oracle: &dyn RegionOracle,
    params: &DcParams,
) -> Result<DcOutcome, DecompError> {
    let csp = rg.csp().ok_or_else(|| {
        DecompError::BadInput("divide-and-concur needs a region graph with a constraint problem".into())
    })?;
    if params.max_iters == 0 {
        return Err(DecompError::BadInput("max_iters must be at least 1".into()));
    }
    if let Some(s) = params.scale {
        if !(s.is_finite() && s > 0.0) {
            return Err(DecompError::BadInput(format!("scale must be positive, got {s}")));
        }
    }
    let regions = rg.regions();
    let n = rg.num_vars();
    let mut replica: Vec<Vec<f64>> = regions.iter().map(|r| vec![0.0; r.scope.len()]).collect();
    // (violations, faults, assignment): lexicographically best merged
    // assignment seen so far.
    let mut best: Option<(usize, usize, Vec<Spin>)> = None;
    let mut trace = Vec::new();

    for iteration in 0..params.max_iters {
        let divides: Vec<Vec<Spin>> = regions
            .par_iter()
            .enumerate()
            .map(|(ri, region)| {
                let scale = params.scale.unwrap_or_else(|| {
                    let swing: f64 = replica[ri].iter().map(|x| x.abs()).sum();
                    (1.0 + swing) / region.gap
                });
                let bias: Vec<f64> = replica[ri].iter().map(|&x| -x / scale).collect();
                oracle.minimize(rg, &bias, OracleCtx { iteration, region: ri })
            })
            .collect::<Result<_, _>>()?;
        for (ri, d) in divides.iter().enumerate() {
            if d.len() != regions[ri].scope.len() {
                return Err(DecompError::Oracle {
                    region: ri,
                    reason: format!(
                        "returned {} spins for {} variables",
                        d.len(),
                        regions[ri].scope.len()
                    ),
                });
            }
        }

        // Concur: average the copies of every variable.
        let mut sum = vec![0i64; n];
        let mut cnt = vec![0i64; n];
        for (ri, d) in divides.iter().enumerate() {
            for (k, &v) in regions[ri].scope.iter().enumerate() {
                sum[v as usize] += i64::from(d[k]);
                cnt[v as usize] += 1;
            }
        }
        let avg: Vec<f64> = sum
            .iter()
            .zip(&cnt)
            .map(|(&s, &c)| if c == 0 { 0.0 } else { s as f64 / c as f64 })
            .collect();
        let merged: Vec<Spin> = avg.iter().map(|&a| if a >= 0.0 { 1 } else { -1 }).collect();
        let assignment = &merged[..csp.num_vars];
        let violations = csp.violations(assignment);
        let faults = csp.faulty_constraints(assignment).len();
        let improved = match &best {
            None => true,
            Some((bv, bf, _)) => violations < *bv || (violations == *bv && faults < *bf),
        };
        if improved {
            best = Some((violations, faults, assignment.to_vec()));
        }
        let best_violations = best.as_ref().map(|(v, _, _)| *v).unwrap_or(violations);

        // Consensus: every shared variable's copies agree (|sum| == count)
        // and the merged assignment is a genuine solution.
        let agree = sum.iter().zip(&cnt).all(|(&s, &c)| c < 2 || s.abs() == c);
        if agree && violations == 0 {
            trace.push(DcTraceLine { iteration, max_delta: 0.0, violations, best_violations });
            return Ok(DcOutcome {
                verdict: DcVerdict::Consensus,
                assignment: assignment.to_vec(),
                iterations: iteration + 1,
                trace,
            });
        }

        let mut max_delta = 0.0f64;
        if params.difference_map {
            // Difference map at beta = 1: overshoot o = 2 d - r, average the
            // overshoots, then move each replica by (average - own divide).
            let mut osum = vec![0.0f64; n];
            for (ri, d) in divides.iter().enumerate() {
                for (k, &v) in regions[ri].scope.iter().enumerate() {
                    osum[v as usize] += 2.0 * f64::from(d[k]) - replica[ri][k];
                }
            }
            let oavg: Vec<f64> = osum
                .iter()
                .zip(&cnt)
                .map(|(&s, &c)| if c == 0 { 0.0 } else { s / c as f64 })
                .collect();
            for (ri, d) in divides.iter().enumerate() {
                for (k, &v) in regions[ri].scope.iter().enumerate() {
                    let new = replica[ri][k] + oavg[v as usize] - f64::from(d[k]);
                    max_delta = max_delta.max((new - replica[ri][k]).abs());
                    replica[ri][k] = new;
                }
            }
        } else {
            for (ri, region) in regions.iter().enumerate() {
                for (k, &v) in region.scope.iter().enumerate() {
                    let new = avg[v as usize];
                    max_delta = max_delta.max((new - replica[ri][k]).abs());
                    replica[ri][k] = new;
                }
            }
        }
        trace.push(DcTraceLine { iteration, max_delta, violations, best_violations });
    }

    let (_, _, assignment) = best.expect("max_iters >= 1 ran at least one iteration");
    Ok(DcOutcome {
        verdict: DcVerdict::Timeout,
        assignment,
        iterations: params.max_iters,
        trace,
    })
}
