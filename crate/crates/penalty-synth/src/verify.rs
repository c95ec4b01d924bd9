//! Exhaustive gap certificates for penalty models.

use std::collections::{BTreeMap, BTreeSet};

use ising_core::{IsingModel, Tuple};

use crate::{Placement, PenaltyError, PenaltyModel};

pub(crate) const VERIFY_LIMIT: usize = 26;
pub(crate) const LEVEL_TOL: f64 = 1e-6;

/// The result of exhaustively checking a penalty model's energy levels.
#[derive(Debug, Clone)]
pub struct GapReport {
    /// Minimum energy over the level-0 states' completions (≈ 0).
    pub min_feasible: f64,
    /// Common energy level realized by the fault states, if any were given.
    pub realized_e: Option<f64>,
    /// Minimum energy over all variable states outside the given sets
    /// (`+inf` when every variable state is listed).
    pub realized_g: f64,
    /// Energy of the lowest level above the ground level:
    /// `min(realized_e, realized_g)`.
    pub effective_gap: f64,
    /// Minimum energy over the entire state space.
    pub global_min: f64,
    /// For each listed variable state, an ancilla assignment achieving its
    /// minimum energy.
    pub witnesses: BTreeMap<Tuple, Tuple>,
}

/// Per-variable-state minimum energies and witnesses, by exhaustive
/// enumeration of ancilla completions (Gray-code order, incremental energy).
///
/// Returns `(min_energy, witness_ancilla)` indexed by variable state.
pub(crate) fn state_minima(
    placement: &Placement,
    model: &IsingModel,
) -> Result<Vec<(f64, Tuple)>, PenaltyError> {
    let m = placement.num_vertices();
    let n = placement.num_vars();
    let h = placement.num_ancillas();
    if m > VERIFY_LIMIT {
        return Err(PenaltyError::TooManyVertices {
            m,
            what: "exhaustive verification",
            limit: VERIFY_LIMIT,
        });
    }
    if model.num_vars() != m {
        return Err(PenaltyError::BadPlacement(format!(
            "model has {} variables but placement has {m} vertices",
            model.num_vars()
        )));
    }
    // Dense views for speed.
    let mut hv = vec![0.0f64; m];
    for (v, val) in model.linear() {
        hv[v as usize] = val;
    }
    let edges: Vec<(u32, u32, f64)> = model.quadratic().collect();
    let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); m];
    for &(u, v, j) in &edges {
        adj[u as usize].push((v, j));
        adj[v as usize].push((u, j));
    }
    // Ancilla local vertex per ancilla slot j.
    let anc: Vec<u32> = placement.ancillas().to_vec();

    let mut out = Vec::with_capacity(1 << n);
    let mut spins = vec![-1.0f64; m];
    for s in 0..(1u64 << n) {
        // Spins for the ancilla-all-(-1) completion.
        let t0 = placement.pack(s, 0);
        for v in 0..m as u32 {
            spins[v as usize] = placement.spin(t0, v);
        }
        let mut energy = model.offset();
        for v in 0..m {
            energy += hv[v] * spins[v];
        }
        for &(u, v, j) in &edges {
            energy += j * spins[u as usize] * spins[v as usize];
        }
        let mut best = energy;
        let mut witness: Tuple = 0;
        let mut a_gray: Tuple = 0;
        for step in 1..(1u64 << h) {
            // Gray code: flip the ancilla indexed by the trailing zeros.
            let j = step.trailing_zeros() as usize;
            let v = anc[j] as usize;
            let mut field = hv[v];
            for &(u, jw) in &adj[v] {
                field += jw * spins[u as usize];
            }
            energy -= 2.0 * spins[v] * field;
            spins[v] = -spins[v];
            a_gray ^= 1 << j;
            if energy < best {
                best = energy;
                witness = a_gray;
            }
        }
        out.push((best, witness));
    }
    Ok(out)
}

/// Check a model against required levels: every variable state in `levels`
/// must have minimum completion energy equal to its level (within
/// tolerance), all remaining variable states give `realized_g`, and the
/// whole spectrum must be non-negative.
pub(crate) fn verify_levels(
    placement: &Placement,
    model: &IsingModel,
    levels: &BTreeMap<Tuple, f64>,
) -> Result<GapReport, PenaltyError> {
    let n = placement.num_vars();
    if levels.is_empty() {
        return Err(PenaltyError::BadStates("no level states given".into()));
    }
    if let Some((&t, _)) = levels.iter().next_back() {
        if t >> n != 0 {
            return Err(PenaltyError::BadStates(format!(
                "state {t:#b} out of range for {n} variables"
            )));
        }
    }
    let minima = state_minima(placement, model)?;
    let mut min_feasible = f64::INFINITY;
    let mut realized_g = f64::INFINITY;
    let mut fault_min = f64::INFINITY;
    let mut fault_max = f64::NEG_INFINITY;
    let mut have_fault = false;
    let mut global_min = f64::INFINITY;
    let mut witnesses = BTreeMap::new();
    for (s, &(e_min, w)) in minima.iter().enumerate() {
        let s = s as Tuple;
        global_min = global_min.min(e_min);
        match levels.get(&s) {
            Some(&lvl) => {
                let tol = LEVEL_TOL * (1.0 + lvl.abs());
                if (e_min - lvl).abs() > tol {
                    return Err(PenaltyError::LevelCertificate {
                        state: s,
                        energy: e_min,
                        expected: lvl,
                    });
                }
                if lvl == 0.0 {
                    min_feasible = min_feasible.min(e_min);
                } else {
                    have_fault = true;
                    fault_min = fault_min.min(e_min);
                    fault_max = fault_max.max(e_min);
                }
                witnesses.insert(s, w);
            }
            None => realized_g = realized_g.min(e_min),
        }
    }
    if global_min < -LEVEL_TOL {
        return Err(PenaltyError::LevelCertificate {
            state: minima
                .iter()
                .enumerate()
                .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
                .map(|(s, _)| s as u64)
                .unwrap_or(0),
            energy: global_min,
            expected: 0.0,
        });
    }
    let realized_e = if have_fault {
        // All fault states must sit at a common level.
        if fault_max - fault_min > 2.0 * LEVEL_TOL * (1.0 + fault_max.abs()) {
            return Err(PenaltyError::BadStates(format!(
                "fault states span energies [{fault_min}, {fault_max}]"
            )));
        }
        Some(fault_max)
    } else {
        None
    };
    let effective_gap = realized_e.unwrap_or(f64::INFINITY).min(realized_g);
    Ok(GapReport {
        min_feasible: if min_feasible.is_finite() { min_feasible } else { 0.0 },
        realized_e,
        realized_g,
        effective_gap,
        global_min,
        witnesses,
    })
}

/// Re-check an existing penalty model against explicit feasible and faulty
/// sets. The faulty set may be empty; when it is not, the model must carry a
/// fault level.
pub fn verify_penalty(
    pm: &PenaltyModel,
    feasible: &BTreeSet<Tuple>,
    faulty: &BTreeSet<Tuple>,
) -> Result<GapReport, PenaltyError> {
    if !feasible.is_disjoint(faulty) {
        return Err(PenaltyError::BadStates(
            "feasible and faulty sets overlap".into(),
        ));
    }
    if feasible.is_empty() {
        return Err(PenaltyError::BadStates("feasible set is empty".into()));
    }
    let mut levels: BTreeMap<Tuple, f64> = feasible.iter().map(|&t| (t, 0.0)).collect();
    if !faulty.is_empty() {
        let Some(e) = pm.fault_level else {
            return Err(PenaltyError::BadStates(
                "faulty states given but the model has no fault level".into(),
            ));
        };
        for &t in faulty {
            levels.insert(t, e);
        }
    }
    let report = verify_levels(&pm.placement, &pm.model, &levels)?;
    if report.realized_g <= LEVEL_TOL {
        return Err(PenaltyError::GapBelow {
            realized: report.realized_g,
            required: LEVEL_TOL,
        });
    }
    if let Some(e) = report.realized_e {
        if !(e > 0.0 && e <= report.realized_g + LEVEL_TOL * (1.0 + e.abs())) {
            return Err(PenaltyError::FaultLevel {
                e,
                gap: report.realized_g,
            });
        }
    }
    Ok(report)
}
