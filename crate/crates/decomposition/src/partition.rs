use std::collections::{BTreeMap, BTreeSet};

use embedder::{
    rip_up_and_replace, validate_embedding, ConstraintSpec, Embedding, PlaceParams,
};
use ising_core::{Csp, HardwareGraph, IsingModel};
use rayon::prelude::*;

use crate::error::DecompError;
use crate::region::{RegionGraph, RegionSpec};
use crate::seed_mix;

/// Parameters of the partition search.
#[derive(Debug, Clone, Copy)]
pub struct PartitionParams {
    /// Cap on the embedded footprint (chain plus ancilla vertices) of one
    /// region; defaults to the number of usable hardware vertices.
    pub max_qubits: Option<usize>,
    /// Place-and-route parameters for the per-region embedding checks.
    pub place: PlaceParams,
    /// Give up after this many regions; defaults to one region per
    /// constraint.
    pub max_regions: Option<usize>,
    pub seed: u64,
}

impl Default for PartitionParams {
    fn default() -> Self {
        PartitionParams {
            max_qubits: None,
            place: PlaceParams::default(),
            max_regions: None,
            seed: 0,
        }
    }
}

/// A verified split of the constraints: each part embeds within the budget.
#[derive(Debug, Clone)]
pub struct Partition {
    /// Constraint indices per region, each sorted.
    pub parts: Vec<Vec<usize>>,
    /// A within-budget embedding of each part on the hardware graph.
    pub embeddings: Vec<Embedding>,
    /// Embedded footprint of each part.
    pub qubits: Vec<usize>,
}

/// Split a constraint problem into the fewest regions whose embedded
/// footprints each fit the qubit budget.
///
/// The split is a greedy balanced edge-cut of the constraint adjacency graph
/// (constraints are adjacent when their scopes share variables): seed
/// constraints are spread by farthest-point hops, then the currently smallest
/// region absorbs its most-connected unassigned neighbour. Starting from one
/// region, the region count grows until every part passes an actual
/// place-and-route check on `hw` within `max_qubits`. Deterministic for a
/// fixed seed.
pub fn partition_constraints(
    csp: &Csp,
    specs: &[ConstraintSpec],
    hw: &HardwareGraph,
    params: &PartitionParams,
) -> Result<Partition, DecompError> {
    let n_c = csp.constraints.len();
    if n_c == 0 {
        return Err(DecompError::BadInput("the problem has no constraints".into()));
    }
    if specs.len() != n_c {
        return Err(DecompError::BadInput(format!(
            "{} placement specs for {} constraints",
            specs.len(),
            n_c
        )));
    }
    let budget = params.max_qubits.unwrap_or(hw.num_alive());
    // A constraint's footprint can never be smaller than its most compact
    // candidate, so an impossible instance is reported without any routing.
    let mut min_fp = vec![0usize; n_c];
    for (c, spec) in specs.iter().enumerate() {
        if spec.candidates.is_empty() {
            return Err(embedder::EmbedError::NoCandidates { constraint: c }.into());
        }
        min_fp[c] = spec.candidates.iter().map(|cand| cand.vertices.len()).min().unwrap();
        if min_fp[c] > budget {
            return Err(DecompError::Partition(format!(
                "constraint {c} alone needs at least {} vertices but the budget is {budget}",
                min_fp[c]
            )));
        }
    }
    let adj = constraint_adjacency(csp);
    let max_k = params.max_regions.unwrap_or(n_c).min(n_c).max(1);

    let mut last_failure = String::new();
    for k in 1..=max_k {
        let parts = greedy_parts(n_c, &adj, k);
        if let Some(over) = parts
            .iter()
            .position(|p| p.iter().map(|&c| min_fp[c]).sum::<usize>() > budget)
        {
            last_failure = format!(
                "{k} regions: part {over} needs at least {} vertices (budget {budget})",
                parts[over].iter().map(|&c| min_fp[c]).sum::<usize>()
            );
            continue;
        }
        let attempts: Vec<Result<Embedding, String>> = parts
            .par_iter()
            .enumerate()
            .map(|(r, part)| {
                let subset: Vec<ConstraintSpec> =
                    part.iter().map(|&c| specs[c].clone()).collect();
                let seed = seed_mix(params.seed, k as u64, r as u64);
                let outcome = rip_up_and_replace(hw.graph(), &subset, params.place, seed)
                    .map_err(|e| format!("part {r}: {e}"))?;
                let scopes: Vec<Vec<u32>> = subset.iter().map(|s| s.vars.clone()).collect();
                let report = validate_embedding(hw.graph(), &scopes, &outcome.embedding);
                if !report.is_valid() {
                    return Err(format!("part {r}: invalid embedding: {}", report.violations[0]));
                }
                if report.qubit_total > budget {
                    return Err(format!(
                        "part {r}: footprint {} exceeds the budget {budget}",
                        report.qubit_total
                    ));
                }
                Ok(outcome.embedding)
            })
            .collect();
        match attempts.into_iter().collect::<Result<Vec<Embedding>, String>>() {
            Ok(embeddings) => {
                let qubits = embeddings.iter().map(|e| e.qubit_total()).collect();
                return Ok(Partition { parts, embeddings, qubits });
            }
            Err(reason) => last_failure = format!("{k} regions: {reason}"),
        }
    }
    Err(DecompError::Partition(format!(
        "no split into at most {max_k} regions fits {budget} vertices; last attempt: {last_failure}"
    )))
}

/// Shared-variable counts between every pair of constraints.
fn constraint_adjacency(csp: &Csp) -> Vec<BTreeMap<usize, usize>> {
    let n_c = csp.constraints.len();
    let mut by_var: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (c, constraint) in csp.constraints.iter().enumerate() {
        for &v in constraint.scope() {
            by_var.entry(v).or_default().push(c);
        }
    }
    let mut adj: Vec<BTreeMap<usize, usize>> = vec![BTreeMap::new(); n_c];
    for owners in by_var.values() {
        for (i, &a) in owners.iter().enumerate() {
            for &b in &owners[i + 1..] {
                *adj[a].entry(b).or_insert(0) += 1;
                *adj[b].entry(a).or_insert(0) += 1;
            }
        }
    }
    adj
}

/// Greedy balanced edge-cut split of constraints `0..n_c` into `k` parts.
fn greedy_parts(n_c: usize, adj: &[BTreeMap<usize, usize>], k: usize) -> Vec<Vec<usize>> {
    // Seeds: farthest-point sampling by hop distance, so disconnected
    // components are claimed before any component is split.
    let mut seeds = vec![0usize];
    while seeds.len() < k {
        let dist = multi_source_hops(n_c, adj, &seeds);
        let far = (0..n_c)
            .filter(|c| !seeds.contains(c))
            .max_by_key(|&c| (dist[c], std::cmp::Reverse(c)))
            .expect("k never exceeds the constraint count");
        seeds.push(far);
    }

    let mut part_of: Vec<Option<usize>> = vec![None; n_c];
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); k];
    // weight[c][r]: shared variables between constraint c and part r so far.
    let mut weight: Vec<Vec<usize>> = vec![vec![0; k]; n_c];
    let assign = |c: usize,
                      r: usize,
                      part_of: &mut Vec<Option<usize>>,
                      parts: &mut Vec<Vec<usize>>,
                      weight: &mut Vec<Vec<usize>>| {
        part_of[c] = Some(r);
        parts[r].push(c);
        for (&other, &w) in &adj[c] {
            weight[other][r] += w;
        }
    };
    for (r, &s) in seeds.iter().enumerate() {
        assign(s, r, &mut part_of, &mut parts, &mut weight);
    }
    let mut remaining = n_c - k;
    while remaining > 0 {
        // Smallest part first; among its attached candidates, the most
        // connected one. A part with no attachment waits for the others.
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&r| (parts[r].len(), r));
        let mut placed = false;
        for &r in &order {
            let best = (0..n_c)
                .filter(|&c| part_of[c].is_none() && weight[c][r] > 0)
                .max_by_key(|&c| (weight[c][r], std::cmp::Reverse(c)));
            if let Some(c) = best {
                assign(c, r, &mut part_of, &mut parts, &mut weight);
                placed = true;
                break;
            }
        }
        if !placed {
            // Every unassigned constraint starts a fresh component: give the
            // smallest part the lowest-numbered one.
            let r = order[0];
            let c = (0..n_c).find(|&c| part_of[c].is_none()).expect("remaining > 0");
            assign(c, r, &mut part_of, &mut parts, &mut weight);
        }
        remaining -= 1;
    }
    for part in &mut parts {
        part.sort_unstable();
    }
    parts
}

/// Hop distance from the nearest source; `usize::MAX` marks unreachable.
fn multi_source_hops(n_c: usize, adj: &[BTreeMap<usize, usize>], sources: &[usize]) -> Vec<usize> {
    let mut dist = vec![usize::MAX; n_c];
    let mut queue = std::collections::VecDeque::new();
    for &s in sources {
        dist[s] = 0;
        queue.push_back(s);
    }
    while let Some(c) = queue.pop_front() {
        for &other in adj[c].keys() {
            if dist[other] == usize::MAX {
                dist[other] = dist[c] + 1;
                queue.push_back(other);
            }
        }
    }
    dist
}

/// A penalty model for one constraint, ready for composition into regions.
#[derive(Debug, Clone)]
pub struct ConstraintModel {
    /// Energy over local indices: `0..arity` are the constraint's scope in
    /// order, the rest are ancillas private to this constraint.
    pub model: IsingModel<f64>,
    /// Feasible-to-infeasible energy separation of `model`.
    pub gap: f64,
}

/// Build a [`RegionGraph`] from a constraint split by composing the
/// per-constraint penalty models. Shared variables are identified across
/// constraints; ancillas get fresh global ids above the problem's variables.
pub fn assemble_regions(
    csp: &Csp,
    parts: &[Vec<usize>],
    models: &[ConstraintModel],
) -> Result<RegionGraph, DecompError> {
    if models.len() != csp.constraints.len() {
        return Err(DecompError::BadInput(format!(
            "{} penalty models for {} constraints",
            models.len(),
            csp.constraints.len()
        )));
    }
    for (c, cm) in models.iter().enumerate() {
        if cm.model.num_vars() < csp.constraints[c].arity() {
            return Err(DecompError::BadInput(format!(
                "constraint {c}: model covers {} variables but the scope needs {}",
                cm.model.num_vars(),
                csp.constraints[c].arity()
            )));
        }
    }
    let mut next_ancilla = csp.num_vars as u32;
    let mut specs = Vec::with_capacity(parts.len());
    for part in parts {
        let mut part = part.clone();
        part.sort_unstable();
        let mut vars: BTreeSet<u32> = BTreeSet::new();
        for &c in &part {
            vars.extend(csp.constraints[c].scope().iter().copied());
        }
        let mut scope: Vec<u32> = vars.into_iter().collect();
        // Per constraint: local index -> global id (scope vars, then fresh
        // ancillas). Ancilla ids are consecutive, so the region scope stays
        // sorted when they are appended.
        let mut maps: Vec<BTreeMap<u32, u32>> = Vec::with_capacity(part.len());
        for &c in &part {
            let arity = csp.constraints[c].arity();
            let mut map = BTreeMap::new();
            for (k, &v) in csp.constraints[c].scope().iter().enumerate() {
                map.insert(k as u32, v);
            }
            for k in arity..models[c].model.num_vars() {
                map.insert(k as u32, next_ancilla);
                scope.push(next_ancilla);
                next_ancilla += 1;
            }
            maps.push(map);
        }
        let position: BTreeMap<u32, u32> = scope
            .iter()
            .enumerate()
            .map(|(pos, &v)| (v, pos as u32))
            .collect();
        let mut model = IsingModel::new(scope.len());
        let mut gap = f64::INFINITY;
        for (&c, map) in part.iter().zip(&maps) {
            let local: BTreeMap<u32, u32> =
                map.iter().map(|(&k, &g)| (k, position[&g])).collect();
            model.add_model(&models[c].model.relabeled(&local, scope.len())?)?;
            gap = gap.min(models[c].gap);
        }
        specs.push(RegionSpec { constraints: part, scope, model, gap });
    }
    RegionGraph::new(next_ancilla as usize, specs, Some(csp.clone()))
}

/// A partition together with its assembled region graph.
#[derive(Debug)]
pub struct PartitionOutcome {
    pub rg: RegionGraph,
    pub partition: Partition,
}

/// Partition the constraints so every region embeds within budget, then
/// compose the per-constraint penalty models into per-region energies.
pub fn partition_regions(
    csp: &Csp,
    models: &[ConstraintModel],
    specs: &[ConstraintSpec],
    hw: &HardwareGraph,
    params: &PartitionParams,
) -> Result<PartitionOutcome, DecompError> {
    let partition = partition_constraints(csp, specs, hw, params)?;
    let rg = assemble_regions(csp, &partition.parts, models)?;
    Ok(PartitionOutcome { rg, partition })
}
