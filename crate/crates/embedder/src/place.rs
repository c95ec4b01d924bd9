//! Combined place-and-route: constraints negotiate locations while
//! variable chains are ripped up and re-routed, with congestion priced
//! exponentially.

use std::collections::{BTreeMap, BTreeSet};

use ising_core::{ChimeraCoord, HardwareGraph, SimpleGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dijkstra::vertex_dijkstra;
use crate::embedding::{ConstraintPlacement, Embedding};
use crate::error::EmbedError;
use crate::steiner::steiner_mst;

/// One candidate placement of a constraint: the vertices it would occupy
/// and which of them carries each of its variables. Non-assigned vertices
/// are the constraint's private ancillas.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Candidate {
    /// All occupied vertices, sorted.
    pub vertices: Vec<u32>,
    /// Variable id → occupied vertex.
    pub assignment: BTreeMap<u32, u32>,
}

impl Candidate {
    /// Vertices not carrying a variable.
    pub fn ancillas(&self) -> Vec<u32> {
        let assigned: BTreeSet<u32> = self.assignment.values().copied().collect();
        self.vertices
            .iter()
            .copied()
            .filter(|v| !assigned.contains(v))
            .collect()
    }
}

/// A constraint to place: its variable scope and where it may go.
#[derive(Debug, Clone)]
pub struct ConstraintSpec {
    pub vars: Vec<u32>,
    pub candidates: Vec<Candidate>,
}

/// Parameters of the place-and-route loop.
#[derive(Debug, Clone, Copy)]
pub struct PlaceParams {
    /// Congestion penalty base (weight of a vertex used `u` times is
    /// `alpha^u`).
    pub alpha: f64,
    /// Base of the location lottery: a location is drawn with probability
    /// proportional to `beta^(-cost)`.
    pub beta: f64,
    /// Hard cap on improvement iterations.
    pub max_iters: usize,
    /// Stop after this many iterations without improving the worst vertex
    /// multiplicity.
    pub stall: usize,
}

impl Default for PlaceParams {
    fn default() -> Self {
        PlaceParams {
            alpha: 8.0,
            beta: std::f64::consts::E,
            max_iters: 256,
            stall: 32,
        }
    }
}

/// A successful place-and-route run: the embedding plus its convergence
/// trace (worst vertex multiplicity after each iteration).
#[derive(Debug, Clone)]
pub struct PlaceOutcome {
    pub embedding: Embedding,
    pub iterations: usize,
    pub multiplicity_trace: Vec<u32>,
}

/// Remove, to a fixpoint, vertices of `chain` that have degree one in the
/// induced subgraph and are not in `keep`. Never disconnects the chain
/// and never removes kept vertices; idempotent.
pub fn trim(g: &SimpleGraph, chain: &BTreeSet<u32>, keep: &BTreeSet<u32>) -> BTreeSet<u32> {
    let mut alive = chain.clone();
    let mut deg: BTreeMap<u32, usize> = alive
        .iter()
        .map(|&v| {
            let d = g.neighbors(v).iter().filter(|u| alive.contains(u)).count();
            (v, d)
        })
        .collect();
    let mut queue: Vec<u32> = alive
        .iter()
        .copied()
        .filter(|v| deg[v] == 1 && !keep.contains(v))
        .collect();
    while let Some(v) = queue.pop() {
        if deg[&v] != 1 || !alive.remove(&v) {
            continue;
        }
        for &u in g.neighbors(v) {
            if alive.contains(&u) {
                let d = deg.get_mut(&u).unwrap();
                *d -= 1;
                if *d == 1 && !keep.contains(&u) {
                    queue.push(u);
                }
            }
        }
    }
    alive
}

struct PlaceState<'a> {
    g: &'a SimpleGraph,
    specs: &'a [ConstraintSpec],
    params: PlaceParams,
    /// Per vertex: number of chains over it plus ancilla blocks on it.
    usage: Vec<u32>,
    /// Per constraint: which candidate is currently chosen (usize::MAX
    /// before initial placement).
    choice: Vec<usize>,
    /// Variable → current chain.
    chains: BTreeMap<u32, BTreeSet<u32>>,
    /// Variable → constraints containing it.
    members: BTreeMap<u32, Vec<usize>>,
}

impl<'a> PlaceState<'a> {
    fn weight(&self, v: u32) -> f64 {
        self.params.alpha.powi(self.usage[v as usize].min(60) as i32)
    }

    fn add_usage(&mut self, vs: impl IntoIterator<Item = u32>, delta: i64) {
        for v in vs {
            let u = &mut self.usage[v as usize];
            *u = (*u as i64 + delta) as u32;
        }
    }

    /// Terminals of `var` from every placed constraint except `skip`.
    fn terminals_excluding(&self, var: u32, skip: Option<usize>) -> BTreeSet<u32> {
        let mut t = BTreeSet::new();
        for &c in &self.members[&var] {
            if Some(c) == skip || self.choice[c] == usize::MAX {
                continue;
            }
            let cand = &self.specs[c].candidates[self.choice[c]];
            t.insert(cand.assignment[&var]);
        }
        t
    }

    /// Draw a candidate index with probability proportional to
    /// `beta^(-cost)`; infinite costs are excluded. `None` if every
    /// candidate is unreachable.
    fn lottery(&self, costs: &[f64], rng: &mut ChaCha8Rng) -> Option<usize> {
        let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
        if !min.is_finite() {
            return None;
        }
        let weights: Vec<f64> = costs
            .iter()
            .map(|&c| {
                if c.is_finite() {
                    self.params.beta.powf(-(c - min).min(600.0))
                } else {
                    0.0
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let mut r = rng.random_range(0.0..total);
        for (i, &w) in weights.iter().enumerate() {
            r -= w;
            if r <= 0.0 {
                return Some(i);
            }
        }
        Some(weights.len() - 1)
    }

    /// Score every candidate of constraint `c`: occupied-vertex weight
    /// plus routing distance from each variable's current chain to the
    /// vertex the candidate assigns it.
    fn candidate_costs(&self, c: usize, dists: &BTreeMap<u32, Vec<f64>>) -> Vec<f64> {
        self.specs[c]
            .candidates
            .iter()
            .map(|cand| {
                let occupancy: f64 = cand.vertices.iter().map(|&q| self.weight(q)).sum();
                let routing: f64 = self.specs[c]
                    .vars
                    .iter()
                    .map(|x| dists[x][cand.assignment[x] as usize])
                    .sum();
                occupancy + routing
            })
            .collect()
    }

    /// Re-route the chain of `var` from its full terminal set under the
    /// current congestion weights (its own old chain already ripped).
    fn reroute(&mut self, var: u32) -> Result<(), EmbedError> {
        let t = self.terminals_excluding(var, None);
        if t.is_empty() {
            self.chains.insert(var, BTreeSet::new());
            return Ok(());
        }
        let tree = steiner_mst(self.g, |v| self.weight(v), &t)?;
        self.add_usage(tree.iter().copied(), 1);
        self.chains.insert(var, tree);
        Ok(())
    }

    fn max_multiplicity(&self) -> u32 {
        self.usage.iter().copied().max().unwrap_or(0)
    }
}

/// Place every constraint on one of its candidate locations and route
/// chains between repeated variables so that no hardware vertex is used
/// twice. Deterministic given `(seed, params)`.
pub fn rip_up_and_replace(
    g: &SimpleGraph,
    specs: &[ConstraintSpec],
    params: PlaceParams,
    seed: u64,
) -> Result<PlaceOutcome, EmbedError> {
    // Validate the specs.
    for (ci, spec) in specs.iter().enumerate() {
        if spec.candidates.is_empty() {
            return Err(EmbedError::NoCandidates { constraint: ci });
        }
        let scope: BTreeSet<u32> = spec.vars.iter().copied().collect();
        if scope.len() != spec.vars.len() {
            return Err(EmbedError::BadSpec(format!(
                "constraint {ci} repeats a variable in its scope"
            )));
        }
        for cand in &spec.candidates {
            let keys: BTreeSet<u32> = cand.assignment.keys().copied().collect();
            if keys != scope {
                return Err(EmbedError::BadSpec(format!(
                    "constraint {ci}: candidate assigns {keys:?}, scope is {scope:?}"
                )));
            }
            for &v in cand.vertices.iter().chain(cand.assignment.values()) {
                if v as usize >= g.num_vertices() {
                    return Err(EmbedError::UnknownVertex {
                        v,
                        n: g.num_vertices(),
                    });
                }
            }
            let vs: BTreeSet<u32> = cand.vertices.iter().copied().collect();
            if !cand.assignment.values().all(|v| vs.contains(v)) {
                return Err(EmbedError::BadSpec(format!(
                    "constraint {ci}: candidate assigns a vertex outside its location"
                )));
            }
        }
    }

    let mut members: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (ci, spec) in specs.iter().enumerate() {
        for &x in &spec.vars {
            members.entry(x).or_default().push(ci);
        }
    }
    let mut st = PlaceState {
        g,
        specs,
        params,
        usage: vec![0; g.num_vertices()],
        choice: vec![usize::MAX; specs.len()],
        chains: members.keys().map(|&x| (x, BTreeSet::new())).collect(),
        members,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Initial placement: sequential lottery against the partial state.
    // Indexed loop: `c` is both the lookup key into `specs` and the
    // constraint id recorded in `st.choice[c]`.
    #[allow(clippy::needless_range_loop)]
    for c in 0..specs.len() {
        let mut dists = BTreeMap::new();
        for &x in &specs[c].vars {
            let t = st.terminals_excluding(x, None);
            let d = if t.is_empty() {
                vec![0.0; g.num_vertices()]
            } else {
                vertex_dijkstra(g, t.iter().copied(), |v| st.weight(v)).0
            };
            dists.insert(x, d);
        }
        let costs = st.candidate_costs(c, &dists);
        let pick = st
            .lottery(&costs, &mut rng)
            .ok_or(EmbedError::BadSpec(format!(
                "constraint {c}: no reachable candidate placement"
            )))?;
        st.choice[c] = pick;
        let anc = specs[c].candidates[pick].ancillas();
        st.add_usage(anc, 1);
    }
    // Initial chains.
    let vars: Vec<u32> = st.members.keys().copied().collect();
    for &x in &vars {
        st.reroute(x)?;
    }

    let mut trace = vec![st.max_multiplicity()];
    let mut best = trace[0];
    let mut stall = 0usize;
    let mut iterations = 0usize;
    let mut order: Vec<usize> = (0..specs.len()).collect();

    while best > 1 && stall < params.stall && iterations < params.max_iters {
        iterations += 1;
        order.shuffle(&mut rng);
        for &c in &order {
            // Rip up this constraint's ancilla block.
            let old = st.choice[c];
            let old_anc = specs[c].candidates[old].ancillas();
            st.add_usage(old_anc, -1);

            // Trim each of its chains back to the other constraints'
            // terminals and measure routing distances from what remains.
            let mut dists = BTreeMap::new();
            for &x in &specs[c].vars {
                let keep = st.terminals_excluding(x, Some(c));
                let chain = st.chains[&x].clone();
                let d = if keep.is_empty() {
                    st.add_usage(chain.iter().copied(), -1);
                    st.chains.insert(x, BTreeSet::new());
                    vec![0.0; g.num_vertices()]
                } else {
                    let trimmed = trim(g, &chain, &keep);
                    for v in chain.difference(&trimmed) {
                        st.usage[*v as usize] -= 1;
                    }
                    let d = vertex_dijkstra(g, trimmed.iter().copied(), |v| st.weight(v)).0;
                    st.chains.insert(x, trimmed);
                    d
                };
                dists.insert(x, d);
            }

            // Lottery over candidate locations.
            let costs = st.candidate_costs(c, &dists);
            let pick = st.lottery(&costs, &mut rng).unwrap_or(old);
            st.choice[c] = pick;
            st.add_usage(specs[c].candidates[pick].ancillas(), 1);

            // Re-route this constraint's variables from scratch.
            for &x in &specs[c].vars {
                let chain = std::mem::take(st.chains.get_mut(&x).unwrap());
                st.add_usage(chain, -1);
                st.reroute(x)?;
            }
        }
        let mult = st.max_multiplicity();
        trace.push(mult);
        if mult < best {
            best = mult;
            stall = 0;
        } else {
            stall += 1;
        }
        if best == 1 {
            break;
        }
    }

    if best > 1 || st.max_multiplicity() > 1 {
        return Err(EmbedError::PlacementFailed {
            best_multiplicity: best,
            iterations,
        });
    }

    // Chain-length optimization: re-route each chain with every other
    // occupied vertex forbidden, keeping strict improvements (the largest
    // chain can only shrink or stay).
    let mut by_size: Vec<u32> = vars.clone();
    by_size.sort_by_key(|x| std::cmp::Reverse(st.chains[x].len()));
    for &x in &by_size {
        let old = st.chains[&x].clone();
        if old.len() <= 1 {
            continue;
        }
        st.add_usage(old.iter().copied(), -1);
        let t = st.terminals_excluding(x, None);
        let free = |st: &PlaceState, v: u32| {
            if st.usage[v as usize] == 0 {
                1.0
            } else {
                f64::INFINITY
            }
        };
        match steiner_mst(g, |v| free(&st, v), &t) {
            Ok(tree) if tree.len() < old.len() => {
                st.add_usage(tree.iter().copied(), 1);
                st.chains.insert(x, tree);
            }
            _ => {
                st.add_usage(old.iter().copied(), 1);
                st.chains.insert(x, old);
            }
        }
    }

    let placements = specs
        .iter()
        .zip(&st.choice)
        .map(|(spec, &pick)| {
            let cand = &spec.candidates[pick];
            ConstraintPlacement {
                location: cand.vertices.iter().copied().collect(),
                assignment: cand.assignment.clone(),
            }
        })
        .collect();
    Ok(PlaceOutcome {
        embedding: Embedding {
            chains: st.chains,
            placements,
        },
        iterations,
        multiplicity_trace: trace,
    })
}

/// A constraint's footprint inside a single unit cell of a Chimera graph:
/// the shore slots it occupies and the variable each slot carries.
#[derive(Debug, Clone)]
pub struct CellFootprint {
    /// Occupied slots as `(shore, k)` pairs.
    pub slots: Vec<(u32, u32)>,
    /// Variable id → `(shore, k)` slot.
    pub assignment: BTreeMap<u32, (u32, u32)>,
}

/// Enumerate every placement of `fp` over the cells of `hw`: all grid
/// positions, both shore orientations, skipping any placement that
/// touches a dead vertex. Duplicate candidates (from symmetric
/// footprints) are merged.
pub fn cell_candidates(hw: &HardwareGraph, fp: &CellFootprint) -> Vec<Candidate> {
    let mut out: BTreeSet<Candidate> = BTreeSet::new();
    for row in 0..hw.m {
        for col in 0..hw.n {
            'mirror: for mirror in [0u32, 1] {
                let place = |&(shore, k): &(u32, u32)| -> Option<u32> {
                    if k >= hw.l {
                        return None;
                    }
                    let v = hw.index(ChimeraCoord {
                        row,
                        col,
                        shore: shore ^ mirror,
                        k,
                    });
                    hw.is_alive(v).then_some(v)
                };
                let mut vertices = Vec::with_capacity(fp.slots.len());
                for slot in &fp.slots {
                    match place(slot) {
                        Some(v) => vertices.push(v),
                        None => continue 'mirror,
                    }
                }
                vertices.sort_unstable();
                let mut assignment = BTreeMap::new();
                for (&x, slot) in &fp.assignment {
                    match place(slot) {
                        Some(v) => {
                            assignment.insert(x, v);
                        }
                        None => continue 'mirror,
                    }
                }
                out.insert(Candidate {
                    vertices,
                    assignment,
                });
            }
        }
    }
    out.into_iter().collect()
}
