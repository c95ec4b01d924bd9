//! Constraint-variable placements on working subgraphs, and enumeration of
//! placements up to symmetry.

use std::collections::BTreeSet;

use ising_core::{HardwareGraph, SimpleGraph, Tuple};
use itertools::Itertools;

use crate::PenaltyError;

/// An assignment of constraint variables to vertices of a working subgraph.
///
/// The subgraph's vertices are locally indexed `0..m`. The image of
/// `var_map` hosts the `n` constraint variables; the remaining `m - n`
/// vertices are ancillas, ordered ascending. Full states over the subgraph
/// are packed as bit tuples: bit `k < n` holds variable `k`, bit `n + j`
/// holds ancilla `j` (set bit = spin +1).
///
/// A placement may optionally be anchored to hardware sites via `site_map`
/// (local index → hardware vertex id), in which case the subgraph edges are
/// a subset of the hardware edges by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    graph: SimpleGraph,
    var_map: Vec<u32>,
    ancillas: Vec<u32>,
    slot_of_local: Vec<usize>,
    site_map: Option<Vec<u32>>,
}

impl Placement {
    /// A placement on an abstract subgraph. `var_map[k]` is the local
    /// vertex hosting variable `k`.
    pub fn new(graph: SimpleGraph, var_map: Vec<u32>) -> Result<Self, PenaltyError> {
        let m = graph.num_vertices();
        let n = var_map.len();
        if n == 0 {
            return Err(PenaltyError::BadPlacement(
                "at least one constraint variable required".into(),
            ));
        }
        if n > m {
            return Err(PenaltyError::BadPlacement(format!(
                "{n} variables cannot be placed on {m} vertices"
            )));
        }
        let image: BTreeSet<u32> = var_map.iter().copied().collect();
        if image.len() != n {
            return Err(PenaltyError::BadPlacement("var_map is not injective".into()));
        }
        if let Some(&v) = var_map.iter().find(|&&v| v as usize >= m) {
            return Err(PenaltyError::BadPlacement(format!(
                "var_map vertex {v} out of range (subgraph has {m} vertices)"
            )));
        }
        let ancillas: Vec<u32> = (0..m as u32).filter(|v| !image.contains(v)).collect();
        let mut slot_of_local = vec![0usize; m];
        for (k, &v) in var_map.iter().enumerate() {
            slot_of_local[v as usize] = k;
        }
        for (j, &v) in ancillas.iter().enumerate() {
            slot_of_local[v as usize] = n + j;
        }
        Ok(Placement {
            graph,
            var_map,
            ancillas,
            slot_of_local,
            site_map: None,
        })
    }

    /// A placement anchored on hardware: `sites` are distinct hardware
    /// vertex ids forming the subgraph (edges induced from the hardware
    /// graph), and `var_sites[k]` is the hardware site hosting variable `k`
    /// (must be among `sites`). Local indices follow ascending site order.
    pub fn anchored(
        hw: &HardwareGraph,
        sites: &[u32],
        var_sites: &[u32],
    ) -> Result<Self, PenaltyError> {
        let sorted: Vec<u32> = sites.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        if sorted.len() != sites.len() {
            return Err(PenaltyError::BadPlacement("duplicate hardware sites".into()));
        }
        for &s in &sorted {
            if !hw.is_alive(s) {
                return Err(PenaltyError::BadPlacement(format!(
                    "hardware site {s} is dead or out of range"
                )));
            }
        }
        let local_of = |s: u32| -> Option<u32> {
            sorted.binary_search(&s).ok().map(|i| i as u32)
        };
        let mut graph = SimpleGraph::new(sorted.len());
        for (a, b) in hw.graph().edges() {
            if let (Some(la), Some(lb)) = (local_of(a), local_of(b)) {
                graph.add_edge(la, lb).map_err(PenaltyError::Ising)?;
            }
        }
        let mut var_map = Vec::with_capacity(var_sites.len());
        for &s in var_sites {
            let Some(l) = local_of(s) else {
                return Err(PenaltyError::BadPlacement(format!(
                    "variable site {s} is not among the subgraph sites"
                )));
            };
            var_map.push(l);
        }
        let mut pl = Placement::new(graph, var_map)?;
        pl.site_map = Some(sorted);
        Ok(pl)
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn num_vars(&self) -> usize {
        self.var_map.len()
    }

    pub fn num_ancillas(&self) -> usize {
        self.ancillas.len()
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn var_map(&self) -> &[u32] {
        &self.var_map
    }

    pub fn ancillas(&self) -> &[u32] {
        &self.ancillas
    }

    /// Hardware site per local vertex, if anchored.
    pub fn site_map(&self) -> Option<&[u32]> {
        self.site_map.as_deref()
    }

    /// Attach (or clear) hardware site ids for the local vertices.
    pub fn set_site_map(&mut self, sites: Option<Vec<u32>>) -> Result<(), PenaltyError> {
        if let Some(ref s) = sites {
            if s.len() != self.graph.num_vertices() {
                return Err(PenaltyError::BadPlacement(format!(
                    "site map has {} entries for {} vertices",
                    s.len(),
                    self.graph.num_vertices()
                )));
            }
            if s.iter().collect::<BTreeSet<_>>().len() != s.len() {
                return Err(PenaltyError::BadPlacement(
                    "site map has duplicate hardware sites".into(),
                ));
            }
        }
        self.site_map = sites;
        Ok(())
    }

    /// The bit position of local vertex `v` in packed full-state tuples.
    pub fn slot(&self, v: u32) -> usize {
        self.slot_of_local[v as usize]
    }

    /// Spin of local vertex `v` in the packed full state `t` (+1/-1).
    pub fn spin(&self, t: Tuple, v: u32) -> f64 {
        if t >> self.slot_of_local[v as usize] & 1 == 1 {
            1.0
        } else {
            -1.0
        }
    }

    /// Pack a variable state and an ancilla state into a full-state tuple.
    pub fn pack(&self, var_state: Tuple, anc_state: Tuple) -> Tuple {
        var_state | (anc_state << self.num_vars())
    }

    /// Split a full-state tuple into (variable state, ancilla state).
    pub fn unpack(&self, t: Tuple) -> (Tuple, Tuple) {
        let n = self.num_vars();
        (t & ((1 << n) - 1), t >> n)
    }
}

/// All automorphisms of a graph, found by backtracking with degree pruning.
/// Each entry is a permutation `sigma` with `sigma[v]` the image of `v`.
/// Intended for small graphs (≤ ~10 vertices).
pub fn automorphisms(g: &SimpleGraph) -> Vec<Vec<u32>> {
    let m = g.num_vertices();
    if m == 0 {
        return vec![Vec::new()];
    }
    // Cheap vertex invariant: (degree, sorted neighbour degrees).
    let invariant: Vec<(usize, Vec<usize>)> = (0..m as u32)
        .map(|v| {
            let mut nd: Vec<usize> = g.neighbors(v).iter().map(|&u| g.degree(u)).collect();
            nd.sort_unstable();
            (g.degree(v), nd)
        })
        .collect();
    let mut out = Vec::new();
    let mut sigma = vec![u32::MAX; m];
    let mut used = vec![false; m];

    fn rec(
        g: &SimpleGraph,
        invariant: &[(usize, Vec<usize>)],
        sigma: &mut Vec<u32>,
        used: &mut Vec<bool>,
        depth: usize,
        out: &mut Vec<Vec<u32>>,
    ) {
        let m = sigma.len();
        if depth == m {
            out.push(sigma.clone());
            return;
        }
        let v = depth as u32;
        for w in 0..m as u32 {
            if used[w as usize] || invariant[v as usize] != invariant[w as usize] {
                continue;
            }
            // Adjacency with all previously assigned vertices must match.
            let ok = (0..depth as u32)
                .all(|u| g.has_edge(u, v) == g.has_edge(sigma[u as usize], w));
            if !ok {
                continue;
            }
            sigma[depth] = w;
            used[w as usize] = true;
            rec(g, invariant, sigma, used, depth + 1, out);
            used[w as usize] = false;
        }
        sigma[depth] = u32::MAX;
    }

    rec(g, &invariant, &mut sigma, &mut used, 0, &mut out);
    out
}

/// All placements of `n` interchangeable variables into `g`, one per orbit
/// of n-vertex subsets under the automorphism group. Variables are assigned
/// to the orbit-canonical subset in ascending vertex order; output order is
/// by canonical subset.
pub fn enumerate_placements(n: usize, g: &SimpleGraph) -> Result<Vec<Placement>, PenaltyError> {
    let m = g.num_vertices();
    if m > 10 {
        return Err(PenaltyError::TooManyVertices {
            m,
            what: "placement enumeration",
            limit: 10,
        });
    }
    if n == 0 || n > m {
        return Err(PenaltyError::BadPlacement(format!(
            "cannot place {n} variables into {m} vertices"
        )));
    }
    let auts = automorphisms(g);
    let mut out = Vec::new();
    for subset in (0..m as u32).combinations(n) {
        let canon = auts
            .iter()
            .map(|s| {
                let mut img: Vec<u32> = subset.iter().map(|&v| s[v as usize]).collect();
                img.sort_unstable();
                img
            })
            .min()
            .expect("non-empty automorphism group");
        // Emit each orbit exactly once, at its canonical representative;
        // combinations() yields sorted subsets in lexicographic order.
        if canon == subset {
            out.push(Placement::new(g.clone(), subset)?);
        }
    }
    Ok(out)
}

/// All placements of `n` role-distinct variables (order matters) into `g`,
/// one per orbit of injections under the automorphism group alone.
pub fn enumerate_placements_roles(
    n: usize,
    g: &SimpleGraph,
) -> Result<Vec<Placement>, PenaltyError> {
    let m = g.num_vertices();
    if m > 10 {
        return Err(PenaltyError::TooManyVertices {
            m,
            what: "placement enumeration",
            limit: 10,
        });
    }
    if n == 0 || n > m {
        return Err(PenaltyError::BadPlacement(format!(
            "cannot place {n} variables into {m} vertices"
        )));
    }
    let auts = automorphisms(g);
    let mut out = Vec::new();
    for inj in (0..m as u32).permutations(n) {
        let canon = auts
            .iter()
            .map(|s| inj.iter().map(|&v| s[v as usize]).collect::<Vec<u32>>())
            .min()
            .expect("non-empty automorphism group");
        if canon == inj {
            out.push(Placement::new(g.clone(), inj)?);
        }
    }
    Ok(out)
}
