//! LP lower bounds on chain sizes via the bidirected-cut relaxation.

use std::collections::BTreeSet;

use ising_core::SimpleGraph;
use linprog::{Outcome, Problem, Relation};

use crate::error::EmbedError;

/// Per-variable terminal sets: the hardware vertices each logical
/// variable must reach.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalSets {
    sets: Vec<BTreeSet<u32>>,
}

impl TerminalSets {
    /// Build from one terminal set per variable (index = variable id).
    /// Every set must be nonempty.
    pub fn new(sets: Vec<BTreeSet<u32>>) -> Result<Self, EmbedError> {
        for (i, s) in sets.iter().enumerate() {
            if s.is_empty() {
                return Err(EmbedError::EmptyTerminals { var: i as u32 });
            }
        }
        Ok(TerminalSets { sets })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn get(&self, var: u32) -> &BTreeSet<u32> {
        &self.sets[var as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &BTreeSet<u32>)> {
        self.sets.iter().enumerate().map(|(i, s)| (i as u32, s))
    }

    /// Largest terminal-set size.
    pub fn max_terminals(&self) -> usize {
        self.sets.iter().map(|s| s.len()).max().unwrap_or(0)
    }

    /// Check all terminals exist in `g`.
    pub fn validate(&self, g: &SimpleGraph) -> Result<(), EmbedError> {
        let n = g.num_vertices();
        for s in &self.sets {
            if let Some(&v) = s.iter().find(|&&v| v as usize >= n) {
                return Err(EmbedError::UnknownVertex { v, n });
            }
        }
        Ok(())
    }
}

/// Result of the relaxation bound: a chain-size lower bound per variable
/// and the maximum over variables. Variables whose LP did not reach
/// optimality fall back to the trivial bound (their terminal count) and
/// are listed in `lp_failures`.
#[derive(Debug, Clone)]
pub struct ChainBounds {
    pub per_var: Vec<usize>,
    pub global: usize,
    pub lp_failures: Vec<u32>,
}

/// Lower-bound the minimal chain size of each variable by the LP
/// relaxation of the bidirected-cut Steiner formulation: edges become
/// arc pairs, one unit of flow is shipped from the first terminal to each
/// other terminal, and flow may only pass through a non-terminal vertex
/// `v` to the extent `x_v` that `v` is bought. The chain-size bound is
/// `ceil(LP) + |T|` since the optimal Steiner-point count is an integer
/// no smaller than the LP optimum.
pub fn bcr_lower_bound(g: &SimpleGraph, ts: &TerminalSets) -> Result<ChainBounds, EmbedError> {
    ts.validate(g)?;
    let mut per_var = Vec::with_capacity(ts.len());
    let mut lp_failures = Vec::new();
    for (var, t) in ts.iter() {
        match steiner_point_lp(g, t) {
            Ok(Some(lp_opt)) => {
                let points = (lp_opt - 1e-7).ceil().max(0.0) as usize;
                per_var.push(points + t.len());
            }
            Ok(None) | Err(_) => {
                // Infeasible (disconnected terminals) or numerical failure:
                // report it and keep the trivial bound.
                lp_failures.push(var);
                per_var.push(t.len());
            }
        }
    }
    let global = per_var.iter().copied().max().unwrap_or(0);
    Ok(ChainBounds {
        per_var,
        global,
        lp_failures,
    })
}

/// The LP relaxation optimum (minimal fractional Steiner-point mass), or
/// `None` when the flow problem is infeasible.
fn steiner_point_lp(g: &SimpleGraph, terminals: &BTreeSet<u32>) -> Result<Option<f64>, EmbedError> {
    let n = g.num_vertices();
    if terminals.len() <= 1 {
        return Ok(Some(0.0));
    }
    let ts: Vec<u32> = terminals.iter().copied().collect();
    let root = ts[0];
    let sinks = &ts[1..];

    // Arcs: each undirected edge becomes two directed arcs.
    let mut arcs: Vec<(u32, u32)> = Vec::with_capacity(2 * g.num_edges());
    for (u, v) in g.edges() {
        arcs.push((u, v));
        arcs.push((v, u));
    }
    let mut arcs_out: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut arcs_in: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (a, &(u, v)) in arcs.iter().enumerate() {
        arcs_out[u as usize].push(a);
        arcs_in[v as usize].push(a);
    }

    // Columns: x_v for v outside T, then flows f[a][commodity].
    let mut x_col = vec![u32::MAX; n];
    let mut ncols: u32 = 0;
    for v in 0..n as u32 {
        if !terminals.contains(&v) {
            x_col[v as usize] = ncols;
            ncols += 1;
        }
    }
    let flow_base = ncols;
    let ncom = sinks.len() as u32;
    ncols += arcs.len() as u32 * ncom;
    let fcol = |a: usize, c: usize| flow_base + (a as u32) * ncom + c as u32;

    let mut lp = Problem::new(ncols as usize);
    for v in 0..n as u32 {
        if x_col[v as usize] != u32::MAX {
            lp.set_objective(x_col[v as usize], 1.0)?;
            lp.set_bounds(x_col[v as usize], 0.0, 1.0)?;
        }
    }
    for a in 0..arcs.len() {
        for c in 0..sinks.len() {
            lp.set_bounds(fcol(a, c), 0.0, 1.0)?;
        }
    }
    // Flow conservation per commodity and vertex.
    let mut row = Vec::new();
    for (c, &sink) in sinks.iter().enumerate() {
        for v in 0..n as u32 {
            row.clear();
            for &a in &arcs_out[v as usize] {
                row.push((fcol(a, c), 1.0));
            }
            for &a in &arcs_in[v as usize] {
                row.push((fcol(a, c), -1.0));
            }
            let rhs = if v == root {
                1.0
            } else if v == sink {
                -1.0
            } else {
                0.0
            };
            if row.is_empty() {
                if rhs != 0.0 {
                    return Ok(None); // isolated root or sink
                }
                continue;
            }
            lp.add_row(Relation::Eq, rhs, &row)?;
        }
        // Capacity: flow enters a non-terminal only if it is bought.
        for v in 0..n as u32 {
            let xc = x_col[v as usize];
            if xc == u32::MAX {
                continue;
            }
            row.clear();
            for &a in &arcs_in[v as usize] {
                row.push((fcol(a, c), 1.0));
            }
            row.push((xc, -1.0));
            lp.add_row(Relation::Le, 0.0, &row)?;
        }
    }
    match lp.solve()? {
        Outcome::Optimal(sol) => Ok(Some(sol.objective)),
        Outcome::Infeasible => Ok(None),
        Outcome::Unbounded => Err(EmbedError::BadSpec(
            "bound LP unbounded despite box constraints".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacent_pair_bound_is_two() {
        let g = SimpleGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let ts = TerminalSets::new(vec![[1, 2].into()]).unwrap();
        let b = bcr_lower_bound(&g, &ts).unwrap();
        assert_eq!(b.per_var, vec![2]);
        assert_eq!(b.global, 2);
        assert!(b.lp_failures.is_empty());
    }

    #[test]
    fn path_endpoints_lp_is_integral() {
        // P_6: the only flow is along the path, so LP = 4 exactly and the
        // chain bound equals the full path length.
        let g = SimpleGraph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let ts = TerminalSets::new(vec![[0, 5].into()]).unwrap();
        let b = bcr_lower_bound(&g, &ts).unwrap();
        assert_eq!(b.per_var, vec![6]);
    }

    #[test]
    fn disconnected_terminals_fall_back_to_trivial_bound() {
        let g = SimpleGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let ts = TerminalSets::new(vec![[0, 3].into()]).unwrap();
        let b = bcr_lower_bound(&g, &ts).unwrap();
        assert_eq!(b.per_var, vec![2]);
        assert_eq!(b.lp_failures, vec![0]);
    }
}
