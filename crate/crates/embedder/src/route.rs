//! Congestion-negotiated routing of disjoint chains and binary search for
//! the smallest feasible chain-size cap.

use std::collections::{BTreeMap, BTreeSet};

use ising_core::SimpleGraph;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bounds::{bcr_lower_bound, TerminalSets};
use crate::error::EmbedError;
use crate::steiner::steiner_mst;

/// Knobs for the negotiated-congestion router.
#[derive(Debug, Clone, Copy)]
pub struct RouteParams {
    /// Base of the exponential congestion penalty.
    pub alpha: f64,
    /// Rounds of rip-up/re-route before giving up.
    pub max_rounds: usize,
}

impl Default for RouteParams {
    fn default() -> Self {
        RouteParams {
            alpha: 8.0,
            max_rounds: 64,
        }
    }
}

/// Chains keyed by variable id.
pub type Chains = BTreeMap<u32, BTreeSet<u32>>;

/// Route every variable's terminals into pairwise-disjoint connected
/// chains of size at most `m`. Returns `None` on (heuristic) failure —
/// this is a verdict, not a proof that no routing exists.
pub fn route(g: &SimpleGraph, ts: &TerminalSets, m: usize, seed: u64) -> Option<Chains> {
    route_with(g, ts, m, RouteParams::default(), seed)
}

/// [`route`] with explicit parameters.
pub fn route_with(
    g: &SimpleGraph,
    ts: &TerminalSets,
    m: usize,
    params: RouteParams,
    seed: u64,
) -> Option<Chains> {
    if ts.validate(g).is_err() || m < ts.max_terminals() {
        return None;
    }
    let n = g.num_vertices();
    let nvars = ts.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut usage = vec![0u32; n];
    let mut hist = vec![0u32; n];
    let mut chains: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); nvars];

    // Exponential penalty on congestion plus accumulated history, with the
    // exponent capped to stay finite.
    let weight = |usage: &[u32], hist: &[u32], v: u32| -> f64 {
        let e = (usage[v as usize] + hist[v as usize]).min(60);
        params.alpha.powi(e as i32)
    };

    let mut order: Vec<usize> = (0..nvars).collect();
    for round in 0..params.max_rounds.max(1) {
        if round == 0 {
            // First pass in index order, ignoring congestion.
        } else {
            order.shuffle(&mut rng);
        }
        for &i in &order {
            for &v in &chains[i] {
                usage[v as usize] -= 1;
            }
            let tree = match steiner_mst(g, |v| weight(&usage, &hist, v), ts.get(i as u32)) {
                Ok(t) => t,
                Err(_) => return None, // disconnected terminals
            };
            for &v in &tree {
                usage[v as usize] += 1;
            }
            chains[i] = tree;
        }
        let disjoint = usage.iter().all(|&u| u <= 1);
        let fits = chains.iter().all(|c| c.len() <= m);
        if disjoint && fits {
            return Some(
                chains
                    .into_iter()
                    .enumerate()
                    .map(|(i, c)| (i as u32, c))
                    .collect(),
            );
        }
        // Escalate history on conflicted vertices and on chains that blew
        // the size cap, so later rounds negotiate around both.
        for v in 0..n {
            if usage[v] >= 2 {
                hist[v] += 1;
            }
        }
        for c in &chains {
            if c.len() > m {
                for &v in c {
                    hist[v as usize] += 1;
                }
            }
        }
    }
    None
}

/// Outcome of the chain-size binary search.
#[derive(Debug, Clone)]
pub struct RouteSearch {
    /// Best routing found, if any cap admitted one.
    pub chains: Option<Chains>,
    /// Its maximal chain size.
    pub max_chain: Option<usize>,
    /// The LP-certified lower bound on the minimal possible max chain.
    /// Heuristic routing failures never tighten this, only the bracket.
    pub certified_lower: usize,
    /// Every `(m, succeeded)` probe in order.
    pub history: Vec<(usize, bool)>,
}

/// Binary-search the smallest chain-size cap the router can satisfy,
/// starting from the relaxation lower bound. The returned bound data keep
/// certified and heuristic information separate.
pub fn optimal_route_search(
    g: &SimpleGraph,
    ts: &TerminalSets,
    seed: u64,
) -> Result<RouteSearch, EmbedError> {
    ts.validate(g)?;
    let bounds = bcr_lower_bound(g, ts)?;
    let certified_lower = bounds.global.max(ts.max_terminals());
    let nv = g.num_vertices();
    let mut history = Vec::new();
    let mut best: Option<(usize, Chains)> = None;

    let mut try_m = |m: usize, history: &mut Vec<(usize, bool)>| -> bool {
        let got = route(g, ts, m, seed);
        history.push((m, got.is_some()));
        if let Some(chains) = got {
            let realized = chains.values().map(|c| c.len()).max().unwrap_or(0);
            if best.as_ref().is_none_or(|(b, _)| realized < *b) {
                best = Some((realized, chains));
            }
            true
        } else {
            false
        }
    };

    // Probe the certified bound first; on failure grow the cap
    // geometrically (clamped to the vertex count) to bracket, then bisect.
    let mut lo = certified_lower.max(1);
    if !try_m(lo, &mut history) {
        let mut bracketed = None;
        let mut m = lo;
        while m < nv {
            m = (m * 2).min(nv);
            if try_m(m, &mut history) {
                bracketed = Some(m);
                break;
            }
            lo = m + 1; // heuristic bracket only
        }
        match bracketed {
            None => {
                return Ok(RouteSearch {
                    chains: None,
                    max_chain: None,
                    certified_lower,
                    history,
                })
            }
            Some(mut hi) => {
                while lo < hi {
                    let mid = lo + (hi - lo) / 2;
                    if try_m(mid, &mut history) {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
            }
        }
    }
    let (max_chain, chains) = best.expect("search succeeded at least once");
    Ok(RouteSearch {
        chains: Some(chains),
        max_chain: Some(max_chain),
        certified_lower,
        history,
    })
}
