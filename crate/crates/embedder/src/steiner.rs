//! Weighted Steiner-tree approximation and an exact oracle for testing.

use std::collections::BTreeSet;

use ising_core::SimpleGraph;

use crate::dijkstra::vertex_dijkstra;
use crate::error::EmbedError;

/// Approximately minimal Steiner tree for `terminals` under vertex
/// weights: distance-network heuristic (metric-closure MST over the
/// terminals, paths expanded, re-spanned, and pruned). With uniform
/// weights the result has at most twice the optimal number of vertices.
/// Returns the vertex set of the tree. Deterministic: all ties break
/// toward smaller vertex ids.
pub fn steiner_mst<W>(
    g: &SimpleGraph,
    weight: W,
    terminals: &BTreeSet<u32>,
) -> Result<BTreeSet<u32>, EmbedError>
where
    W: Fn(u32) -> f64,
{
    let n = g.num_vertices();
    if terminals.is_empty() {
        return Err(EmbedError::BadSpec("empty terminal set".into()));
    }
    if let Some(&v) = terminals.iter().find(|&&v| v as usize >= n) {
        return Err(EmbedError::UnknownVertex { v, n });
    }
    let ts: Vec<u32> = terminals.iter().copied().collect();
    if ts.len() == 1 {
        return Ok(terminals.clone());
    }

    // Single-source searches from each terminal.
    let runs: Vec<(Vec<f64>, Vec<u32>)> = ts
        .iter()
        .map(|&t| vertex_dijkstra(g, [t], &weight))
        .collect();

    // Prim over the terminal metric closure; expand each chosen closure
    // edge into its underlying path immediately.
    let mut in_tree = vec![false; ts.len()];
    in_tree[0] = true;
    let mut union: BTreeSet<u32> = BTreeSet::new();
    union.insert(ts[0]);
    for _ in 1..ts.len() {
        let mut best: Option<(f64, usize, usize)> = None; // (dist, from, to)
        for (i, &_ti) in ts.iter().enumerate() {
            if !in_tree[i] {
                continue;
            }
            for (j, &tj) in ts.iter().enumerate() {
                if in_tree[j] {
                    continue;
                }
                let d = runs[i].0[tj as usize];
                let cand = (d, i, j);
                if best.is_none_or(|b| (cand.0, cand.1, cand.2) < (b.0, b.1, b.2)) {
                    best = Some(cand);
                }
            }
        }
        let (d, from, to) = best.expect("some terminal remains unattached");
        if !d.is_finite() {
            return Err(EmbedError::DisconnectedTerminals { var: ts[to] });
        }
        // Walk parents from ts[to] back to ts[from].
        let parent = &runs[from].1;
        let mut v = ts[to];
        loop {
            union.insert(v);
            if v == ts[from] {
                break;
            }
            v = parent[v as usize];
        }
        in_tree[to] = true;
    }

    // Re-span the union with a vertex-weighted Prim (attachment cost =
    // weight of the vertex joining the tree), then strip non-terminal
    // leaves to a fixpoint.
    let tree_edges = span_subset(g, &weight, &union);
    Ok(prune_leaves(&union, &tree_edges, terminals))
}

/// Spanning tree of the (connected) induced subgraph on `set`, grown from
/// the smallest vertex, attaching the cheapest vertex first.
fn span_subset<W>(g: &SimpleGraph, weight: &W, set: &BTreeSet<u32>) -> Vec<(u32, u32)>
where
    W: Fn(u32) -> f64,
{
    let mut edges = Vec::new();
    let mut joined = BTreeSet::new();
    let start = *set.iter().next().expect("nonempty set");
    joined.insert(start);
    // Frontier of candidate attachments (cost, new vertex, tree vertex).
    while joined.len() < set.len() {
        let mut best: Option<(f64, u32, u32)> = None;
        for &u in &joined {
            for &v in g.neighbors(u) {
                if set.contains(&v) && !joined.contains(&v) {
                    let cand = (weight(v), v, u);
                    if best.is_none_or(|b| (cand.0, cand.1, cand.2) < (b.0, b.1, b.2)) {
                        best = Some(cand);
                    }
                }
            }
        }
        let (_, v, u) = best.expect("union set is connected by construction");
        joined.insert(v);
        edges.push((u, v));
    }
    edges
}

/// Remove degree-one vertices outside `keep` from the tree, repeatedly.
fn prune_leaves(
    vertices: &BTreeSet<u32>,
    edges: &[(u32, u32)],
    keep: &BTreeSet<u32>,
) -> BTreeSet<u32> {
    let mut alive: BTreeSet<u32> = vertices.clone();
    let mut deg: std::collections::BTreeMap<u32, usize> = alive.iter().map(|&v| (v, 0)).collect();
    let mut adj: std::collections::BTreeMap<u32, Vec<u32>> = Default::default();
    for &(u, v) in edges {
        *deg.get_mut(&u).unwrap() += 1;
        *deg.get_mut(&v).unwrap() += 1;
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    let mut queue: Vec<u32> = alive
        .iter()
        .copied()
        .filter(|v| deg[v] == 1 && !keep.contains(v))
        .collect();
    while let Some(v) = queue.pop() {
        if !alive.remove(&v) {
            continue;
        }
        for u in adj.get(&v).cloned().unwrap_or_default() {
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

/// Exact minimal Steiner tree size in vertices (dynamic program over
/// terminal subsets with unit edge weights; a minimal vertex-count Steiner
/// subgraph is a tree, so vertices = edges + 1). Returns `None` when the
/// terminals are disconnected. Exponential in `|terminals|` only.
pub fn exact_steiner_vertices(g: &SimpleGraph, terminals: &BTreeSet<u32>) -> Option<usize> {
    let n = g.num_vertices();
    let ts: Vec<u32> = terminals.iter().copied().collect();
    let k = ts.len();
    assert!(k <= 12, "oracle restricted to few terminals");
    if k == 0 {
        return Some(0);
    }
    if k == 1 {
        return Some(1);
    }
    // All-pairs hop distances by BFS from every vertex.
    let inf = usize::MAX / 4;
    let mut hops = vec![vec![inf; n]; n];
    for s in 0..n {
        let row = &mut hops[s];
        row[s] = 0;
        let mut queue = std::collections::VecDeque::from([s as u32]);
        while let Some(v) = queue.pop_front() {
            let dv = row[v as usize];
            for &u in g.neighbors(v) {
                if row[u as usize] == inf {
                    row[u as usize] = dv + 1;
                    queue.push_back(u);
                }
            }
        }
    }
    let full = (1usize << k) - 1;
    // dp[mask][v] = min edges of a tree spanning {terminals in mask} ∪ {v}.
    let mut dp = vec![vec![inf; n]; full + 1];
    for (i, &t) in ts.iter().enumerate() {
        for v in 0..n {
            dp[1 << i][v] = hops[t as usize][v];
        }
    }
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        // Merge two subtrees at v.
        let low = mask & mask.wrapping_neg();
        let mut sub = (mask - 1) & mask;
        while sub != 0 {
            if sub & low != 0 {
                let rest = mask ^ sub;
                if rest != 0 {
                    // Three rows of `dp` are read/written at the same index;
                    // an iterator form would need split borrows for no gain.
                    #[allow(clippy::needless_range_loop)]
                    for v in 0..n {
                        let s = dp[sub][v].saturating_add(dp[rest][v]);
                        if s < dp[mask][v] {
                            dp[mask][v] = s;
                        }
                    }
                }
            }
            sub = (sub - 1) & mask;
        }
        // Extend by paths: dp[mask][v] = min_u dp[mask][u] + hops(u, v).
        let row: Vec<usize> = (0..n)
            .map(|v| {
                (0..n)
                    .map(|u| dp[mask][u].saturating_add(hops[u][v]))
                    .min()
                    .unwrap()
            })
            .collect();
        dp[mask] = row;
    }
    let best = (0..n).map(|v| dp[full][v]).min().unwrap();
    if best >= inf {
        None
    } else {
        Some(best + 1)
    }
}
