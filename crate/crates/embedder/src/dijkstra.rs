//! Vertex-weighted multi-source shortest paths.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use ising_core::SimpleGraph;

/// Max-heap entry ordered so the smallest (cost, vertex) pops first.
struct Entry {
    cost: f64,
    v: u32,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cost == other.cost && self.v == other.v
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want the cheapest first,
        // ties broken toward the smaller vertex id for determinism.
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.v.cmp(&self.v))
    }
}

/// Shortest-path distances where the cost of a path is the sum of
/// `weight(v)` over every vertex it *enters* (source vertices cost
/// nothing). Vertices with infinite weight are impassable. Returns
/// `(dist, parent)`; unreachable vertices have infinite distance and
/// `parent == u32::MAX` (sources are their own parent).
pub fn vertex_dijkstra<W>(
    g: &SimpleGraph,
    sources: impl IntoIterator<Item = u32>,
    weight: W,
) -> (Vec<f64>, Vec<u32>)
where
    W: Fn(u32) -> f64,
{
    let n = g.num_vertices();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![u32::MAX; n];
    let mut heap = BinaryHeap::new();
    for s in sources {
        debug_assert!((s as usize) < n);
        if dist[s as usize] > 0.0 {
            dist[s as usize] = 0.0;
            parent[s as usize] = s;
            heap.push(Entry { cost: 0.0, v: s });
        }
    }
    while let Some(Entry { cost, v }) = heap.pop() {
        if cost > dist[v as usize] {
            continue;
        }
        for &u in g.neighbors(v) {
            let w = weight(u);
            if !w.is_finite() {
                continue;
            }
            let next = cost + w;
            if next < dist[u as usize] {
                dist[u as usize] = next;
                parent[u as usize] = v;
                heap.push(Entry { cost: next, v: u });
            }
        }
    }
    (dist, parent)
}
