use std::collections::{BTreeSet, VecDeque};

use crate::IsingError;

/// An undirected simple graph over dense vertex ids `0..n`.
///
/// Adjacency lists are kept sorted so traversals are deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<Vec<u32>>,
    edges: BTreeSet<(u32, u32)>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        SimpleGraph {
            adj: vec![Vec::new(); n],
            edges: BTreeSet::new(),
        }
    }

    /// Build from an edge list; vertex count is `n`.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, IsingError> {
        let mut g = SimpleGraph::new(n);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn add_edge(&mut self, a: u32, b: u32) -> Result<(), IsingError> {
        let n = self.adj.len();
        if a as usize >= n {
            return Err(IsingError::VertexOutOfRange(a, n));
        }
        if b as usize >= n {
            return Err(IsingError::VertexOutOfRange(b, n));
        }
        if a == b {
            return Err(IsingError::InvalidEdge(a, b, "self-loop"));
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if self.edges.insert(key) {
            self.adj[a as usize].push(b);
            self.adj[b as usize].push(a);
            self.adj[a as usize].sort_unstable();
            self.adj[b as usize].sort_unstable();
        }
        Ok(())
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edges.contains(&key)
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    /// Edges as `(i, j)` with `i < j`, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    /// Edges with both endpoints inside `set`.
    pub fn induced_edges(&self, set: &BTreeSet<u32>) -> Vec<(u32, u32)> {
        self.edges
            .iter()
            .copied()
            .filter(|&(a, b)| set.contains(&a) && set.contains(&b))
            .collect()
    }

    /// Is the subgraph induced by `set` connected? Empty sets count as
    /// connected, singletons always are.
    pub fn is_connected_subset(&self, set: &BTreeSet<u32>) -> bool {
        let Some(&start) = set.iter().next() else {
            return true;
        };
        let mut seen = BTreeSet::new();
        seen.insert(start);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if set.contains(&w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == set.len()
    }

    /// BFS spanning tree edges of the subgraph induced by `set`, rooted at
    /// the smallest vertex. Returns `None` if the subgraph is disconnected.
    pub fn spanning_tree(&self, set: &BTreeSet<u32>) -> Option<Vec<(u32, u32)>> {
        let Some(&start) = set.iter().next() else {
            return Some(Vec::new());
        };
        let mut seen = BTreeSet::new();
        seen.insert(start);
        let mut queue = VecDeque::from([start]);
        let mut tree = Vec::new();
        while let Some(v) = queue.pop_front() {
            for &w in self.neighbors(v) {
                if set.contains(&w) && seen.insert(w) {
                    tree.push(if v < w { (v, w) } else { (w, v) });
                    queue.push_back(w);
                }
            }
        }
        if seen.len() == set.len() {
            Some(tree)
        } else {
            None
        }
    }
}

/// Coordinates of a Chimera vertex: cell row, cell column, shore (0 or 1),
/// and index within the shore.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChimeraCoord {
    pub row: u32,
    pub col: u32,
    pub shore: u32,
    pub k: u32,
}

/// A Chimera hardware graph: an `m × n` grid of complete bipartite
/// `K_{l,l}` cells. Shore-0 vertices couple to the same shore index in the
/// vertically adjacent cells; shore-1 vertices couple horizontally.
///
/// Vertex ids are dense over the *full* grid (`m·n·2l` ids); dead vertices
/// keep their id but carry no edges, so chains and placements can never
/// touch them through the graph.
#[derive(Debug, Clone)]
pub struct HardwareGraph {
    pub m: u32,
    pub n: u32,
    pub l: u32,
    dead: BTreeSet<u32>,
    graph: SimpleGraph,
}

/// Build a Chimera graph with the given grid shape, shore size, and dead
/// vertex set.
pub fn chimera(m: u32, n: u32, l: u32, dead: &[u32]) -> Result<HardwareGraph, IsingError> {
    if m == 0 || n == 0 || l == 0 {
        return Err(IsingError::InvalidBounds(
            "chimera dimensions must be positive".to_string(),
        ));
    }
    let total = (m * n * 2 * l) as usize;
    let dead: BTreeSet<u32> = dead.iter().copied().collect();
    if let Some(&v) = dead.iter().next_back() {
        if v as usize >= total {
            return Err(IsingError::VertexOutOfRange(v, total));
        }
    }
    let idx = |r: u32, c: u32, shore: u32, k: u32| ((r * n + c) * 2 + shore) * l + k;
    let alive = |v: u32| !dead.contains(&v);
    let mut g = SimpleGraph::new(total);
    for r in 0..m {
        for c in 0..n {
            // Intra-cell complete bipartite couplings.
            for a in 0..l {
                for b in 0..l {
                    let (u, v) = (idx(r, c, 0, a), idx(r, c, 1, b));
                    if alive(u) && alive(v) {
                        g.add_edge(u, v)?;
                    }
                }
            }
            // Inter-cell like-shore couplings.
            if r + 1 < m {
                for k in 0..l {
                    let (u, v) = (idx(r, c, 0, k), idx(r + 1, c, 0, k));
                    if alive(u) && alive(v) {
                        g.add_edge(u, v)?;
                    }
                }
            }
            if c + 1 < n {
                for k in 0..l {
                    let (u, v) = (idx(r, c, 1, k), idx(r, c + 1, 1, k));
                    if alive(u) && alive(v) {
                        g.add_edge(u, v)?;
                    }
                }
            }
        }
    }
    Ok(HardwareGraph { m, n, l, dead, graph: g })
}

impl HardwareGraph {
    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    /// Total id space, dead vertices included.
    pub fn num_sites(&self) -> usize {
        self.graph.num_vertices()
    }

    /// Number of usable vertices.
    pub fn num_alive(&self) -> usize {
        self.num_sites() - self.dead.len()
    }

    pub fn is_alive(&self, v: u32) -> bool {
        (v as usize) < self.num_sites() && !self.dead.contains(&v)
    }

    pub fn dead(&self) -> &BTreeSet<u32> {
        &self.dead
    }

    pub fn index(&self, c: ChimeraCoord) -> u32 {
        ((c.row * self.n + c.col) * 2 + c.shore) * self.l + c.k
    }

    pub fn coord(&self, v: u32) -> ChimeraCoord {
        let l = self.l;
        let k = v % l;
        let rest = v / l;
        let shore = rest % 2;
        let cell = rest / 2;
        ChimeraCoord {
            row: cell / self.n,
            col: cell % self.n,
            shore,
            k,
        }
    }

    /// All vertices of the cell at `(row, col)`, shore 0 first.
    pub fn cell_vertices(&self, row: u32, col: u32) -> Vec<u32> {
        let mut vs = Vec::with_capacity(2 * self.l as usize);
        for shore in 0..2 {
            for k in 0..self.l {
                vs.push(self.index(ChimeraCoord { row, col, shore, k }));
            }
        }
        vs
    }
}
