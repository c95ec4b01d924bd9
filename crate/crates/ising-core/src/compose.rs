use std::collections::{BTreeMap, BTreeSet};

use crate::{IsingError, IsingModel, ParameterBounds, Scalar, SimpleGraph};

/// Chains of an embedding: logical variable id → the set of hardware
/// vertices representing it.
pub type ChainMap = BTreeMap<u32, BTreeSet<u32>>;

/// Result of composing penalty parts and chains into one hardware model.
#[derive(Debug, Clone)]
pub struct Composed<T: Scalar = f64> {
    pub model: IsingModel<T>,
    /// Uniform factor applied to pull coefficients inside the bounds
    /// (1 when nothing had to shrink).
    pub scale_factor: T,
    /// Ferromagnetic chain edges, per logical variable.
    pub chain_edges: BTreeMap<u32, Vec<(u32, u32)>>,
}

/// Compose per-constraint penalty models (already relocated onto hardware
/// vertex ids) with chain couplings of strength `alpha` into a single model
/// over the hardware graph.
///
/// Each chain contributes `-alpha` on the edges of a spanning tree of its
/// induced subgraph, plus `+alpha` to the offset per tree edge, so an
/// unbroken chain adds zero energy and the feasible level of the parts is
/// preserved. If any resulting coefficient leaves `bounds`, every `h`, `J`,
/// and the offset are rescaled by the single largest factor that restores
/// feasibility, and that factor is reported.
///
/// Errors: parts overlapping on a vertex, parts using non-edges, chains
/// overlapping each other, or a chain whose induced subgraph is
/// disconnected.
pub fn compose_embedded<T: Scalar>(
    parts: &[IsingModel<T>],
    chains: &ChainMap,
    graph: &SimpleGraph,
    alpha: T,
    bounds: &ParameterBounds<T>,
) -> Result<Composed<T>, IsingError> {
    bounds.validate()?;
    let n = graph.num_vertices();
    let mut owner: BTreeMap<u32, usize> = BTreeMap::new();
    for (idx, p) in parts.iter().enumerate() {
        if p.num_vars() != n {
            return Err(IsingError::ConfigLength(p.num_vars(), n));
        }
        for v in p.support() {
            if let Some(&prev) = owner.get(&v) {
                return Err(IsingError::PartOverlap(prev, idx, v));
            }
            owner.insert(v, idx);
        }
        for (i, j, _) in p.quadratic() {
            if !graph.has_edge(i, j) {
                return Err(IsingError::PartEdgeMissing(idx, i, j));
            }
        }
    }

    let mut vertex_chain: BTreeMap<u32, u32> = BTreeMap::new();
    for (&var, chain) in chains {
        for &q in chain {
            if q as usize >= n {
                return Err(IsingError::VertexOutOfRange(q, n));
            }
            if let Some(&prev) = vertex_chain.get(&q) {
                return Err(IsingError::ChainOverlap(prev, var, q));
            }
            vertex_chain.insert(q, var);
        }
    }

    let mut model = IsingModel::new(n);
    for p in parts {
        model.add_model(p)?;
    }

    let mut chain_edges = BTreeMap::new();
    for (&var, chain) in chains {
        let tree = graph
            .spanning_tree(chain)
            .ok_or(IsingError::ChainDisconnected(var))?;
        for &(a, b) in &tree {
            model.add_j(a, b, -alpha)?;
            model.add_offset(alpha);
        }
        chain_edges.insert(var, tree);
    }

    let (model, scale_factor) = model.rescaled_into(bounds);
    Ok(Composed { model, scale_factor, chain_edges })
}
