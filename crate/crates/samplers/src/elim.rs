//! Variable elimination orders and their induced width.

use std::collections::BTreeSet;

use ising_core::{IsingModel, Scalar};

use crate::error::SamplerError;

/// Largest induced width the exact solvers accept; tables then hold at most
/// 2^(WIDTH_BUDGET + 1) entries.
pub const WIDTH_BUDGET: usize = 22;

/// A permutation of a model's variables together with the width it induces
/// on the model's interaction graph (the largest number of still-uneliminated
/// neighbors any variable has when its turn comes, counting fill edges).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationOrder {
    order: Vec<u32>,
    width: usize,
}

impl EliminationOrder {
    /// Wrap an explicit order, validating it against the model and
    /// computing the induced width.
    pub fn explicit<T: Scalar>(
        model: &IsingModel<T>,
        order: Vec<u32>,
    ) -> Result<Self, SamplerError> {
        let n = model.num_vars();
        validate_permutation(&order, n)?;
        let width = induced_width(&adjacency(model), &order);
        Ok(EliminationOrder { order, width })
    }

    /// Greedy min-fill order: repeatedly eliminate the variable whose
    /// elimination adds the fewest fill edges (ties: smaller current degree,
    /// then smaller id). Deterministic.
    pub fn min_fill<T: Scalar>(model: &IsingModel<T>) -> Self {
        let mut adj = adjacency(model);
        let n = adj.len();
        let mut remaining: BTreeSet<u32> = (0..n as u32).collect();
        let mut order = Vec::with_capacity(n);
        let mut width = 0usize;
        while let Some(&pick) = remaining
            .iter()
            .min_by_key(|&&v| {
                let nbrs: Vec<u32> = adj[v as usize].iter().copied().collect();
                let mut fill = 0usize;
                for (i, &a) in nbrs.iter().enumerate() {
                    for &b in &nbrs[i + 1..] {
                        if !adj[a as usize].contains(&b) {
                            fill += 1;
                        }
                    }
                }
                (fill, nbrs.len(), v)
            })
        {
            let nbrs: Vec<u32> = adj[pick as usize].iter().copied().collect();
            width = width.max(nbrs.len());
            for (i, &a) in nbrs.iter().enumerate() {
                for &b in &nbrs[i + 1..] {
                    adj[a as usize].insert(b);
                    adj[b as usize].insert(a);
                }
            }
            for &a in &nbrs {
                adj[a as usize].remove(&pick);
            }
            adj[pick as usize].clear();
            remaining.remove(&pick);
            order.push(pick);
        }
        EliminationOrder { order, width }
    }

    pub fn order(&self) -> &[u32] {
        &self.order
    }

    pub fn width(&self) -> usize {
        self.width
    }
}

fn validate_permutation(order: &[u32], n: usize) -> Result<(), SamplerError> {
    if order.len() != n {
        return Err(SamplerError::BadOrder(format!(
            "order lists {} variables, model has {n}",
            order.len()
        )));
    }
    let mut seen = vec![false; n];
    for &v in order {
        if v as usize >= n {
            return Err(SamplerError::BadOrder(format!(
                "variable {v} out of range for {n} variables"
            )));
        }
        if seen[v as usize] {
            return Err(SamplerError::BadOrder(format!("variable {v} repeated")));
        }
        seen[v as usize] = true;
    }
    Ok(())
}

/// Interaction graph of a model: an edge per nonzero coupler.
fn adjacency<T: Scalar>(model: &IsingModel<T>) -> Vec<BTreeSet<u32>> {
    let mut adj = vec![BTreeSet::new(); model.num_vars()];
    for (i, j, v) in model.quadratic() {
        if v != T::zero() {
            adj[i as usize].insert(j);
            adj[j as usize].insert(i);
        }
    }
    adj
}

/// Width induced by eliminating along `order` (simulates fill).
fn induced_width(adj: &[BTreeSet<u32>], order: &[u32]) -> usize {
    let mut adj = adj.to_vec();
    let mut width = 0usize;
    for &v in order {
        let nbrs: Vec<u32> = adj[v as usize].iter().copied().collect();
        width = width.max(nbrs.len());
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                adj[a as usize].insert(b);
                adj[b as usize].insert(a);
            }
        }
        for &a in &nbrs {
            adj[a as usize].remove(&v);
        }
        adj[v as usize].clear();
    }
    width
}

/// Recompute the width of `order` against `model` and enforce the budget.
/// The stored width is advisory; exact solvers trust only this check.
pub(crate) fn checked_width<T: Scalar>(
    model: &IsingModel<T>,
    order: &[u32],
) -> Result<usize, SamplerError> {
    validate_permutation(order, model.num_vars())?;
    let width = induced_width(&adjacency(model), order);
    if width > WIDTH_BUDGET {
        return Err(SamplerError::WidthExceeded { width, budget: WIDTH_BUDGET });
    }
    Ok(width)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> IsingModel<f64> {
        let mut m = IsingModel::new(n);
        for i in 0..n - 1 {
            m.set_j(i as u32, i as u32 + 1, 1.0).unwrap();
        }
        m
    }

    #[test]
    fn min_fill_on_a_path_has_width_one() {
        let o = EliminationOrder::min_fill(&path(9));
        assert_eq!(o.width(), 1);
        assert_eq!(o.order().len(), 9);
    }

    #[test]
    fn min_fill_on_a_cycle_has_width_two() {
        let mut m = path(6);
        m.set_j(0, 5, 1.0).unwrap();
        let o = EliminationOrder::min_fill(&m);
        assert_eq!(o.width(), 2);
    }

    #[test]
    fn min_fill_on_a_clique_has_width_n_minus_one() {
        let mut m = IsingModel::new(5);
        for i in 0..5u32 {
            for j in i + 1..5 {
                m.set_j(i, j, -1.0).unwrap();
            }
        }
        assert_eq!(EliminationOrder::min_fill(&m).width(), 4);
    }

    #[test]
    fn explicit_order_width_depends_on_sequence() {
        // Star: center 0. Eliminating the center first connects all leaves.
        let mut m = IsingModel::new(5);
        for leaf in 1..5u32 {
            m.set_j(0, leaf, 1.0).unwrap();
        }
        let center_first = EliminationOrder::explicit(&m, vec![0, 1, 2, 3, 4]).unwrap();
        assert_eq!(center_first.width(), 4);
        let leaves_first = EliminationOrder::explicit(&m, vec![1, 2, 3, 4, 0]).unwrap();
        assert_eq!(leaves_first.width(), 1);
        assert_eq!(EliminationOrder::min_fill(&m).width(), 1);
    }

    #[test]
    fn bad_permutations_are_rejected() {
        let m = path(3);
        assert!(EliminationOrder::explicit(&m, vec![0, 1]).is_err());
        assert!(EliminationOrder::explicit(&m, vec![0, 1, 1]).is_err());
        assert!(EliminationOrder::explicit(&m, vec![0, 1, 3]).is_err());
    }
}
