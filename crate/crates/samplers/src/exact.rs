//! Exact solvers by bucket elimination: minimum energy with exhaustive
//! ground-state enumeration (min-sum), and Boltzmann marginals with log Z
//! (sum-product over a calibrated bucket tree). Both work in time and
//! memory exponential only in the induced width of the elimination order.

use std::collections::BTreeMap;

use ising_core::{IsingModel, SpinConfig};

use crate::elim::{checked_width, EliminationOrder};
use crate::error::SamplerError;
use crate::table::{Reduce, Table};

/// Ground-state enumeration stops after this many configurations.
pub const GROUND_STATE_CAP: usize = 1_000_000;

/// Exact minimum energy and the configurations attaining it.
#[derive(Debug, Clone)]
pub struct GroundStates {
    pub min_energy: f64,
    /// All optimal configurations, capped at [`GROUND_STATE_CAP`].
    pub states: Vec<SpinConfig>,
    /// True when the cap cut the enumeration short.
    pub truncated: bool,
}

/// Exact Boltzmann quantities at one temperature.
#[derive(Debug, Clone)]
pub struct Marginals {
    /// log of the partition function Σ_z e^{−E(z)/T} (offset included).
    pub log_z: f64,
    /// Per variable: [p(z = −1), p(z = +1)].
    pub unary: Vec<[f64; 2]>,
    /// Per coupler (i, j) with i < j: p(z_i, z_j) indexed by
    /// `(z_i == +1) as usize | ((z_j == +1) as usize) << 1`.
    pub pairwise: BTreeMap<(u32, u32), [f64; 4]>,
}

/// One bucket of the elimination run: the combined table before its
/// variable was summed/minimized out, and where the resulting message went.
struct Bucket {
    /// ψ over {v} ∪ (later-eliminated neighbors); includes received messages.
    psi: Table,
    /// The message min/sum-eliminated out of ψ (empty-scope messages are
    /// folded into the base constant instead).
    message: Option<Table>,
    /// Elimination position of the bucket the message was sent to.
    parent: Option<usize>,
}

/// Shared forward pass. Factors are handed out to the bucket of their
/// earliest-eliminated variable; each bucket combines its factors plus any
/// received messages, then eliminates its variable. Returns the buckets (in
/// elimination order) and the sum of the empty-scope root messages.
fn forward(
    model: &IsingModel<f64>,
    order: &[u32],
    factor: impl Fn(&dyn FactorSpec) -> Table,
    reduce: Reduce,
) -> (Vec<Bucket>, f64) {
    let n = model.num_vars();
    let mut pos = vec![0usize; n];
    for (p, &v) in order.iter().enumerate() {
        pos[v as usize] = p;
    }

    // Distribute original factors to buckets by earliest variable.
    let mut pending: Vec<Vec<Table>> = (0..n).map(|_| Vec::new()).collect();
    for (i, h) in model.linear() {
        if h != 0.0 {
            pending[pos[i as usize]].push(factor(&Unary(i, h)));
        }
    }
    for (i, j, jj) in model.quadratic() {
        if jj != 0.0 {
            let p = pos[i as usize].min(pos[j as usize]);
            pending[p].push(factor(&Pair(i, j, jj)));
        }
    }

    let mut buckets: Vec<Bucket> = Vec::with_capacity(n);
    let mut base = 0.0;
    for (p, &v) in order.iter().enumerate() {
        // Start from a neutral table over {v} so v is always in scope.
        let mut psi = Table::unary(v, 0.0, 0.0);
        for t in pending[p].drain(..) {
            psi = psi.combine(&t);
        }
        let msg = psi.eliminate(v, reduce);
        let (message, parent) = if msg.vars().is_empty() {
            base += msg.values()[0];
            (None, None)
        } else {
            let dest = msg
                .vars()
                .iter()
                .map(|&u| pos[u as usize])
                .min()
                .expect("nonempty scope");
            (Some(msg), Some(dest))
        };
        if let (Some(m), Some(dest)) = (&message, parent) {
            pending[dest].push(m.clone());
        }
        buckets.push(Bucket { psi, message, parent });
    }
    (buckets, base)
}

/// Minimal factor description so one `forward` serves both semirings.
trait FactorSpec {
    fn to_energy(&self) -> Table;
    fn to_log_potential(&self, t: f64) -> Table;
}
struct Unary(u32, f64);
struct Pair(u32, u32, f64);
impl FactorSpec for Unary {
    fn to_energy(&self) -> Table {
        Table::unary(self.0, -self.1, self.1)
    }
    fn to_log_potential(&self, t: f64) -> Table {
        Table::unary(self.0, self.1 / t, -self.1 / t)
    }
}
impl FactorSpec for Pair {
    fn to_energy(&self) -> Table {
        let jj = self.2;
        Table::binary(self.0, self.1, move |a, b| jj * (a * b) as f64)
    }
    fn to_log_potential(&self, t: f64) -> Table {
        let jj = self.2;
        Table::binary(self.0, self.1, move |a, b| -jj * (a * b) as f64 / t)
    }
}

fn resolve_order(
    model: &IsingModel<f64>,
    order: Option<&EliminationOrder>,
) -> Result<Vec<u32>, SamplerError> {
    let order = match order {
        Some(o) => o.order().to_vec(),
        None => EliminationOrder::min_fill(model).order().to_vec(),
    };
    checked_width(model, &order)?;
    Ok(order)
}

/// Exact minimum energy and every configuration attaining it (up to
/// [`GROUND_STATE_CAP`]), by min-sum bucket elimination along `order`
/// (min-fill when `None`). Errors when the induced width exceeds
/// [`crate::WIDTH_BUDGET`].
pub fn exact_ground_states(
    model: &IsingModel<f64>,
    order: Option<&EliminationOrder>,
) -> Result<GroundStates, SamplerError> {
    let n = model.num_vars();
    if n == 0 {
        return Ok(GroundStates {
            min_energy: model.offset(),
            states: vec![Vec::new()],
            truncated: false,
        });
    }
    let order = resolve_order(model, order)?;
    let (buckets, base) = forward(model, &order, |f| f.to_energy(), Reduce::Min);
    let min_energy = base + model.offset();

    // Enumerate all minimizers: walk variables in reverse elimination order;
    // at each bucket both spins attaining the restricted minimum branch.
    // The entries compared are two values of the same table, so exact
    // equality is the correct tie test.
    let mut assign: Vec<i8> = vec![0; n];
    let mut states: Vec<SpinConfig> = Vec::new();
    let mut truncated = false;
    // Iterative DFS: stack of (depth, spin-to-apply).
    let mut stack: Vec<(usize, i8)> = Vec::new();
    let depth_var = |d: usize| order[n - 1 - d];
    let push_choices = |stack: &mut Vec<(usize, i8)>, assign: &[i8], d: usize| {
        let v = depth_var(d);
        let psi = &buckets[n - 1 - d].psi;
        let idx = |s: i8| {
            psi.index_where(|u| if u == v { s == 1 } else { assign[u as usize] == 1 })
        };
        let (e_minus, e_plus) = (psi.values()[idx(-1)], psi.values()[idx(1)]);
        let best = e_minus.min(e_plus);
        // Deeper-stacked spins pop later; push +1 first so −1 explores first.
        if e_plus == best {
            stack.push((d, 1));
        }
        if e_minus == best {
            stack.push((d, -1));
        }
    };
    push_choices(&mut stack, &assign, 0);
    while let Some((d, s)) = stack.pop() {
        assign[depth_var(d) as usize] = s;
        if d + 1 == n {
            if states.len() == GROUND_STATE_CAP {
                truncated = true;
                break;
            }
            states.push(assign.clone());
        } else {
            push_choices(&mut stack, &assign, d + 1);
        }
    }
    Ok(GroundStates { min_energy, states, truncated })
}

/// Exact Boltzmann marginals and log Z at temperature `t` by sum-product
/// bucket elimination (log-space throughout) followed by a downward
/// calibration pass. `t` must be positive; width budget as in
/// [`exact_ground_states`].
pub fn exact_boltzmann_marginals(
    model: &IsingModel<f64>,
    t: f64,
    order: Option<&EliminationOrder>,
) -> Result<Marginals, SamplerError> {
    if !t.is_finite() || t <= 0.0 {
        return Err(SamplerError::InvalidParam(format!(
            "temperature must be positive and finite, got {t}"
        )));
    }
    let n = model.num_vars();
    if n == 0 {
        return Ok(Marginals {
            log_z: -model.offset() / t,
            unary: Vec::new(),
            pairwise: BTreeMap::new(),
        });
    }
    let order = resolve_order(model, order)?;
    let (buckets, base) = forward(model, &order, |f| f.to_log_potential(t), Reduce::LogSumExp);
    let log_z = base - model.offset() / t;

    // Downward calibration: the belief of a root bucket is its ψ; any other
    // bucket v gets β_v = ψ_v + (marginal of β_parent onto the sepset minus
    // the upward message λ_v). Parents are eliminated later, so a reverse
    // sweep has every parent ready.
    let mut beliefs: Vec<Option<Table>> = vec![None; n];
    for p in (0..n).rev() {
        let b = match (&buckets[p].message, buckets[p].parent) {
            (Some(msg), Some(par)) => {
                let parent_belief = beliefs[par].as_ref().expect("parent computed first");
                let down = parent_belief
                    .marginal_onto(msg.vars())
                    .combine(&msg.negated());
                buckets[p].psi.combine(&down)
            }
            _ => buckets[p].psi.clone(),
        };
        beliefs[p] = Some(b);
    }

    let mut pos = vec![0usize; n];
    for (p, &v) in order.iter().enumerate() {
        pos[v as usize] = p;
    }
    let normalized = |t: &Table| -> Vec<f64> {
        let z = t.total_lse();
        t.values().iter().map(|&x| (x - z).exp()).collect()
    };

    let mut unary = vec![[0.0, 0.0]; n];
    for v in 0..n as u32 {
        let b = beliefs[pos[v as usize]].as_ref().unwrap();
        let m = normalized(&b.marginal_onto(&[v]));
        unary[v as usize] = [m[0], m[1]];
    }
    let mut pairwise = BTreeMap::new();
    for (i, j, jj) in model.quadratic() {
        if jj == 0.0 {
            continue;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        // The coupler's factor was filed in the earlier-eliminated
        // endpoint's bucket, so that belief covers both variables.
        let p = pos[i as usize].min(pos[j as usize]);
        let bel = beliefs[p].as_ref().unwrap();
        let m = normalized(&bel.marginal_onto(&[a, b]));
        pairwise.insert((a, b), [m[0], m[1], m[2], m[3]]);
    }
    Ok(Marginals { log_z, unary, pairwise })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_spin_with_positive_field_grounds_at_minus_one() {
        let mut m = IsingModel::new(1);
        m.set_h(0, 1.0).unwrap();
        let gs = exact_ground_states(&m, None).unwrap();
        assert_eq!(gs.min_energy, -1.0);
        assert_eq!(gs.states, vec![vec![-1]]);
        assert!(!gs.truncated);
    }

    #[test]
    fn ferromagnetic_pair_has_two_aligned_ground_states() {
        let mut m = IsingModel::new(2);
        m.set_j(0, 1, -1.0).unwrap();
        let gs = exact_ground_states(&m, None).unwrap();
        assert_eq!(gs.min_energy, -1.0);
        assert_eq!(gs.states, vec![vec![-1, -1], vec![1, 1]]);
    }

    #[test]
    fn zero_model_marginals_are_uniform() {
        let m = IsingModel::new(3);
        let mg = exact_boltzmann_marginals(&m, 1.0, None).unwrap();
        for u in &mg.unary {
            assert!((u[0] - 0.5).abs() < 1e-12);
            assert!((u[1] - 0.5).abs() < 1e-12);
        }
        // Z = 2^3.
        assert!((mg.log_z - (8.0f64).ln()).abs() < 1e-12);
        assert!(mg.pairwise.is_empty());
    }

    #[test]
    fn single_spin_marginal_matches_closed_form() {
        let (h, t) = (0.7, 1.3);
        let mut m = IsingModel::new(1);
        m.set_h(0, h).unwrap();
        let mg = exact_boltzmann_marginals(&m, t, None).unwrap();
        let z = (h / t).exp() + (-h / t).exp();
        assert!((mg.unary[0][0] - (h / t).exp() / z).abs() < 1e-12);
        assert!((mg.unary[0][1] - (-h / t).exp() / z).abs() < 1e-12);
        assert!((mg.log_z - z.ln()).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_temperature_is_rejected() {
        let m = IsingModel::new(1);
        assert!(exact_boltzmann_marginals(&m, 0.0, None).is_err());
        assert!(exact_boltzmann_marginals(&m, -1.0, None).is_err());
        assert!(exact_boltzmann_marginals(&m, f64::NAN, None).is_err());
    }

    #[test]
    fn empty_model_has_one_empty_ground_state() {
        let mut m = IsingModel::new(0);
        m.set_offset(2.5);
        let gs = exact_ground_states(&m, None).unwrap();
        assert_eq!(gs.min_energy, 2.5);
        assert_eq!(gs.states, vec![Vec::<i8>::new()]);
    }
}
