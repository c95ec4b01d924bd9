use std::collections::{BTreeMap, BTreeSet};

use crate::{IsingError, Spin};

/// A tuple over a constraint scope, bit-packed: bit `k` set means scope
/// variable `k` takes spin `+1` (boolean 1), clear means `-1` (boolean 0).
pub type Tuple = u64;

/// A full assignment of spins to CSP variables.
pub type Assignment = Vec<Spin>;

/// Pack spins into a [`Tuple`] (index 0 → bit 0).
pub fn spins_to_bits(spins: &[Spin]) -> Tuple {
    let mut t = 0u64;
    for (k, &s) in spins.iter().enumerate() {
        if s > 0 {
            t |= 1 << k;
        }
    }
    t
}

/// Unpack a [`Tuple`] into spins of length `len`.
pub fn bits_to_spins(t: Tuple, len: usize) -> Vec<Spin> {
    (0..len)
        .map(|k| if t >> k & 1 == 1 { 1 } else { -1 })
        .collect()
}

/// A constraint over spin variables, given extensionally: the set of
/// feasible tuples `F₁` and, for fault models, a disjoint set of faulty but
/// allowed tuples `F₂`. Tuples outside both sets are infeasible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    scope: Vec<u32>,
    feasible: BTreeSet<Tuple>,
    faulty: BTreeSet<Tuple>,
}

impl Constraint {
    pub fn new(scope: Vec<u32>, feasible: BTreeSet<Tuple>) -> Result<Self, IsingError> {
        Constraint::with_faulty(scope, feasible, BTreeSet::new())
    }

    pub fn with_faulty(
        scope: Vec<u32>,
        feasible: BTreeSet<Tuple>,
        faulty: BTreeSet<Tuple>,
    ) -> Result<Self, IsingError> {
        if scope.is_empty() || scope.len() > 63 {
            return Err(IsingError::BadConstraint(format!(
                "scope size {} unsupported",
                scope.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for &v in &scope {
            if !seen.insert(v) {
                return Err(IsingError::BadConstraint(format!(
                    "variable {v} repeated in scope"
                )));
            }
        }
        if feasible.is_empty() {
            return Err(IsingError::BadConstraint(
                "constraint has no feasible tuple".to_string(),
            ));
        }
        let limit = 1u64 << scope.len();
        for &t in feasible.iter().chain(faulty.iter()) {
            if t >= limit {
                return Err(IsingError::BadConstraint(format!(
                    "tuple {t:#b} wider than scope"
                )));
            }
        }
        if !feasible.is_disjoint(&faulty) {
            return Err(IsingError::BadConstraint(
                "feasible and faulty tuple sets overlap".to_string(),
            ));
        }
        Ok(Constraint { scope, feasible, faulty })
    }

    pub fn scope(&self) -> &[u32] {
        &self.scope
    }

    pub fn arity(&self) -> usize {
        self.scope.len()
    }

    pub fn feasible(&self) -> &BTreeSet<Tuple> {
        &self.feasible
    }

    pub fn faulty(&self) -> &BTreeSet<Tuple> {
        &self.faulty
    }

    /// Extract this constraint's tuple from a full assignment.
    pub fn project(&self, z: &[Spin]) -> Tuple {
        let mut t = 0u64;
        for (k, &v) in self.scope.iter().enumerate() {
            if z[v as usize] > 0 {
                t |= 1 << k;
            }
        }
        t
    }

    pub fn is_satisfied(&self, z: &[Spin]) -> bool {
        self.feasible.contains(&self.project(z))
    }

    pub fn is_faulty(&self, z: &[Spin]) -> bool {
        self.faulty.contains(&self.project(z))
    }

    /// Is the tuple allowed at all (feasible or faulty)?
    pub fn is_allowed(&self, z: &[Spin]) -> bool {
        let t = self.project(z);
        self.feasible.contains(&t) || self.faulty.contains(&t)
    }

    /// Values forced by the tuples consistent with `known` (fixed spins of
    /// scope variables). Returns `None` when no tuple is consistent
    /// (contradiction); otherwise the forced values for currently-unknown
    /// scope variables. Faulty tuples count as allowed, so a variable is
    /// forced only if every allowed completion agrees.
    pub fn forced_values(
        &self,
        known: &BTreeMap<u32, Spin>,
    ) -> Option<BTreeMap<u32, Spin>> {
        let allowed: Vec<Tuple> = self
            .feasible
            .iter()
            .chain(self.faulty.iter())
            .copied()
            .filter(|&t| {
                self.scope.iter().enumerate().all(|(k, v)| {
                    known
                        .get(v)
                        .map(|&s| (t >> k & 1 == 1) == (s > 0))
                        .unwrap_or(true)
                })
            })
            .collect();
        if allowed.is_empty() {
            return None;
        }
        let mut forced = BTreeMap::new();
        for (k, &v) in self.scope.iter().enumerate() {
            if known.contains_key(&v) {
                continue;
            }
            let first = allowed[0] >> k & 1;
            if allowed.iter().all(|&t| t >> k & 1 == first) {
                forced.insert(v, if first == 1 { 1 } else { -1 });
            }
        }
        Some(forced)
    }
}

/// A conjunction of constraints over `num_vars` spin variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Csp {
    pub num_vars: usize,
    pub constraints: Vec<Constraint>,
}

impl Csp {
    pub fn new(num_vars: usize, constraints: Vec<Constraint>) -> Result<Self, IsingError> {
        for c in &constraints {
            for &v in c.scope() {
                if v as usize >= num_vars {
                    return Err(IsingError::VertexOutOfRange(v, num_vars));
                }
            }
        }
        Ok(Csp { num_vars, constraints })
    }

    pub fn is_satisfied(&self, z: &[Spin]) -> bool {
        self.constraints.iter().all(|c| c.is_satisfied(z))
    }

    /// Number of constraints whose tuple is neither feasible nor faulty.
    pub fn violations(&self, z: &[Spin]) -> usize {
        self.constraints
            .iter()
            .filter(|c| !c.is_allowed(z))
            .count()
    }

    /// Number of constraints not satisfied (faulty counts as unsatisfied).
    pub fn unsatisfied(&self, z: &[Spin]) -> usize {
        self.constraints
            .iter()
            .filter(|c| !c.is_satisfied(z))
            .count()
    }

    /// Indices of constraints whose tuple lies in their faulty set.
    pub fn faulty_constraints(&self, z: &[Spin]) -> Vec<usize> {
        self.constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_faulty(z))
            .map(|(i, _)| i)
            .collect()
    }

    /// Variables shared by at least two constraints.
    pub fn shared_vars(&self) -> BTreeSet<u32> {
        let mut count: BTreeMap<u32, usize> = BTreeMap::new();
        for c in &self.constraints {
            for &v in c.scope() {
                *count.entry(v).or_insert(0) += 1;
            }
        }
        count
            .into_iter()
            .filter(|&(_, n)| n >= 2)
            .map(|(v, _)| v)
            .collect()
    }

    /// Fixpoint of unit propagation from the given fixed values. A variable
    /// is forced when some constraint's allowed tuples (restricted by what is
    /// known) all agree on it. Returns `None` on contradiction.
    pub fn propagate(
        &self,
        fixed: &BTreeMap<u32, Spin>,
    ) -> Option<BTreeMap<u32, Spin>> {
        let mut known = fixed.clone();
        loop {
            let mut changed = false;
            for c in &self.constraints {
                let forced = c.forced_values(&known)?;
                for (v, s) in forced {
                    match known.get(&v) {
                        Some(&old) if old != s => return None,
                        Some(_) => {}
                        None => {
                            known.insert(v, s);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return Some(known);
            }
        }
    }
}
