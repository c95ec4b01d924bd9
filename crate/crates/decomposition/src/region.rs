use std::collections::{BTreeMap, BTreeSet};

use ising_core::{Csp, IsingModel};

use crate::error::DecompError;

/// One region of a decomposed problem: a bundle of constraints with a penalty
/// energy over the variables those constraints touch (plus any ancillas the
/// penalty construction introduced).
#[derive(Debug, Clone)]
pub struct Region {
    /// Indices into the source problem's constraint list; empty when the
    /// region was built from a raw energy model.
    pub constraints: Vec<usize>,
    /// Global variable ids covered by this region, strictly increasing.
    pub scope: Vec<u32>,
    /// Energy over local indices `0..scope.len()`; local `k` is `scope[k]`.
    pub model: IsingModel<f64>,
    /// Energy separation between the model's ground states and its first
    /// excited level, used to scale the divide phase so that feasibility
    /// dominates consensus pressure.
    pub gap: f64,
    /// Scope variables shared with at least one other region, sorted.
    boundary: Vec<u32>,
}

impl Region {
    pub fn boundary(&self) -> &[u32] {
        &self.boundary
    }

    /// Local index of a global variable, if it belongs to this region.
    pub fn local(&self, global: u32) -> Option<u32> {
        self.scope.binary_search(&global).ok().map(|k| k as u32)
    }
}

/// Everything needed to declare one region before shared-variable structure
/// is known.
#[derive(Debug, Clone)]
pub struct RegionSpec {
    pub constraints: Vec<usize>,
    pub scope: Vec<u32>,
    pub model: IsingModel<f64>,
    pub gap: f64,
}

/// A problem split into regions, with the shared-variable bookkeeping both
/// solvers need: per-variable region counts, boundaries, and coupling-graph
/// degrees.
#[derive(Debug, Clone)]
pub struct RegionGraph {
    num_vars: usize,
    regions: Vec<Region>,
    csp: Option<Csp>,
    /// Per global variable: indices of the regions whose scope contains it.
    membership: Vec<Vec<usize>>,
    /// Per global variable: its degree in the union of all region couplings.
    degree: Vec<u32>,
}

impl RegionGraph {
    /// Assemble the graph, checking that scopes are sorted and in range, each
    /// model matches its scope, and — when a CSP is attached — that the
    /// regions partition its constraints and cover their scopes.
    pub fn new(
        num_vars: usize,
        specs: Vec<RegionSpec>,
        csp: Option<Csp>,
    ) -> Result<Self, DecompError> {
        if specs.is_empty() {
            return Err(DecompError::BadInput("no regions given".into()));
        }
        for (r, spec) in specs.iter().enumerate() {
            if spec.scope.is_empty() {
                return Err(DecompError::BadInput(format!("region {r} has an empty scope")));
            }
            if !spec.scope.windows(2).all(|w| w[0] < w[1]) {
                return Err(DecompError::BadInput(format!(
                    "region {r}: scope must be strictly increasing"
                )));
            }
            if spec.scope.last().copied().unwrap() as usize >= num_vars {
                return Err(DecompError::BadInput(format!(
                    "region {r}: scope exceeds the {num_vars}-variable space"
                )));
            }
            if spec.model.num_vars() != spec.scope.len() {
                return Err(DecompError::BadInput(format!(
                    "region {r}: model covers {} variables but the scope lists {}",
                    spec.model.num_vars(),
                    spec.scope.len()
                )));
            }
            if !(spec.gap.is_finite() && spec.gap > 0.0) {
                return Err(DecompError::BadInput(format!(
                    "region {r}: gap must be positive and finite, got {}",
                    spec.gap
                )));
            }
        }
        match &csp {
            Some(csp) => {
                if csp.num_vars > num_vars {
                    return Err(DecompError::BadInput(format!(
                        "constraint problem has {} variables but the region space only {}",
                        csp.num_vars, num_vars
                    )));
                }
                let mut owner: Vec<Option<usize>> = vec![None; csp.constraints.len()];
                for (r, spec) in specs.iter().enumerate() {
                    let scope: BTreeSet<u32> = spec.scope.iter().copied().collect();
                    for &c in &spec.constraints {
                        if c >= owner.len() {
                            return Err(DecompError::BadInput(format!(
                                "region {r} lists constraint {c}, but only {} exist",
                                owner.len()
                            )));
                        }
                        if let Some(prev) = owner[c] {
                            return Err(DecompError::BadInput(format!(
                                "constraint {c} appears in regions {prev} and {r}"
                            )));
                        }
                        owner[c] = Some(r);
                        if let Some(&v) =
                            csp.constraints[c].scope().iter().find(|v| !scope.contains(v))
                        {
                            return Err(DecompError::BadInput(format!(
                                "constraint {c} touches variable {v}, which region {r} does not cover"
                            )));
                        }
                    }
                }
                if let Some(c) = owner.iter().position(|o| o.is_none()) {
                    return Err(DecompError::BadInput(format!(
                        "constraint {c} is not assigned to any region"
                    )));
                }
            }
            None => {
                if let Some(r) = specs.iter().position(|s| !s.constraints.is_empty()) {
                    return Err(DecompError::BadInput(format!(
                        "region {r} references constraints but no constraint problem is attached"
                    )));
                }
            }
        }

        let mut membership: Vec<Vec<usize>> = vec![Vec::new(); num_vars];
        for (r, spec) in specs.iter().enumerate() {
            for &v in &spec.scope {
                membership[v as usize].push(r);
            }
        }
        let mut edges: BTreeSet<(u32, u32)> = BTreeSet::new();
        for spec in &specs {
            for (a, b, _) in spec.model.quadratic() {
                let (ga, gb) = (spec.scope[a as usize], spec.scope[b as usize]);
                edges.insert((ga.min(gb), ga.max(gb)));
            }
        }
        let mut degree = vec![0u32; num_vars];
        for &(a, b) in &edges {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let regions = specs
            .into_iter()
            .map(|spec| {
                let boundary = spec
                    .scope
                    .iter()
                    .copied()
                    .filter(|&v| membership[v as usize].len() >= 2)
                    .collect();
                Region {
                    constraints: spec.constraints,
                    scope: spec.scope,
                    model: spec.model,
                    gap: spec.gap,
                    boundary,
                }
            })
            .collect();
        Ok(RegionGraph { num_vars, regions, csp, membership, degree })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn csp(&self) -> Option<&Csp> {
        self.csp.as_ref()
    }

    /// Number of regions whose scope contains variable `i`.
    pub fn count(&self, i: u32) -> u32 {
        self.membership[i as usize].len() as u32
    }

    /// Regions whose scope contains variable `i`.
    pub fn membership(&self, i: u32) -> &[usize] {
        &self.membership[i as usize]
    }

    /// Degree of variable `i` in the union of all region couplings.
    pub fn degree(&self, i: u32) -> u32 {
        self.degree[i as usize]
    }

    /// The sum of all region energies as one model over the global variables.
    pub fn joint_model(&self) -> Result<IsingModel<f64>, DecompError> {
        let mut joint = IsingModel::new(self.num_vars);
        for region in &self.regions {
            let map: BTreeMap<u32, u32> = region
                .scope
                .iter()
                .enumerate()
                .map(|(k, &v)| (k as u32, v))
                .collect();
            joint.add_model(&region.model.relabeled(&map, self.num_vars)?)?;
        }
        Ok(joint)
    }
}

/// Add per-variable corrective biases `V_i(z_i)` to a region's energy.
///
/// Keys of `v` are global variable ids and must lie on the region's boundary;
/// values are `[V(−1), V(+1)]`. Since `V(z) = (V(+1)+V(−1))/2 +
/// (V(+1)−V(−1))/2·z` on `z ∈ {−1,+1}`, the bias lands as a field shift plus
/// an offset shift. The result lives over the region's local indices.
pub fn corrective_energy(
    region: &Region,
    v: &BTreeMap<u32, [f64; 2]>,
) -> Result<IsingModel<f64>, DecompError> {
    let mut out = region.model.clone();
    for (&i, &[vm, vp]) in v {
        if !(vm.is_finite() && vp.is_finite()) {
            return Err(DecompError::BadInput(format!(
                "corrective bias on variable {i} is not finite: [{vm}, {vp}]"
            )));
        }
        if region.boundary.binary_search(&i).is_err() {
            return Err(DecompError::BadInput(format!(
                "corrective bias on variable {i}, which is not on the region's boundary"
            )));
        }
        let local = region.local(i).expect("boundary variables are in scope");
        out.add_h(local, (vp - vm) / 2.0)?;
        out.add_offset((vp + vm) / 2.0);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(scope: Vec<u32>) -> RegionSpec {
        let model = IsingModel::new(scope.len());
        RegionSpec { constraints: vec![], scope, model, gap: 1.0 }
    }

    #[test]
    fn membership_boundary_and_degree_are_derived() {
        let mut a = spec(vec![0, 1, 2]);
        a.model.set_j(0, 1, 1.0).unwrap();
        a.model.set_j(1, 2, -1.0).unwrap();
        let mut b = spec(vec![2, 3]);
        b.model.set_j(0, 1, 0.5).unwrap();
        let rg = RegionGraph::new(4, vec![a, b], None).unwrap();
        assert_eq!(rg.count(2), 2);
        assert_eq!(rg.count(0), 1);
        assert_eq!(rg.membership(2), &[0, 1]);
        assert_eq!(rg.regions()[0].boundary(), &[2]);
        assert_eq!(rg.regions()[1].boundary(), &[2]);
        assert_eq!(rg.degree(2), 2);
        assert_eq!(rg.degree(1), 2);
        assert_eq!(rg.degree(3), 1);
    }

    #[test]
    fn malformed_scopes_are_rejected() {
        assert!(RegionGraph::new(3, vec![spec(vec![1, 0])], None).is_err());
        assert!(RegionGraph::new(3, vec![spec(vec![1, 1])], None).is_err());
        assert!(RegionGraph::new(3, vec![spec(vec![2, 3])], None).is_err());
        assert!(RegionGraph::new(3, vec![], None).is_err());
        let mut bad_model = spec(vec![0, 1]);
        bad_model.model = IsingModel::new(3);
        assert!(RegionGraph::new(3, vec![bad_model], None).is_err());
        let mut bad_gap = spec(vec![0, 1]);
        bad_gap.gap = 0.0;
        assert!(RegionGraph::new(3, vec![bad_gap], None).is_err());
    }

    #[test]
    fn constraints_without_a_problem_are_rejected() {
        let mut s = spec(vec![0, 1]);
        s.constraints = vec![0];
        assert!(RegionGraph::new(2, vec![s], None).is_err());
    }

    /// Two overlapping regions with couplings and fields, for bias tests.
    fn shared_pair() -> RegionGraph {
        let mut a = spec(vec![0, 1, 2]);
        a.model.set_j(0, 1, 0.8).unwrap();
        a.model.set_j(1, 2, -1.2).unwrap();
        a.model.add_h(0, 0.3).unwrap();
        let mut b = spec(vec![1, 2, 3]);
        b.model.set_j(0, 2, 0.5).unwrap();
        b.model.add_h(1, -0.7).unwrap();
        RegionGraph::new(4, vec![a, b], None).unwrap()
    }

    #[test]
    fn zero_bias_keeps_the_energy_unchanged() {
        let rg = shared_pair();
        let region = &rg.regions()[0];
        let mut v = BTreeMap::new();
        for &i in region.boundary() {
            v.insert(i, [0.0, 0.0]);
        }
        let corrected = corrective_energy(region, &v).unwrap();
        for tuple in 0u64..8 {
            let z = ising_core::bits_to_spins(tuple, 3);
            assert_eq!(corrected.energy(&z).unwrap(), region.model.energy(&z).unwrap());
        }
    }

    #[test]
    fn single_bias_lands_as_half_field_and_half_offset() {
        let rg = shared_pair();
        let region = &rg.regions()[1];
        let mut v = BTreeMap::new();
        v.insert(1u32, [0.0, 1.0]);
        let corrected = corrective_energy(region, &v).unwrap();
        let local = region.local(1).unwrap();
        let base_h: f64 = region.model.linear().find(|&(i, _)| i == local).map_or(0.0, |(_, x)| x);
        let new_h: f64 = corrected.linear().find(|&(i, _)| i == local).map_or(0.0, |(_, x)| x);
        assert!((new_h - base_h - 0.5).abs() < 1e-12);
        let z = [-1i8, -1, -1];
        let shift = corrected.energy(&z).unwrap() - region.model.energy(&z).unwrap();
        assert!((shift - 0.0).abs() < 1e-12, "V(-1) = 0 at all-minus");
    }

    #[test]
    fn corrected_energy_is_base_plus_biases_pointwise() {
        let rg = shared_pair();
        for region in rg.regions() {
            let mut v = BTreeMap::new();
            for (k, &i) in region.boundary().iter().enumerate() {
                v.insert(i, [0.25 * (k as f64 + 1.0), -0.4 * (k as f64 + 2.0)]);
            }
            let corrected = corrective_energy(region, &v).unwrap();
            let k = region.scope.len();
            for tuple in 0u64..(1 << k) {
                let z = ising_core::bits_to_spins(tuple, k);
                let mut want = region.model.energy(&z).unwrap();
                for (&i, &[vm, vp]) in &v {
                    let s = z[region.local(i).unwrap() as usize];
                    want += if s > 0 { vp } else { vm };
                }
                let got = corrected.energy(&z).unwrap();
                assert!((got - want).abs() < 1e-12, "tuple {tuple}: {got} vs {want}");
            }
        }
    }
}
