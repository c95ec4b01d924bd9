use std::collections::BTreeMap;

use crate::{IsingError, Scalar};

/// A single spin value; by convention `-1` or `+1`.
///
/// Boolean values map as `0 ↦ -1`, `1 ↦ +1` throughout the toolkit.
pub type Spin = i8;

/// A full spin configuration, indexed by variable (or hardware vertex) id.
pub type SpinConfig = Vec<Spin>;

/// Box constraints on the linear and quadratic coefficients of a device.
///
/// Defaults to `h ∈ [-2, 2]`, `J ∈ [-1, 1]`. The offset is never bounded:
/// it shifts all energies uniformly and has no hardware realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterBounds<T: Scalar = f64> {
    pub h_min: T,
    pub h_max: T,
    pub j_min: T,
    pub j_max: T,
}

impl<T: Scalar> Default for ParameterBounds<T> {
    fn default() -> Self {
        let two = T::from_f64(2.0).unwrap();
        ParameterBounds {
            h_min: -two,
            h_max: two,
            j_min: -T::one(),
            j_max: T::one(),
        }
    }
}

impl<T: Scalar> ParameterBounds<T> {
    /// Symmetric bounds `h ∈ [-h, h]`, `J ∈ [-j, j]`.
    pub fn symmetric(h: T, j: T) -> Result<Self, IsingError> {
        let b = ParameterBounds {
            h_min: -h,
            h_max: h,
            j_min: -j,
            j_max: j,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<(), IsingError> {
        let ok = |lo: T, hi: T| lo.is_finite() && hi.is_finite() && lo <= hi;
        if !ok(self.h_min, self.h_max) || !ok(self.j_min, self.j_max) {
            return Err(IsingError::InvalidBounds(format!(
                "h ∈ [{}, {}], J ∈ [{}, {}]",
                self.h_min, self.h_max, self.j_min, self.j_max
            )));
        }
        // Zero must be admissible: an absent coefficient is a zero coefficient.
        if self.h_min > T::zero()
            || self.h_max < T::zero()
            || self.j_min > T::zero()
            || self.j_max < T::zero()
        {
            return Err(IsingError::InvalidBounds(
                "bounds must contain zero".to_string(),
            ));
        }
        Ok(())
    }

    pub fn contains_h(&self, v: T) -> bool {
        v >= self.h_min && v <= self.h_max
    }

    pub fn contains_j(&self, v: T) -> bool {
        v >= self.j_min && v <= self.j_max
    }
}

/// An Ising model: `E(z) = offset + Σ h_i z_i + Σ_{i<j} J_ij z_i z_j`.
///
/// Variables are dense indices `0..num_vars`; coefficients are stored
/// sparsely in ordered maps so iteration (and therefore serialization) is
/// deterministic. Quadratic terms are canonicalized to `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel<T: Scalar = f64> {
    num_vars: usize,
    offset: T,
    h: BTreeMap<u32, T>,
    j: BTreeMap<(u32, u32), T>,
}

impl<T: Scalar> IsingModel<T> {
    pub fn new(num_vars: usize) -> Self {
        IsingModel {
            num_vars,
            offset: T::zero(),
            h: BTreeMap::new(),
            j: BTreeMap::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    pub fn set_offset(&mut self, v: T) {
        self.offset = v;
    }

    pub fn add_offset(&mut self, v: T) {
        self.offset = self.offset + v;
    }

    fn check_var(&self, i: u32) -> Result<(), IsingError> {
        if (i as usize) < self.num_vars {
            Ok(())
        } else {
            Err(IsingError::VertexOutOfRange(i, self.num_vars))
        }
    }

    pub fn h(&self, i: u32) -> T {
        self.h.get(&i).copied().unwrap_or_else(T::zero)
    }

    pub fn j(&self, i: u32, j: u32) -> T {
        let key = if i < j { (i, j) } else { (j, i) };
        self.j.get(&key).copied().unwrap_or_else(T::zero)
    }

    /// Set a linear coefficient. A value of exactly zero removes the entry.
    pub fn set_h(&mut self, i: u32, v: T) -> Result<(), IsingError> {
        self.check_var(i)?;
        if v == T::zero() {
            self.h.remove(&i);
        } else {
            self.h.insert(i, v);
        }
        Ok(())
    }

    pub fn add_h(&mut self, i: u32, v: T) -> Result<(), IsingError> {
        let cur = self.h(i);
        self.set_h(i, cur + v)
    }

    /// Set a quadratic coefficient; `i` and `j` must be distinct.
    pub fn set_j(&mut self, i: u32, j: u32, v: T) -> Result<(), IsingError> {
        self.check_var(i)?;
        self.check_var(j)?;
        if i == j {
            return Err(IsingError::InvalidEdge(i, j, "self-coupling"));
        }
        let key = if i < j { (i, j) } else { (j, i) };
        if v == T::zero() {
            self.j.remove(&key);
        } else {
            self.j.insert(key, v);
        }
        Ok(())
    }

    pub fn add_j(&mut self, i: u32, j: u32, v: T) -> Result<(), IsingError> {
        let cur = self.j(i, j);
        self.set_j(i, j, cur + v)
    }

    /// Linear terms, sorted by index.
    pub fn linear(&self) -> impl Iterator<Item = (u32, T)> + '_ {
        self.h.iter().map(|(&i, &v)| (i, v))
    }

    /// Quadratic terms, sorted by `(i, j)` with `i < j`.
    pub fn quadratic(&self) -> impl Iterator<Item = (u32, u32, T)> + '_ {
        self.j.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    /// Vertices that carry a linear term or touch a quadratic term.
    pub fn support(&self) -> Vec<u32> {
        let mut s: Vec<u32> = self.h.keys().copied().collect();
        for &(i, j) in self.j.keys() {
            s.push(i);
            s.push(j);
        }
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Total energy of a configuration.
    pub fn energy(&self, z: &[Spin]) -> Result<T, IsingError> {
        if z.len() != self.num_vars {
            return Err(IsingError::ConfigLength(z.len(), self.num_vars));
        }
        let mut e = self.offset;
        for (&i, &v) in &self.h {
            let s = T::from_i8(z[i as usize]).unwrap();
            e = e + v * s;
        }
        for (&(i, j), &v) in &self.j {
            let si = T::from_i8(z[i as usize]).unwrap();
            let sj = T::from_i8(z[j as usize]).unwrap();
            e = e + v * si * sj;
        }
        Ok(e)
    }

    /// Energy change from flipping spin `i` in configuration `z`.
    pub fn flip_delta(&self, z: &[Spin], i: u32) -> Result<T, IsingError> {
        if z.len() != self.num_vars {
            return Err(IsingError::ConfigLength(z.len(), self.num_vars));
        }
        self.check_var(i)?;
        let si = T::from_i8(z[i as usize]).unwrap();
        let mut field = self.h(i);
        for (&(a, b), &v) in &self.j {
            if a == i {
                field = field + v * T::from_i8(z[b as usize]).unwrap();
            } else if b == i {
                field = field + v * T::from_i8(z[a as usize]).unwrap();
            }
        }
        // E(flip) - E = -2 s_i (h_i + Σ J_ij s_j)
        Ok(-(T::one() + T::one()) * si * field)
    }

    /// Gauge (spin-reversal) transform: for `flip[i]` true, substitute
    /// `z_i → -z_i`. Energies are invariant when configurations are
    /// transformed alongside the model.
    pub fn spin_reversal(&self, flip: &[bool]) -> Result<Self, IsingError> {
        if flip.len() != self.num_vars {
            return Err(IsingError::ConfigLength(flip.len(), self.num_vars));
        }
        let sign = |i: u32| if flip[i as usize] { -T::one() } else { T::one() };
        let mut out = IsingModel::new(self.num_vars);
        out.offset = self.offset;
        for (&i, &v) in &self.h {
            out.h.insert(i, v * sign(i));
        }
        for (&(i, j), &v) in &self.j {
            out.j.insert((i, j), v * sign(i) * sign(j));
        }
        Ok(out)
    }

    /// Multiply every coefficient (offset included) by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        let mut out = self.clone();
        out.offset = out.offset * factor;
        for v in out.h.values_mut() {
            *v = *v * factor;
        }
        for v in out.j.values_mut() {
            *v = *v * factor;
        }
        out
    }

    /// Add every term of `other` into `self`. Sizes must match.
    pub fn add_model(&mut self, other: &IsingModel<T>) -> Result<(), IsingError> {
        if other.num_vars != self.num_vars {
            return Err(IsingError::ConfigLength(other.num_vars, self.num_vars));
        }
        self.offset = self.offset + other.offset;
        for (&i, &v) in &other.h {
            self.add_h(i, v)?;
        }
        for (&(i, j), &v) in &other.j {
            self.add_j(i, j, v)?;
        }
        Ok(())
    }

    /// Rename variables through `map` (old id → new id) into a model with
    /// `new_num_vars` variables. `map` must be injective on the support.
    pub fn relabeled(
        &self,
        map: &BTreeMap<u32, u32>,
        new_num_vars: usize,
    ) -> Result<Self, IsingError> {
        let mut out = IsingModel::new(new_num_vars);
        out.offset = self.offset;
        let lookup = |i: u32| -> Result<u32, IsingError> {
            map.get(&i)
                .copied()
                .ok_or(IsingError::VertexOutOfRange(i, map.len()))
        };
        for (&i, &v) in &self.h {
            out.add_h(lookup(i)?, v)?;
        }
        for (&(i, j), &v) in &self.j {
            let (a, b) = (lookup(i)?, lookup(j)?);
            if a == b {
                return Err(IsingError::InvalidEdge(i, j, "relabel collision"));
            }
            out.add_j(a, b, v)?;
        }
        Ok(out)
    }

    /// Largest factor `f ≤ 1` such that `f·h`, `f·J` fit inside `bounds`;
    /// returns the scaled model and the factor. A model already inside the
    /// bounds is returned unchanged with factor 1.
    pub fn rescaled_into(&self, bounds: &ParameterBounds<T>) -> (Self, T) {
        let mut factor = T::one();
        let mut shrink = |v: T, lo: T, hi: T| {
            if v > hi && hi >= T::zero() {
                factor = factor.min(hi / v);
            } else if v < lo && lo <= T::zero() {
                factor = factor.min(lo / v);
            }
        };
        for &v in self.h.values() {
            shrink(v, bounds.h_min, bounds.h_max);
        }
        for &v in self.j.values() {
            shrink(v, bounds.j_min, bounds.j_max);
        }
        if factor >= T::one() {
            (self.clone(), T::one())
        } else {
            (self.scaled(factor), factor)
        }
    }

    /// Check every coefficient against `bounds`.
    pub fn check_bounds(&self, bounds: &ParameterBounds<T>) -> Result<(), IsingError> {
        for (&i, &v) in &self.h {
            if !bounds.contains_h(v) {
                return Err(IsingError::OutOfBounds {
                    name: "h",
                    index: i.to_string(),
                    value: v.to_f64().unwrap_or(f64::NAN),
                    lo: bounds.h_min.to_f64().unwrap_or(f64::NAN),
                    hi: bounds.h_max.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        for (&(i, j), &v) in &self.j {
            if !bounds.contains_j(v) {
                return Err(IsingError::OutOfBounds {
                    name: "J",
                    index: format!("{},{}", i, j),
                    value: v.to_f64().unwrap_or(f64::NAN),
                    lo: bounds.j_min.to_f64().unwrap_or(f64::NAN),
                    hi: bounds.j_max.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }

    /// Mean absolute quadratic coefficient; falls back to the mean absolute
    /// linear coefficient for models without couplers, then to 1.
    pub fn mean_abs_coupling(&self) -> T {
        let sum_j = self
            .j
            .values()
            .fold(T::zero(), |acc, &v| acc + v.abs());
        if !self.j.is_empty() {
            return sum_j / T::from_usize(self.j.len()).unwrap();
        }
        let sum_h = self
            .h
            .values()
            .fold(T::zero(), |acc, &v| acc + v.abs());
        if !self.h.is_empty() && sum_h > T::zero() {
            return sum_h / T::from_usize(self.h.len()).unwrap();
        }
        T::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_spin() -> IsingModel<f64> {
        let mut m = IsingModel::new(2);
        m.set_offset(1.0);
        m.set_h(0, 0.5).unwrap();
        m.set_j(0, 1, -1.0).unwrap();
        m
    }

    #[test]
    fn energy_matches_hand_computation() {
        let m = two_spin();
        // E(+1,+1) = 1 + 0.5 - 1 = 0.5
        assert_eq!(m.energy(&[1, 1]).unwrap(), 0.5);
        // E(-1,+1) = 1 - 0.5 + 1 = 1.5
        assert_eq!(m.energy(&[-1, 1]).unwrap(), 1.5);
        // E(+1,-1) = 1 + 0.5 + 1 = 2.5
        assert_eq!(m.energy(&[1, -1]).unwrap(), 2.5);
    }

    #[test]
    fn flip_delta_agrees_with_energy_difference() {
        let m = two_spin();
        for z in [[1, 1], [1, -1], [-1, 1], [-1, -1]] {
            for i in 0..2u32 {
                let mut zf = z;
                zf[i as usize] = -zf[i as usize];
                let direct = m.energy(&zf).unwrap() - m.energy(&z).unwrap();
                let fast = m.flip_delta(&z, i).unwrap();
                assert!((direct - fast).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gauge_transform_preserves_energy() {
        let m = two_spin();
        let g = m.spin_reversal(&[true, false]).unwrap();
        for z in [[1i8, 1], [1, -1], [-1, 1], [-1, -1]] {
            let mut zt = z;
            zt[0] = -zt[0];
            assert_eq!(m.energy(&z).unwrap(), g.energy(&zt).unwrap());
        }
    }

    #[test]
    fn quadratic_keys_canonicalized() {
        let mut m = IsingModel::<f64>::new(3);
        m.set_j(2, 0, 0.25).unwrap();
        assert_eq!(m.j(0, 2), 0.25);
        assert_eq!(m.j(2, 0), 0.25);
        assert_eq!(m.quadratic().collect::<Vec<_>>(), vec![(0, 2, 0.25)]);
    }

    #[test]
    fn rescale_reports_factor() {
        let mut m = IsingModel::<f64>::new(2);
        m.set_h(0, 3.0).unwrap();
        m.set_j(0, 1, -2.0).unwrap();
        m.set_offset(4.0);
        let (scaled, f) = m.rescaled_into(&ParameterBounds::default());
        assert_eq!(f, 0.5); // J = -2 must shrink to -1
        assert_eq!(scaled.h(0), 1.5);
        assert_eq!(scaled.j(0, 1), -1.0);
        assert_eq!(scaled.offset(), 2.0);
        let (same, f1) = scaled.rescaled_into(&ParameterBounds::default());
        assert_eq!(f1, 1.0);
        assert_eq!(same, scaled);
    }

    #[test]
    fn self_coupling_rejected() {
        let mut m = IsingModel::<f64>::new(2);
        assert!(m.set_j(1, 1, 1.0).is_err());
    }
}
