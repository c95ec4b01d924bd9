//! Dense factor tables over small scopes of spin variables, the workhorse
//! of the exact elimination solvers. Entry `data[idx]` corresponds to the
//! assignment where bit `k` of `idx` gives the spin of `vars[k]`
//! (bit 1 ↔ spin +1, bit 0 ↔ spin −1). Scopes are kept sorted ascending.

/// Hard cap on scope size so a table can never exceed 2^25 entries.
const MAX_SCOPE: usize = 25;

#[derive(Debug, Clone)]
pub(crate) struct Table {
    vars: Vec<u32>,
    data: Vec<f64>,
}

/// How to collapse the two values of an eliminated variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Reduce {
    Min,
    LogSumExp,
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

impl Table {
    /// Table over `{v}`: value for spin −1, then for spin +1.
    pub fn unary(v: u32, minus: f64, plus: f64) -> Table {
        Table { vars: vec![v], data: vec![minus, plus] }
    }

    /// Table over `{a, b}` filled from a function of the two spins.
    pub fn binary(a: u32, b: u32, f: impl Fn(i8, i8) -> f64) -> Table {
        assert_ne!(a, b, "binary factor needs two distinct variables");
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let spin = |bit: usize| if bit == 1 { 1i8 } else { -1i8 };
        let data = (0..4)
            .map(|idx: usize| {
                let s_lo = spin(idx & 1);
                let s_hi = spin(idx >> 1);
                let (sa, sb) = if a < b { (s_lo, s_hi) } else { (s_hi, s_lo) };
                f(sa, sb)
            })
            .collect();
        Table { vars: vec![lo, hi], data }
    }

    pub fn vars(&self) -> &[u32] {
        &self.vars
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    /// Index of the entry selected by `plus(v)` (true ↔ spin +1) over the
    /// table's scope.
    pub fn index_where(&self, plus: impl Fn(u32) -> bool) -> usize {
        let mut idx = 0usize;
        for (k, &v) in self.vars.iter().enumerate() {
            if plus(v) {
                idx |= 1 << k;
            }
        }
        idx
    }

    /// Pointwise sum over the union scope.
    pub fn combine(&self, other: &Table) -> Table {
        let mut vars: Vec<u32> = Vec::with_capacity(self.vars.len() + other.vars.len());
        let (mut i, mut j) = (0, 0);
        while i < self.vars.len() || j < other.vars.len() {
            match (self.vars.get(i), other.vars.get(j)) {
                (Some(&a), Some(&b)) if a == b => {
                    vars.push(a);
                    i += 1;
                    j += 1;
                }
                (Some(&a), Some(&b)) if a < b => {
                    vars.push(a);
                    i += 1;
                }
                (Some(_), Some(&b)) => {
                    vars.push(b);
                    j += 1;
                }
                (Some(&a), None) => {
                    vars.push(a);
                    i += 1;
                }
                (None, Some(&b)) => {
                    vars.push(b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        assert!(vars.len() <= MAX_SCOPE, "table scope exceeds {MAX_SCOPE}");

        // Per result-bit contribution to each input's index.
        let contrib = |t: &Table| -> Vec<usize> {
            vars.iter()
                .map(|v| match t.vars.binary_search(v) {
                    Ok(pos) => 1usize << pos,
                    Err(_) => 0,
                })
                .collect()
        };
        let ca = contrib(self);
        let cb = contrib(other);
        let size = 1usize << vars.len();
        let mut data = vec![0.0; size];
        for (idx, slot) in data.iter_mut().enumerate() {
            let mut ia = 0usize;
            let mut ib = 0usize;
            let mut rest = idx;
            let mut k = 0usize;
            while rest != 0 {
                if rest & 1 == 1 {
                    ia |= ca[k];
                    ib |= cb[k];
                }
                rest >>= 1;
                k += 1;
            }
            *slot = self.data[ia] + other.data[ib];
        }
        Table { vars, data }
    }

    /// Pointwise negation (log-space division helper).
    pub fn negated(&self) -> Table {
        Table { vars: self.vars.clone(), data: self.data.iter().map(|x| -x).collect() }
    }

    /// Collapse variable `v` out of the scope with the given reduction.
    pub fn eliminate(&self, v: u32, reduce: Reduce) -> Table {
        let p = self
            .vars
            .binary_search(&v)
            .unwrap_or_else(|_| panic!("variable {v} not in table scope"));
        let vars: Vec<u32> = self
            .vars
            .iter()
            .copied()
            .filter(|&u| u != v)
            .collect();
        let size = 1usize << vars.len();
        let low_mask = (1usize << p) - 1;
        let mut data = vec![0.0; size];
        for (idx, slot) in data.iter_mut().enumerate() {
            let low = idx & low_mask;
            let high = (idx >> p) << (p + 1);
            let i0 = high | low;
            let i1 = i0 | (1 << p);
            *slot = match reduce {
                Reduce::Min => self.data[i0].min(self.data[i1]),
                Reduce::LogSumExp => log_sum_exp(self.data[i0], self.data[i1]),
            };
        }
        Table { vars, data }
    }

    /// LogSumExp-marginalize onto `keep` (a subset of the scope, any order).
    pub fn marginal_onto(&self, keep: &[u32]) -> Table {
        let mut t = self.clone();
        let drop: Vec<u32> = self
            .vars
            .iter()
            .copied()
            .filter(|v| !keep.contains(v))
            .collect();
        for v in drop {
            t = t.eliminate(v, Reduce::LogSumExp);
        }
        t
    }

    /// LogSumExp over every entry.
    pub fn total_lse(&self) -> f64 {
        self.data
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, log_sum_exp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spin(bit: usize) -> i8 {
        if bit == 1 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn combine_matches_direct_enumeration() {
        // f(x2) + g(x2, x5) over scope {2, 5}, checked entry by entry.
        let f = Table::unary(2, 0.25, -1.5);
        let g = Table::binary(2, 5, |a, b| 0.5 * a as f64 - 2.0 * b as f64 + (a * b) as f64);
        let c = f.combine(&g);
        assert_eq!(c.vars(), &[2, 5]);
        for idx in 0..4 {
            let s2 = spin(idx & 1);
            let s5 = spin(idx >> 1);
            let expect = (if s2 == 1 { -1.5 } else { 0.25 })
                + 0.5 * s2 as f64
                - 2.0 * s5 as f64
                + (s2 * s5) as f64;
            assert_eq!(c.values()[idx], expect);
        }
    }

    #[test]
    fn binary_argument_order_is_irrelevant() {
        let f = |a: i8, b: i8| 3.0 * a as f64 + 7.0 * b as f64;
        let t1 = Table::binary(1, 4, f);
        let t2 = Table::binary(4, 1, |b, a| f(a, b));
        assert_eq!(t1.vars(), t2.vars());
        assert_eq!(t1.values(), t2.values());
    }

    #[test]
    fn eliminate_min_and_lse_match_naive() {
        // Random-ish 3-var table; eliminate the middle variable.
        let t = Table::binary(0, 3, |a, b| 1.3 * a as f64 + 0.7 * (a * b) as f64)
            .combine(&Table::unary(7, -0.2, 0.9));
        assert_eq!(t.vars(), &[0, 3, 7]);
        let m = t.eliminate(3, Reduce::Min);
        let l = t.eliminate(3, Reduce::LogSumExp);
        assert_eq!(m.vars(), &[0, 7]);
        for idx in 0..4 {
            let s0 = idx & 1;
            let s7 = (idx >> 1) & 1;
            let i0 = s0 | (s7 << 2);
            let i1 = s0 | (1 << 1) | (s7 << 2);
            let (a, b) = (t.values()[i0], t.values()[i1]);
            assert_eq!(m.values()[idx], a.min(b));
            let expect = (a.exp() + b.exp()).ln();
            assert!((l.values()[idx] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn lse_is_stable_for_huge_magnitudes() {
        let t = Table::unary(0, -2000.0, -2000.5);
        let z = t.eliminate(0, Reduce::LogSumExp);
        // -2000 + ln(1 + e^-0.5), far outside exp()'s direct range.
        let expect = -2000.0 + (-0.5f64).exp().ln_1p();
        assert!((z.values()[0] - expect).abs() < 1e-12);
        assert!(z.values()[0].is_finite());
    }

    #[test]
    fn index_where_follows_scope_order() {
        let t = Table::binary(9, 2, |_, _| 0.0);
        assert_eq!(t.vars(), &[2, 9]);
        assert_eq!(t.index_where(|v| v == 9), 0b10);
        assert_eq!(t.index_where(|v| v == 2), 0b01);
    }
}
