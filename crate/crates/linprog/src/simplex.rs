//! Bounded-variable revised primal simplex with an explicit dense basis
//! inverse, two-phase start, Dantzig pricing, and a Bland's-rule fallback
//! under sustained degeneracy.

// Dense linear-algebra kernels below iterate rows/columns by index on
// purpose; iterator rewrites obscure the row-major basis arithmetic.
#![allow(clippy::needless_range_loop)]

use crate::{LpError, Outcome, Problem, Relation, Solution};

const COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-10;
const RATIO_TIE: f64 = 1e-9;
const REFACTOR_EVERY: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable, held at zero.
    Free,
}

enum Blocker {
    /// Entering variable reaches its own opposite bound (bound flip).
    Own,
    /// Basic slot `i` reaches a bound (`true` = upper).
    Row(usize, bool),
    /// No finite limit: the problem is unbounded in this direction.
    None,
}

pub(crate) struct Standard {
    m: usize,
    ncols: usize,
    nstruct: usize,
    art_start: usize,
    cols: Vec<Vec<(u32, f64)>>,
    b: Vec<f64>,
    cost: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    xb: Vec<f64>,
    binv: Vec<f64>,
    pivots: usize,
}

impl Standard {
    pub(crate) fn build(p: &Problem) -> Standard {
        let m = p.num_rows();
        let n = p.num_vars();
        let nslack = p
            .rows()
            .iter()
            .filter(|r| r.rel != Relation::Eq)
            .count();
        let ncols = n + nslack + m;
        let art_start = n + nslack;

        let mut cols: Vec<Vec<(u32, f64)>> = vec![Vec::new(); ncols];
        let mut lower = vec![f64::NEG_INFINITY; ncols];
        let mut upper = vec![f64::INFINITY; ncols];
        let mut cost = vec![0.0; ncols];
        lower[..n].copy_from_slice(p.lower_ref());
        upper[..n].copy_from_slice(p.upper_ref());
        cost[..n].copy_from_slice(p.objective_ref());

        let mut b = Vec::with_capacity(m);
        let mut slack_idx = n;
        for (i, row) in p.rows().iter().enumerate() {
            for &(j, v) in &row.coeffs {
                cols[j as usize].push((i as u32, v));
            }
            match row.rel {
                Relation::Le => {
                    cols[slack_idx].push((i as u32, 1.0));
                    lower[slack_idx] = 0.0;
                    slack_idx += 1;
                }
                Relation::Ge => {
                    cols[slack_idx].push((i as u32, -1.0));
                    lower[slack_idx] = 0.0;
                    slack_idx += 1;
                }
                Relation::Eq => {}
            }
            b.push(row.rhs);
        }

        // Initial nonbasic values: nearest finite bound, else 0 (free).
        let mut state = Vec::with_capacity(ncols);
        for j in 0..art_start {
            state.push(if lower[j].is_finite() {
                VarState::AtLower
            } else if upper[j].is_finite() {
                VarState::AtUpper
            } else {
                VarState::Free
            });
        }

        // Residual the artificial basis must cover.
        let mut resid = b.clone();
        for j in 0..art_start {
            let v = match state[j] {
                VarState::AtLower => lower[j],
                VarState::AtUpper => upper[j],
                _ => 0.0,
            };
            if v != 0.0 {
                for &(i, a) in &cols[j] {
                    resid[i as usize] -= a * v;
                }
            }
        }

        let mut basis = Vec::with_capacity(m);
        let mut xb = Vec::with_capacity(m);
        for i in 0..m {
            let j = art_start + i;
            let sign = if resid[i] >= 0.0 { 1.0 } else { -1.0 };
            cols[j].push((i as u32, sign));
            lower[j] = 0.0;
            state.push(VarState::Basic);
            basis.push(j);
            xb.push(resid[i].abs());
        }

        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            // Inverse of the signed identity is itself.
            binv[i * m + i] = if resid[i] >= 0.0 { 1.0 } else { -1.0 };
        }

        Standard {
            m,
            ncols,
            nstruct: n,
            art_start,
            cols,
            b,
            cost,
            lower,
            upper,
            state,
            basis,
            xb,
            binv,
            pivots: 0,
        }
    }

    pub(crate) fn run(&mut self) -> Result<Outcome, LpError> {
        // Phase 1: minimize the sum of artificials.
        let mut phase1_cost = vec![0.0; self.ncols];
        for j in self.art_start..self.ncols {
            phase1_cost[j] = 1.0;
        }
        let bscale = 1.0 + self.b.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        match self.optimize(&phase1_cost)? {
            Outcome::Unbounded => {
                // Phase-1 objective is bounded below by zero; reaching here
                // means the basis degraded numerically.
                return Err(LpError::SingularBasis);
            }
            Outcome::Optimal(_) => {}
            Outcome::Infeasible => unreachable!("optimize never reports infeasible"),
        }
        let art_sum: f64 = self
            .basis
            .iter()
            .zip(&self.xb)
            .filter(|(&j, _)| j >= self.art_start)
            .map(|(_, &v)| v.abs())
            .sum();
        if art_sum > 1e-8 * bscale {
            return Ok(Outcome::Infeasible);
        }

        // Fix artificials at zero for phase 2.
        for j in self.art_start..self.ncols {
            self.upper[j] = 0.0;
            if self.state[j] != VarState::Basic {
                self.state[j] = VarState::AtLower;
            }
        }

        let cost = self.cost.clone();
        match self.optimize(&cost)? {
            Outcome::Unbounded => Ok(Outcome::Unbounded),
            Outcome::Optimal(_) => {
                let x = self.extract_x();
                let objective: f64 = x
                    .iter()
                    .zip(&self.cost[..self.nstruct])
                    .map(|(&xi, &ci)| xi * ci)
                    .sum();
                let duals = self.compute_duals(&cost);
                Ok(Outcome::Optimal(Solution { x, objective, duals }))
            }
            Outcome::Infeasible => unreachable!("optimize never reports infeasible"),
        }
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::AtLower => self.lower[j],
            VarState::AtUpper => self.upper[j],
            _ => 0.0,
        }
    }

    fn extract_x(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.nstruct];
        for j in 0..self.nstruct {
            if self.state[j] != VarState::Basic {
                x[j] = self.nonbasic_value(j);
            }
        }
        for (i, &j) in self.basis.iter().enumerate() {
            if j < self.nstruct {
                x[j] = self.xb[i];
            }
        }
        x
    }

    fn compute_duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut pi = vec![0.0; m];
        for (i, &j) in self.basis.iter().enumerate() {
            let cb = cost[j];
            if cb != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for r in 0..m {
                    pi[r] += cb * row[r];
                }
            }
        }
        pi
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for &(r, v) in &self.cols[j] {
            let r = r as usize;
            for i in 0..m {
                y[i] += self.binv[i * m + r] * v;
            }
        }
        y
    }

    fn reduced_cost(&self, cost: &[f64], pi: &[f64], j: usize) -> f64 {
        let mut d = cost[j];
        for &(r, v) in &self.cols[j] {
            d -= pi[r as usize] * v;
        }
        d
    }

    /// Entering-candidate scan. Returns `(column, direction)`.
    fn price(&self, cost: &[f64], pi: &[f64], bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.ncols {
            let st = self.state[j];
            if st == VarState::Basic || self.lower[j] == self.upper[j] {
                continue;
            }
            let d = self.reduced_cost(cost, pi, j);
            let sigma = match st {
                VarState::AtLower if d < -COST_TOL => 1.0,
                VarState::AtUpper if d > COST_TOL => -1.0,
                VarState::Free if d < -COST_TOL => 1.0,
                VarState::Free if d > COST_TOL => -1.0,
                _ => continue,
            };
            if bland {
                return Some((j, sigma));
            }
            let score = d.abs();
            if best.map(|(_, _, s)| score > s).unwrap_or(true) {
                best = Some((j, sigma, score));
            }
        }
        best.map(|(j, sigma, _)| (j, sigma))
    }

    fn ratio_test(&self, j: usize, sigma: f64, y: &[f64]) -> (f64, Blocker) {
        let mut t_best = f64::INFINITY;
        let mut blocker = Blocker::None;
        if sigma > 0.0 && self.upper[j].is_finite() {
            t_best = self.upper[j] - self.nonbasic_value(j);
            blocker = Blocker::Own;
        } else if sigma < 0.0 && self.lower[j].is_finite() {
            t_best = self.nonbasic_value(j) - self.lower[j];
            blocker = Blocker::Own;
        }
        let mut best_piv = 0.0f64;
        for i in 0..self.m {
            let rate = -sigma * y[i]; // d x_B[i] / d t
            if rate.abs() <= PIVOT_TOL {
                continue;
            }
            let k = self.basis[i];
            let (limit, at_upper) = if rate > 0.0 {
                if !self.upper[k].is_finite() {
                    continue;
                }
                ((self.upper[k] - self.xb[i]) / rate, true)
            } else {
                if !self.lower[k].is_finite() {
                    continue;
                }
                ((self.xb[i] - self.lower[k]) / -rate, false)
            };
            let limit = limit.max(0.0);
            let tie = (limit - t_best).abs() <= RATIO_TIE * (1.0 + t_best.abs());
            // Prefer strictly smaller ratios; among ties prefer kicking out
            // artificials, then larger pivot magnitude for stability.
            let better = if limit < t_best && !tie {
                true
            } else if tie && !matches!(blocker, Blocker::Own) {
                let cur_art = match blocker {
                    Blocker::Row(r, _) => self.basis[r] >= self.art_start,
                    _ => false,
                };
                let new_art = k >= self.art_start;
                (new_art && !cur_art) || (new_art == cur_art && y[i].abs() > best_piv)
            } else if tie && matches!(blocker, Blocker::Own) {
                // A pivot is preferable to a bound flip only if it makes
                // progress; keep the flip on ties.
                false
            } else {
                false
            };
            if better {
                t_best = limit.min(t_best);
                blocker = Blocker::Row(i, at_upper);
                best_piv = y[i].abs();
            }
        }
        (t_best, blocker)
    }

    fn apply_step(&mut self, j: usize, sigma: f64, t: f64, y: &[f64], blocker: Blocker) {
        for i in 0..self.m {
            self.xb[i] += -sigma * y[i] * t;
        }
        match blocker {
            Blocker::Own => {
                self.state[j] = match self.state[j] {
                    VarState::AtLower => VarState::AtUpper,
                    VarState::AtUpper => VarState::AtLower,
                    s => s,
                };
            }
            Blocker::Row(r, at_upper) => {
                let leaving = self.basis[r];
                self.state[leaving] = if at_upper {
                    VarState::AtUpper
                } else {
                    VarState::AtLower
                };
                let entering_value = self.nonbasic_value(j) + sigma * t;
                self.state[j] = VarState::Basic;
                self.basis[r] = j;
                self.xb[r] = entering_value;
                // Binv ← E · Binv with the eta column from y.
                let m = self.m;
                let piv = y[r];
                for col in 0..m {
                    self.binv[r * m + col] /= piv;
                }
                for i in 0..m {
                    if i == r {
                        continue;
                    }
                    let f = y[i];
                    if f.abs() <= 1e-14 {
                        continue;
                    }
                    for col in 0..m {
                        let v = self.binv[r * m + col];
                        self.binv[i * m + col] -= f * v;
                    }
                }
                self.pivots += 1;
            }
            Blocker::None => unreachable!(),
        }
    }

    /// Rebuild the basis inverse from scratch and recompute basic values.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        if m == 0 {
            return Ok(());
        }
        // Dense B alongside an identity that becomes B^{-1}.
        let mut bmat = vec![0.0; m * m];
        for (pos, &j) in self.basis.iter().enumerate() {
            for &(r, v) in &self.cols[j] {
                bmat[r as usize * m + pos] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        // Gauss-Jordan with partial pivoting.
        for col in 0..m {
            let mut piv_row = col;
            let mut piv_val = bmat[col * m + col].abs();
            for r in col + 1..m {
                let v = bmat[r * m + col].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = r;
                }
            }
            if piv_val < 1e-12 {
                return Err(LpError::SingularBasis);
            }
            if piv_row != col {
                for c in 0..m {
                    bmat.swap(piv_row * m + c, col * m + c);
                    inv.swap(piv_row * m + c, col * m + c);
                }
            }
            let p = bmat[col * m + col];
            for c in 0..m {
                bmat[col * m + c] /= p;
                inv[col * m + c] /= p;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = bmat[r * m + col];
                if f == 0.0 {
                    continue;
                }
                for c in 0..m {
                    bmat[r * m + c] -= f * bmat[col * m + c];
                    inv[r * m + c] -= f * inv[col * m + c];
                }
            }
        }
        self.binv = inv;
        // xb = Binv (b - Σ nonbasic contributions).
        let mut rhs = self.b.clone();
        for j in 0..self.ncols {
            if self.state[j] == VarState::Basic {
                continue;
            }
            let v = self.nonbasic_value(j);
            if v != 0.0 {
                for &(r, a) in &self.cols[j] {
                    rhs[r as usize] -= a * v;
                }
            }
        }
        for i in 0..m {
            let mut acc = 0.0;
            let row = &self.binv[i * m..(i + 1) * m];
            for r in 0..m {
                acc += row[r] * rhs[r];
            }
            self.xb[i] = acc;
        }
        Ok(())
    }

    /// Optimize the given cost vector from the current basis. Returns
    /// `Optimal` (basis left at the optimum) or `Unbounded`.
    fn optimize(&mut self, cost: &[f64]) -> Result<Outcome, LpError> {
        let max_iter = 200 * (self.m + self.ncols) + 20_000;
        let mut bland = false;
        let mut degenerate_run = 0usize;
        let mut since_refactor = 0usize;
        self.refactor()?;
        for iter in 0..max_iter {
            if since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
                since_refactor = 0;
            }
            let pi = self.compute_duals(cost);
            let Some((j, sigma)) = self.price(cost, &pi, bland) else {
                return Ok(Outcome::Optimal(Solution {
                    x: Vec::new(),
                    objective: 0.0,
                    duals: Vec::new(),
                }));
            };
            let y = self.ftran(j);
            let (t, blocker) = self.ratio_test(j, sigma, &y);
            if matches!(blocker, Blocker::None) {
                return Ok(Outcome::Unbounded);
            }
            if t <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run > 40 {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }
            if matches!(blocker, Blocker::Row(..)) {
                since_refactor += 1;
            }
            self.apply_step(j, sigma, t, &y, blocker);
            let _ = iter;
        }
        Err(LpError::IterationLimit(max_iter))
    }
}
