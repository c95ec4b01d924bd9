//! A dense revised-simplex linear programming solver.
//!
//! Supports minimization with per-variable bounds (including free and fixed
//! variables) and `≤ / = / ≥` rows. Two solve paths are provided:
//!
//! * [`Problem::solve`] — bounded-variable primal simplex, suited to
//!   problems whose row count is moderate (the basis is `rows × rows`).
//! * [`Problem::solve_via_dual`] — for problems with *free variables only*
//!   and `≥ / =` rows, solves the dual instead (basis sized by the variable
//!   count) and recovers the primal solution from the dual multipliers.
//!   This is the right shape for the penalty-synthesis LPs, which have tens
//!   of variables but thousands of rows.
//!
//! The solver is deterministic: no randomness, ordered data structures,
//! Dantzig pricing with a Bland's-rule fallback for degeneracy. Solutions
//! are verified to 1e-7 row feasibility before being returned.

use thiserror::Error;

mod simplex;

use simplex::Standard;

/// Comparison direction of a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub(crate) struct Row {
    pub(crate) coeffs: Vec<(u32, f64)>,
    pub(crate) rel: Relation,
    pub(crate) rhs: f64,
}

/// Outcome of a solve.
#[derive(Debug, Clone)]
pub enum Outcome {
    Optimal(Solution),
    Infeasible,
    Unbounded,
}

impl Outcome {
    pub fn optimal(self) -> Option<Solution> {
        match self {
            Outcome::Optimal(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Outcome::Optimal(_))
    }
}

/// An optimal solution: variable values, objective, and row duals.
#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// One multiplier per row, in insertion order, for the row written as
    /// an equality after slacking (`a·x + s = b`). For the dual solve path
    /// these recover the primal variables.
    pub duals: Vec<f64>,
}

#[derive(Debug, Error)]
pub enum LpError {
    #[error("column {0} out of range ({1} variables)")]
    ColumnOutOfRange(u32, usize),

    #[error("non-finite coefficient {0}")]
    NonFinite(f64),

    #[error("duplicate column {0} in row")]
    DuplicateColumn(u32),

    #[error("invalid bounds for variable {0}: [{1}, {2}]")]
    BadBounds(usize, f64, f64),

    #[error("iteration limit exceeded ({0} pivots)")]
    IterationLimit(usize),

    #[error("basis became numerically singular")]
    SingularBasis,

    #[error("solution failed the feasibility check (residual {0:.3e})")]
    ResidualCheck(f64),

    #[error("dual path requires {0}")]
    DualShape(&'static str),

    #[error("dual is infeasible: primal is unbounded or infeasible")]
    DualInfeasible,
}

/// A linear program: minimize `c·x` subject to rows and variable bounds.
///
/// Variables default to free (`(-inf, inf)`) with zero objective weight.
#[derive(Debug, Clone)]
pub struct Problem {
    n: usize,
    objective: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    rows: Vec<Row>,
}

impl Problem {
    pub fn new(num_vars: usize) -> Self {
        Problem {
            n: num_vars,
            objective: vec![0.0; num_vars],
            lower: vec![f64::NEG_INFINITY; num_vars],
            upper: vec![f64::INFINITY; num_vars],
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Right-hand sides of the rows, in insertion order.
    pub fn rhs_iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(|r| r.rhs)
    }

    /// Set the objective coefficient (minimization).
    pub fn set_objective(&mut self, j: u32, c: f64) -> Result<(), LpError> {
        if !c.is_finite() {
            return Err(LpError::NonFinite(c));
        }
        if j as usize >= self.n {
            return Err(LpError::ColumnOutOfRange(j, self.n));
        }
        self.objective[j as usize] = c;
        Ok(())
    }

    /// Set variable bounds; `-inf`/`inf` allowed, `lo == hi` fixes the
    /// variable.
    pub fn set_bounds(&mut self, j: u32, lo: f64, hi: f64) -> Result<(), LpError> {
        if j as usize >= self.n {
            return Err(LpError::ColumnOutOfRange(j, self.n));
        }
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(LpError::BadBounds(j as usize, lo, hi));
        }
        self.lower[j as usize] = lo;
        self.upper[j as usize] = hi;
        Ok(())
    }

    /// Add a row `Σ coeffs · x  rel  rhs`. Zero coefficients are dropped.
    pub fn add_row(
        &mut self,
        rel: Relation,
        rhs: f64,
        coeffs: &[(u32, f64)],
    ) -> Result<(), LpError> {
        if !rhs.is_finite() {
            return Err(LpError::NonFinite(rhs));
        }
        let mut cleaned: Vec<(u32, f64)> = Vec::with_capacity(coeffs.len());
        for &(j, v) in coeffs {
            if j as usize >= self.n {
                return Err(LpError::ColumnOutOfRange(j, self.n));
            }
            if !v.is_finite() {
                return Err(LpError::NonFinite(v));
            }
            if v != 0.0 {
                cleaned.push((j, v));
            }
        }
        cleaned.sort_unstable_by_key(|&(j, _)| j);
        for w in cleaned.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(LpError::DuplicateColumn(w[0].0));
            }
        }
        self.rows.push(Row { coeffs: cleaned, rel, rhs });
        Ok(())
    }

    /// Solve with the bounded-variable primal simplex.
    pub fn solve(&self) -> Result<Outcome, LpError> {
        let mut std = Standard::build(self);
        let out = std.run()?;
        if let Outcome::Optimal(ref s) = out {
            self.verify(s)?;
        }
        Ok(out)
    }

    /// Solve through the dual. Requires every variable free and every row
    /// `Ge` or `Eq` (express variable bounds as rows if needed — callers
    /// with this problem shape have few variables, so the extra rows are
    /// cheap). `assume_bounded` must be `true` if the caller can guarantee
    /// the primal objective is bounded on the feasible set (e.g. via an
    /// explicit cap row); it converts an infeasible dual into
    /// `Outcome::Infeasible` instead of an error.
    pub fn solve_via_dual(&self, assume_bounded: bool) -> Result<Outcome, LpError> {
        for j in 0..self.n {
            if self.lower[j].is_finite() || self.upper[j].is_finite() {
                return Err(LpError::DualShape("free variables only"));
            }
        }
        if self.rows.iter().any(|r| r.rel == Relation::Le) {
            return Err(LpError::DualShape("rows must be Ge or Eq"));
        }
        // Dual: min Σ (-b_i) y_i  s.t.  Σ_i a_ij y_i = c_j,  y_i ≥ 0 for Ge
        // rows, y_i free for Eq rows.
        let m = self.rows.len();
        let mut dual = Problem::new(m);
        for (i, row) in self.rows.iter().enumerate() {
            dual.set_objective(i as u32, -row.rhs)?;
            if row.rel == Relation::Ge {
                dual.set_bounds(i as u32, 0.0, f64::INFINITY)?;
            }
        }
        // Transpose the coefficient matrix.
        let mut cols: Vec<Vec<(u32, f64)>> = vec![Vec::new(); self.n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in &row.coeffs {
                cols[j as usize].push((i as u32, v));
            }
        }
        for (j, col) in cols.iter().enumerate() {
            dual.add_row(Relation::Eq, self.objective[j], col)?;
        }
        match dual.solve()? {
            Outcome::Optimal(ds) => {
                // Primal recovery: x_j = -(dual multiplier of equality row j).
                let x: Vec<f64> = ds.duals.iter().map(|&d| -d).collect();
                let objective = -ds.objective;
                // Row duals of the primal are the dual's variable values.
                let sol = Solution { x, objective, duals: ds.x };
                self.check_solution(&sol)?;
                Ok(Outcome::Optimal(sol))
            }
            // Dual unbounded ⇒ primal infeasible.
            Outcome::Unbounded => Ok(Outcome::Infeasible),
            Outcome::Infeasible => {
                if assume_bounded {
                    Ok(Outcome::Infeasible)
                } else {
                    Err(LpError::DualInfeasible)
                }
            }
        }
    }

    /// Verify a solution against rows and bounds to 1e-7 (scaled).
    fn check_solution(&self, sol: &Solution) -> Result<(), LpError> {
        let mut worst = 0.0f64;
        for row in &self.rows {
            let lhs: f64 = row.coeffs.iter().map(|&(j, v)| v * sol.x[j as usize]).sum();
            let scale = 1.0 + row.rhs.abs();
            let resid = match row.rel {
                Relation::Le => (lhs - row.rhs) / scale,
                Relation::Ge => (row.rhs - lhs) / scale,
                Relation::Eq => (lhs - row.rhs).abs() / scale,
            };
            worst = worst.max(resid);
        }
        for j in 0..self.n {
            let x = sol.x[j];
            let scale = 1.0 + x.abs();
            if self.lower[j].is_finite() {
                worst = worst.max((self.lower[j] - x) / scale);
            }
            if self.upper[j].is_finite() {
                worst = worst.max((x - self.upper[j]) / scale);
            }
        }
        if worst > 1e-7 {
            return Err(LpError::ResidualCheck(worst));
        }
        Ok(())
    }

    pub(crate) fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub(crate) fn objective_ref(&self) -> &[f64] {
        &self.objective
    }

    pub(crate) fn lower_ref(&self) -> &[f64] {
        &self.lower
    }

    pub(crate) fn upper_ref(&self) -> &[f64] {
        &self.upper
    }

    pub(crate) fn verify(&self, sol: &Solution) -> Result<(), LpError> {
        self.check_solution(sol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_bounded_lp() {
        // min -2x - y  s.t. x + y ≤ 1, 0 ≤ x,y ≤ 1 → x=1, y=0 (obj -2).
        let mut p = Problem::new(2);
        p.set_objective(0, -2.0).unwrap();
        p.set_objective(1, -1.0).unwrap();
        p.set_bounds(0, 0.0, 1.0).unwrap();
        p.set_bounds(1, 0.0, 1.0).unwrap();
        p.add_row(Relation::Le, 1.0, &[(0, 1.0), (1, 1.0)]).unwrap();
        let sol = p.solve().unwrap().optimal().unwrap();
        assert!((sol.objective + 2.0).abs() < 1e-9);
        assert!((sol.x[0] - 1.0).abs() < 1e-9);
        assert!(sol.x[1].abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible() {
        let mut p = Problem::new(1);
        p.set_bounds(0, 0.0, 1.0).unwrap();
        p.add_row(Relation::Ge, 2.0, &[(0, 1.0)]).unwrap();
        assert!(matches!(p.solve().unwrap(), Outcome::Infeasible));
    }

    #[test]
    fn detects_unbounded() {
        let mut p = Problem::new(1);
        p.set_objective(0, -1.0).unwrap();
        p.set_bounds(0, 0.0, f64::INFINITY).unwrap();
        assert!(matches!(p.solve().unwrap(), Outcome::Unbounded));
    }

    #[test]
    fn equality_with_free_variable() {
        // min x + y  s.t.  x - y = 3,  y ≥ 0 → y = 0, x = 3.
        let mut p = Problem::new(2);
        p.set_objective(0, 1.0).unwrap();
        p.set_objective(1, 1.0).unwrap();
        p.set_bounds(1, 0.0, f64::INFINITY).unwrap();
        p.add_row(Relation::Eq, 3.0, &[(0, 1.0), (1, -1.0)]).unwrap();
        let sol = p.solve().unwrap().optimal().unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-9);
        assert!((sol.x[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn negative_free_optimum() {
        // min x  s.t.  x ≥ -5 as a row (variable itself free) → x = -5.
        let mut p = Problem::new(1);
        p.set_objective(0, 1.0).unwrap();
        p.add_row(Relation::Ge, -5.0, &[(0, 1.0)]).unwrap();
        let sol = p.solve().unwrap().optimal().unwrap();
        assert!((sol.x[0] + 5.0).abs() < 1e-9);
    }

    #[test]
    fn beale_cycling_example_terminates() {
        // Beale's classic degenerate LP; Dantzig pricing cycles without an
        // anti-cycling rule.
        let mut p = Problem::new(4);
        for (j, c) in [(0u32, -0.75), (1, 150.0), (2, -0.02), (3, 6.0)] {
            p.set_objective(j, c).unwrap();
            p.set_bounds(j, 0.0, f64::INFINITY).unwrap();
        }
        p.add_row(Relation::Le, 0.0, &[(0, 0.25), (1, -60.0), (2, -0.04), (3, 9.0)])
            .unwrap();
        p.add_row(Relation::Le, 0.0, &[(0, 0.5), (1, -90.0), (2, -0.02), (3, 3.0)])
            .unwrap();
        p.add_row(Relation::Le, 1.0, &[(2, 1.0)]).unwrap();
        let sol = p.solve().unwrap().optimal().unwrap();
        assert!((sol.objective + 0.05).abs() < 1e-9);
    }

    #[test]
    fn fixed_variables_respected() {
        let mut p = Problem::new(2);
        p.set_objective(0, 1.0).unwrap();
        p.set_bounds(0, 0.0, 10.0).unwrap();
        p.set_bounds(1, 2.5, 2.5).unwrap();
        p.add_row(Relation::Ge, 4.0, &[(0, 1.0), (1, 1.0)]).unwrap();
        let sol = p.solve().unwrap().optimal().unwrap();
        assert!((sol.x[1] - 2.5).abs() < 1e-12);
        assert!((sol.x[0] - 1.5).abs() < 1e-9);
    }

    #[test]
    fn dual_path_matches_direct_on_penalty_shaped_lp() {
        // max g (= min -g) for a NEQ penalty on one edge:
        // variables: t0 (offset), h1, h2, J, g.
        // E(s1,s2) = t0 + h1 s1 + h2 s2 + J s1 s2.
        // E(+-) = 0, E(-+) = 0, E(++) ≥ g, E(--) ≥ g,
        // -2 ≤ h ≤ 2, -1 ≤ J ≤ 1 (as rows), g ≤ 100 cap.
        let build = || {
            let mut p = Problem::new(5);
            p.set_objective(4, -1.0).unwrap();
            // E(+-) = t0 + h1 - h2 - J = 0
            p.add_row(Relation::Eq, 0.0, &[(0, 1.0), (1, 1.0), (2, -1.0), (3, -1.0)])
                .unwrap();
            // E(-+) = t0 - h1 + h2 - J = 0
            p.add_row(Relation::Eq, 0.0, &[(0, 1.0), (1, -1.0), (2, 1.0), (3, -1.0)])
                .unwrap();
            // E(++) - g ≥ 0
            p.add_row(
                Relation::Ge,
                0.0,
                &[(0, 1.0), (1, 1.0), (2, 1.0), (3, 1.0), (4, -1.0)],
            )
            .unwrap();
            // E(--) - g ≥ 0
            p.add_row(
                Relation::Ge,
                0.0,
                &[(0, 1.0), (1, -1.0), (2, -1.0), (3, 1.0), (4, -1.0)],
            )
            .unwrap();
            for j in [1u32, 2] {
                p.add_row(Relation::Ge, -2.0, &[(j, 1.0)]).unwrap();
                p.add_row(Relation::Ge, -2.0, &[(j, -1.0)]).unwrap();
            }
            p.add_row(Relation::Ge, -1.0, &[(3, 1.0)]).unwrap();
            p.add_row(Relation::Ge, -1.0, &[(3, -1.0)]).unwrap();
            p.add_row(Relation::Ge, -100.0, &[(4, -1.0)]).unwrap();
            p
        };
        let direct = build().solve().unwrap().optimal().unwrap();
        let viadual = build().solve_via_dual(true).unwrap().optimal().unwrap();
        // Optimal gap for NEQ on an edge is 2 (J = 1, offset 1).
        assert!((direct.objective + 2.0).abs() < 1e-8, "{}", direct.objective);
        assert!((viadual.objective + 2.0).abs() < 1e-8);
        assert!((viadual.x[4] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn dual_path_detects_infeasible() {
        // x ≥ 1 and -x ≥ 1 cannot hold.
        let mut p = Problem::new(1);
        p.set_objective(0, 1.0).unwrap();
        p.add_row(Relation::Ge, 1.0, &[(0, 1.0)]).unwrap();
        p.add_row(Relation::Ge, 1.0, &[(0, -1.0)]).unwrap();
        assert!(matches!(p.solve_via_dual(true).unwrap(), Outcome::Infeasible));
    }
}
