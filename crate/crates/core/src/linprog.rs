//! Exact rational linear programming over free variables.
//!
//! A small dense two-phase simplex with Bland's rule, used wherever the crate
//! needs exact feasibility certificates or exact linear maximization:
//! inscribed cubes, 1-D splitting patterns, no-splitting certificates, and
//! boundedness checks for halfspace intersections. Everything is computed
//! over [`Rat`], so "infeasible" and "optimal" are exact statements, not
//! tolerances.
//!
//! Variables are free reals; internally each is split into a difference of
//! two non-negative variables before the tableau is formed. Bland's rule
//! guarantees termination.

use crate::rat::Rat;

/// Relation of a linear constraint `coeffs . x REL rhs`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

/// A linear constraint over the problem's free variables.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Rat>,
    pub rel: Rel,
    pub rhs: Rat,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rat>, rel: Rel, rhs: Rat) -> Self {
        Constraint { coeffs, rel, rhs }
    }

    pub fn le(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Self::new(coeffs, Rel::Le, rhs)
    }

    pub fn ge(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Self::new(coeffs, Rel::Ge, rhs)
    }

    pub fn eq(coeffs: Vec<Rat>, rhs: Rat) -> Self {
        Self::new(coeffs, Rel::Eq, rhs)
    }
}

/// Outcome of an exact linear program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { point: Vec<Rat>, value: Rat },
}

impl LpOutcome {
    pub fn point(&self) -> Option<&[Rat]> {
        match self {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

/// Maximizes `objective . x` over the constraints. `n_vars` free variables.
pub fn maximize(n_vars: usize, objective: &[Rat], constraints: &[Constraint]) -> LpOutcome {
    assert_eq!(objective.len(), n_vars);
    Tableau::build(n_vars, objective, constraints).solve()
}

/// Exact feasibility: some point satisfying all constraints, if any exists.
pub fn feasible_point(n_vars: usize, constraints: &[Constraint]) -> Option<Vec<Rat>> {
    match maximize(n_vars, &vec![Rat::zero(); n_vars], constraints) {
        LpOutcome::Optimal { point, .. } => Some(point),
        LpOutcome::Infeasible => None,
        LpOutcome::Unbounded => unreachable!("zero objective cannot be unbounded"),
    }
}

/// Dense simplex tableau in standard form.
///
/// Columns: `2*n_vars` split variables, then slacks, then artificials, then
/// the right-hand side. Rows: one per constraint, plus the objective row.
struct Tableau {
    n_vars: usize,
    cols: usize,
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    n_structural: usize,
    first_artificial: usize,
    objective: Vec<Rat>,
}

impl Tableau {
    fn build(n_vars: usize, objective: &[Rat], constraints: &[Constraint]) -> Self {
        let m = constraints.len();
        let n_split = 2 * n_vars;
        let mut n_slacks = 0;
        for c in constraints {
            if c.rel != Rel::Eq {
                n_slacks += 1;
            }
        }
        // Every row gets an artificial variable so phase 1 starts from an
        // identity basis regardless of signs.
        let n_art = m;
        let n_structural = n_split + n_slacks;
        let cols = n_structural + n_art + 1;
        let rhs_col = cols - 1;

        let mut rows = vec![vec![Rat::zero(); cols]; m];
        let mut basis = vec![0usize; m];
        let mut slack_idx = 0;
        for (r, c) in constraints.iter().enumerate() {
            assert_eq!(c.coeffs.len(), n_vars, "constraint arity mismatch");
            for (j, a) in c.coeffs.iter().enumerate() {
                rows[r][2 * j] = a.clone();
                rows[r][2 * j + 1] = -a;
            }
            match c.rel {
                Rel::Le => {
                    rows[r][n_split + slack_idx] = Rat::one();
                    slack_idx += 1;
                }
                Rel::Ge => {
                    rows[r][n_split + slack_idx] = -Rat::one();
                    slack_idx += 1;
                }
                Rel::Eq => {}
            }
            rows[r][rhs_col] = c.rhs.clone();
            // Normalize to a non-negative right-hand side.
            if rows[r][rhs_col].is_negative() {
                for v in rows[r].iter_mut() {
                    *v = -v.clone();
                }
            }
            rows[r][n_structural + r] = Rat::one();
            basis[r] = n_structural + r;
        }

        Tableau {
            n_vars,
            cols,
            rows,
            basis,
            n_structural,
            first_artificial: n_structural,
            objective: objective.to_vec(),
        }
    }

    fn rhs_col(&self) -> usize {
        self.cols - 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let piv = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v = &*v / &piv;
        }
        for r in 0..self.rows.len() {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            let factor = self.rows[r][col].clone();
            for c in 0..self.cols {
                let delta = &factor * &self.rows[row][c];
                self.rows[r][c] -= delta;
            }
        }
        self.basis[row] = col;
    }

    /// Runs the simplex on a cost row (reduced costs for minimization).
    /// Returns false if the problem is unbounded in this phase.
    fn run(&mut self, cost: &mut Vec<Rat>, allow: usize) -> bool {
        loop {
            // Bland: entering column = lowest index with negative reduced cost.
            let mut enter = None;
            for j in 0..allow {
                if cost[j].is_negative() {
                    enter = Some(j);
                    break;
                }
            }
            let Some(col) = enter else { return true };
            // Ratio test, Bland tie-break on basis index.
            let mut leave: Option<(usize, Rat)> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][col].is_positive() {
                    let ratio = &self.rows[r][self.rhs_col()] / &self.rows[r][col];
                    leave = match leave.take() {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio
                                || (ratio == bratio && self.basis[r] < self.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else { return false };
            self.pivot(row, col);
            // Update cost row.
            let factor = cost[col].clone();
            if !factor.is_zero() {
                for c in 0..self.cols {
                    let delta = &factor * &self.rows[row][c];
                    cost[c] -= delta;
                }
            }
        }
    }

    fn solve(mut self) -> LpOutcome {
        // Phase 1: minimize the sum of artificials.
        let mut cost = vec![Rat::zero(); self.cols];
        for j in self.first_artificial..self.cols - 1 {
            cost[j] = Rat::one();
        }
        // Price out the initial artificial basis.
        for r in 0..self.rows.len() {
            for c in 0..self.cols {
                let delta = self.rows[r][c].clone();
                cost[c] -= delta;
            }
        }
        let ok = self.run(&mut cost, self.cols - 1);
        debug_assert!(ok, "phase 1 is bounded below by zero");
        let phase1_value = -cost[self.rhs_col()].clone();
        if !phase1_value.is_zero() {
            return LpOutcome::Infeasible;
        }
        // Drive any artificial still in the basis out of it (or leave it at
        // value zero when its row is redundant; phase 2 never lets it grow
        // because artificial columns are excluded from pricing).
        for r in 0..self.rows.len() {
            if self.basis[r] >= self.first_artificial {
                let mut pivot_col = None;
                for j in 0..self.n_structural {
                    if !self.rows[r][j].is_zero() {
                        pivot_col = Some(j);
                        break;
                    }
                }
                if let Some(col) = pivot_col {
                    self.pivot(r, col);
                }
            }
        }

        // Phase 2: minimize -objective over structural columns only.
        let mut cost = vec![Rat::zero(); self.cols];
        for j in 0..self.n_vars {
            cost[2 * j] = -self.objective[j].clone();
            cost[2 * j + 1] = self.objective[j].clone();
        }
        // Price out the current basis.
        for r in 0..self.rows.len() {
            let b = self.basis[r];
            if !cost[b].is_zero() {
                let factor = cost[b].clone();
                for c in 0..self.cols {
                    let delta = &factor * &self.rows[r][c];
                    cost[c] -= delta;
                }
            }
        }
        if !self.run(&mut cost, self.n_structural) {
            return LpOutcome::Unbounded;
        }

        // Read off the split variables.
        let mut split = vec![Rat::zero(); self.n_structural];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n_structural {
                split[b] = self.rows[r][self.rhs_col()].clone();
            }
        }
        let point: Vec<Rat> = (0..self.n_vars)
            .map(|j| &split[2 * j] - &split[2 * j + 1])
            .collect();
        let value = self
            .objective
            .iter()
            .zip(&point)
            .map(|(c, x)| c * x)
            .sum();
        LpOutcome::Optimal { point, value }
    }
}
