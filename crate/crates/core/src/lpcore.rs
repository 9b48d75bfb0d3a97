//! Dense linear programming: maximize `c.x` subject to `A x <= b`, `x` free.
//!
//! The solver works on the dual, `min b.y` subject to `A^T y = c`, `y >= 0`,
//! whose tableau has one row per primal variable. For the problems built by
//! the Monge-Kantorovich module that is a few hundred rows against many
//! thousands of columns, far smaller than a tableau with a row per
//! constraint. The two-phase tableau method runs with Bland's rule
//! throughout. A primal optimum is recovered from the final basis and then
//! checked against every constraint.
//!
//! ```
//! use qmetric::lpcore::{LinearProgram, LpOutcome};
//!
//! let mut lp = LinearProgram::new(vec![1.0, 1.0]);
//! lp.add_constraint(vec![1.0, 0.0], 1.0).unwrap();
//! lp.add_constraint(vec![0.0, 1.0], 1.0).unwrap();
//! lp.add_constraint(vec![1.0, 1.0], 1.5).unwrap();
//! match lp.solve(1e-7).unwrap() {
//!     LpOutcome::Optimal(sol) => assert!((sol.optimum - 1.5).abs() < 1e-12),
//!     other => panic!("unexpected {other:?}"),
//! }
//! ```
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tableaux with more entries than this update their rows in parallel.
const PARALLEL_ENTRIES: usize = 1 << 18;
const PIVOT_TOL: f64 = 1e-9;

/// `max c.x` subject to `row_j . x <= bound_j`, with free variables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    objective: Vec<f64>,
    rows: Vec<Vec<f64>>,
    bounds: Vec<f64>,
}

/// Outcome of [`LinearProgram::solve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    /// `c.x` at the returned point.
    pub optimum: f64,
    pub argmax: Vec<f64>,
    /// Largest constraint violation `row . x - bound` (negative when slack).
    pub max_residual: f64,
    /// Simplex pivots spent across both phases.
    pub pivots: usize,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram { objective, rows: Vec::new(), bounds: Vec::new() }
    }

    pub fn add_constraint(&mut self, row: Vec<f64>, bound: f64) -> Result<()> {
        if row.len() != self.objective.len() {
            return Err(Error::Shape(format!(
                "constraint has {} coefficients, objective has {}",
                row.len(),
                self.objective.len()
            )));
        }
        if !bound.is_finite() || row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("constraint coefficients must be finite".into()));
        }
        self.rows.push(row);
        self.bounds.push(bound);
        Ok(())
    }

    pub fn set_objective(&mut self, objective: Vec<f64>) -> Result<()> {
        if objective.len() != self.objective.len() {
            return Err(Error::Shape("objective length changed".into()));
        }
        self.objective = objective;
        Ok(())
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.rows.len()
    }

    pub fn constraints(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.rows.iter().map(Vec::as_slice).zip(self.bounds.iter().copied())
    }

    /// Largest `row . x - bound` over all constraints.
    pub fn max_residual(&self, x: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(&self.bounds)
            .map(|(r, b)| dot(r, x) - b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Solve to tolerance `tol`: the returned point violates no constraint
    /// by more than `tol` and its objective matches the dual bound to `tol`
    /// relative to the optimum's magnitude.
    pub fn solve(&self, tol: f64) -> Result<LpOutcome> {
        self.solve_with(&self.objective, tol)
    }

    /// Solve with a different objective over the same constraints.
    pub fn solve_with(&self, objective: &[f64], tol: f64) -> Result<LpOutcome> {
        if objective.len() != self.n_vars() {
            return Err(Error::Shape(format!("objective has {} entries for {} variables", objective.len(), self.n_vars())));
        }
        if objective.iter().any(|v| !v.is_finite()) {
            return Err(Error::Precondition("objective coefficients must be finite".into()));
        }
        let n = self.n_vars();
        if n == 0 {
            return Ok(if self.bounds.iter().all(|&b| b >= -tol) {
                LpOutcome::Optimal(LpSolution { optimum: 0.0, argmax: vec![], max_residual: 0.0, pivots: 0 })
            } else {
                LpOutcome::Infeasible
            });
        }
        let mut dual = DualTableau::new(self, objective);
        let feasible = dual.phase_one(tol)?;
        if !feasible {
            return self.classify_without_dual(tol);
        }
        dual.drive_out_artificials();
        if !dual.phase_two(self)? {
            return Ok(LpOutcome::Infeasible);
        }
        let x = dual.primal(self)?;
        let optimum = dot(objective, &x);
        let max_residual = self.max_residual(&x);
        let scale = 1.0 + optimum.abs();
        let dual_value = dual.objective_value();
        if max_residual > tol || (optimum - dual_value).abs() > tol * scale {
            return Err(Error::Lp(format!(
                "recovered point fails verification (residual {max_residual:.3e}, primal {optimum}, dual {dual_value})"
            )));
        }
        Ok(LpOutcome::Optimal(LpSolution { optimum, argmax: x, max_residual, pivots: dual.pivots }))
    }

    /// The dual is infeasible, so the primal is unbounded or infeasible;
    /// decide by maximizing `-t` subject to `A x - t <= b`, `t >= 0`.
    fn classify_without_dual(&self, tol: f64) -> Result<LpOutcome> {
        let n = self.n_vars();
        let mut obj = vec![0.0; n + 1];
        obj[n] = -1.0;
        let mut aux = LinearProgram::new(obj);
        for (row, b) in self.constraints() {
            let mut r = row.to_vec();
            r.push(-1.0);
            aux.add_constraint(r, b)?;
        }
        let mut t_row = vec![0.0; n + 1];
        t_row[n] = -1.0;
        aux.add_constraint(t_row, 0.0)?;
        match aux.solve(tol)? {
            LpOutcome::Optimal(s) if s.optimum >= -tol => Ok(LpOutcome::Unbounded),
            LpOutcome::Optimal(_) => Ok(LpOutcome::Infeasible),
            other => Err(Error::Lp(format!("feasibility subproblem ended as {other:?}"))),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Tableau for `min b.y` s.t. `D A^T y = D c`, `y >= 0`, where `D` flips the
/// sign of rows with negative right-hand side.
///
/// Column 0 holds the right-hand side, columns `1..=m` the dual variables
/// (one per primal constraint), and `m+1..=m+n` the phase-one artificials.
struct DualTableau {
    rows: Vec<Vec<f64>>,
    cost_row: Vec<f64>,
    basis: Vec<usize>,
    signs: Vec<f64>,
    m: usize,
    pivots: usize,
}

impl DualTableau {
    fn new(lp: &LinearProgram, objective: &[f64]) -> Self {
        let n = lp.n_vars();
        let m = lp.n_constraints();
        let signs: Vec<f64> = objective.iter().map(|&c| if c < 0.0 { -1.0 } else { 1.0 }).collect();
        let width = 1 + m + n;
        let mut rows = vec![vec![0.0; width]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            row[0] = signs[i] * objective[i];
            row[1 + m + i] = 1.0;
        }
        for (j, con) in lp.rows.iter().enumerate() {
            for (i, &a) in con.iter().enumerate() {
                if a != 0.0 {
                    rows[i][1 + j] = signs[i] * a;
                }
            }
        }
        let basis = (0..n).map(|i| 1 + m + i).collect();
        DualTableau { rows, cost_row: vec![0.0; width], basis, signs, m, pivots: 0 }
    }

    fn width(&self, phase_one: bool) -> usize {
        if phase_one {
            self.rows[0].len()
        } else {
            1 + self.m
        }
    }

    fn objective_value(&self) -> f64 {
        -self.cost_row[0]
    }

    /// Returns whether the dual is feasible.
    fn phase_one(&mut self, tol: f64) -> Result<bool> {
        let width = self.width(true);
        let mut z = vec![0.0; width];
        for row in &self.rows {
            for (zj, &v) in z[..=self.m].iter_mut().zip(row.iter()) {
                *zj -= v;
            }
        }
        self.cost_row = z;
        self.iterate(true)?;
        let scale = 1.0 + self.rows.iter().map(|r| r[0].abs()).fold(0.0, f64::max);
        Ok(self.objective_value() <= tol * scale)
    }

    /// Pivot basic artificials out wherever a structural column allows it.
    fn drive_out_artificials(&mut self) {
        let first_art = 1 + self.m;
        for i in 0..self.rows.len() {
            if self.basis[i] < first_art {
                continue;
            }
            let row = &self.rows[i];
            let best = (1..first_art)
                .map(|j| (j, row[j].abs()))
                .filter(|&(_, v)| v > PIVOT_TOL)
                .fold(None, |acc: Option<(usize, f64)>, cur| match acc {
                    Some(a) if a.1 >= cur.1 => Some(a),
                    _ => Some(cur),
                });
            if let Some((q, _)) = best {
                self.rows[i][0] = 0.0;
                self.pivot(i, q, self.width(true));
            }
        }
    }

    /// Returns false when the dual is unbounded.
    fn phase_two(&mut self, lp: &LinearProgram) -> Result<bool> {
        let width = self.width(false);
        let mut z = vec![0.0; width];
        z[1..].copy_from_slice(&lp.bounds);
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cost = if b <= self.m { lp.bounds[b - 1] } else { 0.0 };
            if cost != 0.0 {
                for (zj, &v) in z.iter_mut().zip(row[..width].iter()) {
                    *zj -= cost * v;
                }
            }
        }
        for &b in &self.basis {
            if b <= self.m {
                z[b] = 0.0;
            }
        }
        self.cost_row = z;
        self.iterate(false)
    }

    /// Bland's rule simplex iterations. Returns false on an unbounded ray.
    fn iterate(&mut self, phase_one: bool) -> Result<bool> {
        let width = self.width(phase_one);
        let cost_scale = 1.0 + self.cost_row[1..=self.m].iter().map(|v| v.abs()).fold(0.0, f64::max);
        let rc_tol = 1e-10 * cost_scale;
        let limit = 50 * (self.rows.len() + width) + 10_000;
        loop {
            let Some(q) = (1..=self.m).find(|&j| self.cost_row[j] < -rc_tol) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                let a = row[q];
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = row[0].max(0.0) / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        let tie = (ratio - br).abs() <= 1e-12 * (1.0 + br);
                        if ratio < br && !tie || tie && self.basis[i] < self.basis[bi] {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
            let Some((p, _)) = leave else {
                return Ok(false);
            };
            self.pivot(p, q, width);
            if self.pivots > limit {
                return Err(Error::Lp(format!("no convergence after {} pivots", self.pivots)));
            }
        }
    }

    fn pivot(&mut self, p: usize, q: usize, width: usize) {
        self.pivots += 1;
        let mut prow = std::mem::take(&mut self.rows[p]);
        let inv = 1.0 / prow[q];
        for v in &mut prow[..width] {
            *v *= inv;
        }
        prow[q] = 1.0;
        let nz: Vec<usize> = (0..width).filter(|&j| prow[j] != 0.0).collect();
        let sparse = nz.len() * 3 < width;
        let update = |row: &mut Vec<f64>| {
            if row.is_empty() {
                return;
            }
            let f = row[q];
            if f == 0.0 {
                return;
            }
            if sparse {
                for &j in &nz {
                    row[j] -= f * prow[j];
                }
            } else {
                for (r, &pv) in row[..width].iter_mut().zip(&prow[..width]) {
                    *r -= f * pv;
                }
            }
            row[q] = 0.0;
        };
        if self.rows.len() * width > PARALLEL_ENTRIES {
            self.rows.par_iter_mut().for_each(update);
        } else {
            self.rows.iter_mut().for_each(update);
        }
        update(&mut self.cost_row);
        self.rows[p] = prow;
        self.basis[p] = q;
    }

    /// Simplex multipliers `pi` with `B^T pi = c_B`, mapped back through the
    /// row signs; this is the primal optimum.
    fn primal(&self, lp: &LinearProgram) -> Result<Vec<f64>> {
        let n = self.rows.len();
        let mut mat = vec![vec![0.0; n + 1]; n];
        for (k, &b) in self.basis.iter().enumerate() {
            if b <= self.m {
                let con = &lp.rows[b - 1];
                for i in 0..n {
                    mat[k][i] = self.signs[i] * con[i];
                }
                mat[k][n] = lp.bounds[b - 1];
            } else {
                mat[k][b - 1 - self.m] = 1.0;
            }
        }
        let pi = solve_dense(mat).ok_or_else(|| Error::Lp("final basis is singular".into()))?;
        Ok(pi.iter().zip(&self.signs).map(|(p, s)| p * s).collect())
    }
}

/// Gaussian elimination with partial pivoting on an augmented `n x (n+1)` matrix.
fn solve_dense(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-13 {
            return None;
        }
        a.swap(col, piv);
        let (top, rest) = a.split_at_mut(col + 1);
        let prow = &top[col];
        for row in rest.iter_mut() {
            let f = row[col] / prow[col];
            if f != 0.0 {
                for (r, &p) in row[col..].iter_mut().zip(&prow[col..]) {
                    *r -= f * p;
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (a[i][n] - s) / a[i][i];
    }
    Some(x)
}
