//! Dense two-phase simplex with Bland's pivot rule.
//!
//! Problems are stated as `minimize c·x` subject to rows `a·x {≤,=,≥} b`.
//! Variables are nonnegative unless marked free; free variables are split into
//! a difference of two nonnegative columns.

use crate::{Error, Result};

/// Pivot magnitude below which an entry is treated as zero.
const PIVOT_EPS: f64 = 1e-10;
/// Phase-one objective above which the program is declared infeasible.
const FEASIBILITY_EPS: f64 = 1e-8;
/// Entries smaller than this are flushed to zero after each pivot.
const FLUSH_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
    free: Vec<bool>,
}

impl LinearProgram {
    /// A program over `num_vars` nonnegative variables minimizing `objective`.
    pub fn minimize(objective: Vec<f64>) -> Self {
        let num_vars = objective.len();
        LinearProgram {
            num_vars,
            objective,
            constraints: Vec::new(),
            free: vec![false; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn set_free(&mut self, var: usize) -> &mut Self {
        self.free[var] = true;
        self
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    /// Add a row given sparsely as `(variable, coefficient)` pairs.
    pub fn add_sparse(
        &mut self,
        terms: &[(usize, f64)],
        relation: Relation,
        rhs: f64,
    ) -> &mut Self {
        let mut coeffs = vec![0.0; self.num_vars];
        for &(j, c) in terms {
            coeffs[j] += c;
        }
        self.add_constraint(coeffs, relation, rhs)
    }

    fn validate(&self) -> Result<()> {
        if self.num_vars == 0 {
            return Err(Error::MalformedLp("no variables".into()));
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(Error::MalformedLp(
                "non-finite objective coefficient".into(),
            ));
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coeffs.len() != self.num_vars {
                return Err(Error::MalformedLp(format!(
                    "constraint {i} has {} coefficients, expected {}",
                    row.coeffs.len(),
                    self.num_vars
                )));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::MalformedLp(format!("constraint {i} is not finite")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub values: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(Solution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn optimal(self) -> Option<Solution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    /// Reduced costs, with the negated objective value in the last slot.
    cost: Vec<f64>,
    basis: Vec<usize>,
    num_cols: usize,
    pivots: usize,
    max_pivots: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.num_cols]
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<()> {
        self.pivots += 1;
        if self.pivots > self.max_pivots {
            return Err(Error::Cycling(self.pivots));
        }
        let width = self.num_cols + 1;
        let p = self.rows[row][col];
        for v in self.rows[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = std::mem::take(&mut self.rows[row]);
        let eliminate = |target: &mut Vec<f64>| {
            let factor = target[col];
            if factor != 0.0 {
                for k in 0..width {
                    let v = target[k] - factor * pivot_row[k];
                    target[k] = if v.abs() < FLUSH_EPS { 0.0 } else { v };
                }
                target[col] = 0.0;
            }
        };
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i != row {
                eliminate(r);
            }
        }
        eliminate(&mut self.cost);
        self.rows[row] = pivot_row;
        self.basis[row] = col;
        Ok(())
    }

    /// Run simplex iterations on the current cost row, allowing only columns
    /// for which `enterable` holds to enter.
    fn optimize(&mut self, enterable: &dyn Fn(usize) -> bool) -> Result<Step> {
        loop {
            // Bland: lowest-index improving column
            let Some(col) = (0..self.num_cols).find(|&j| enterable(j) && self.cost[j] < -PIVOT_EPS)
            else {
                return Ok(Step::Optimal);
            };
            // ratio test; ties broken by lowest basic variable index
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][col];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((best, best_ratio)) => {
                            if ratio < best_ratio - 1e-12
                                || (ratio <= best_ratio + 1e-12 && self.basis[i] < self.basis[best])
                            {
                                Some((i, ratio))
                            } else {
                                Some((best, best_ratio))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(Step::Unbounded),
                Some((row, _)) => self.pivot(row, col)?,
            }
        }
    }

    fn set_cost(&mut self, costs: &[f64]) {
        let width = self.num_cols + 1;
        let mut cost = vec![0.0; width];
        cost[..costs.len()].copy_from_slice(costs);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = costs.get(b).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for k in 0..width {
                    cost[k] -= cb * self.rows[i][k];
                }
            }
        }
        self.cost = cost;
    }
}

/// Solve `lp` to an optimal vertex, or report infeasibility/unboundedness.
pub fn solve(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;

    // structural columns: original vars, then the negative halves of free vars
    let mut neg_col = vec![None; lp.num_vars];
    let mut num_structural = lp.num_vars;
    for j in 0..lp.num_vars {
        if lp.free[j] {
            neg_col[j] = Some(num_structural);
            num_structural += 1;
        }
    }

    // normalise rows to nonnegative rhs; zero-rhs rows become ≤ so a slack can start basic
    let rows: Vec<(Vec<f64>, Relation, f64)> = lp
        .constraints
        .iter()
        .map(|c| {
            let mut coeffs = vec![0.0; num_structural];
            for j in 0..lp.num_vars {
                coeffs[j] = c.coeffs[j];
                if let Some(k) = neg_col[j] {
                    coeffs[k] = -c.coeffs[j];
                }
            }
            let flip = c.rhs < 0.0 || (c.rhs == 0.0 && c.relation == Relation::Ge);
            if flip {
                let relation = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (coeffs.iter().map(|v| -v).collect(), relation, -c.rhs)
            } else {
                (coeffs, c.relation, c.rhs)
            }
        })
        .collect();

    let num_slack = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let num_artificial = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let first_slack = num_structural;
    let first_artificial = first_slack + num_slack;
    let num_cols = first_artificial + num_artificial;

    let mut tableau_rows = Vec::with_capacity(rows.len());
    let mut basis = Vec::with_capacity(rows.len());
    let (mut next_slack, mut next_art) = (first_slack, first_artificial);
    for (coeffs, relation, rhs) in rows {
        let mut row = vec![0.0; num_cols + 1];
        row[..num_structural].copy_from_slice(&coeffs);
        row[num_cols] = rhs;
        match relation {
            Relation::Le => {
                row[next_slack] = 1.0;
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -1.0;
                next_slack += 1;
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            }
        }
        tableau_rows.push(row);
    }

    let m = tableau_rows.len();
    let mut t = Tableau {
        rows: tableau_rows,
        cost: Vec::new(),
        basis,
        num_cols,
        pivots: 0,
        max_pivots: 200_000 + 50 * (m + num_cols),
    };

    if num_artificial > 0 {
        let mut phase1 = vec![0.0; num_cols];
        phase1[first_artificial..].iter_mut().for_each(|c| *c = 1.0);
        t.set_cost(&phase1);
        t.optimize(&|_| true)?;
        let infeasibility = -t.cost[num_cols];
        if infeasibility > FEASIBILITY_EPS {
            return Ok(LpOutcome::Infeasible);
        }
        // drive zero-level artificials out of the basis where possible
        for i in 0..m {
            if t.basis[i] >= first_artificial {
                if let Some(col) = (0..first_artificial).find(|&j| t.rows[i][j].abs() > PIVOT_EPS) {
                    t.pivot(i, col)?;
                }
            }
        }
    }

    let mut costs = vec![0.0; num_cols];
    for j in 0..lp.num_vars {
        costs[j] = lp.objective[j];
        if let Some(k) = neg_col[j] {
            costs[k] = -lp.objective[j];
        }
    }
    t.set_cost(&costs);
    if let Step::Unbounded = t.optimize(&|j| j < first_artificial)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut column_values = vec![0.0; num_cols];
    for (i, &b) in t.basis.iter().enumerate() {
        column_values[b] = t.rhs(i);
    }
    let values: Vec<f64> = (0..lp.num_vars)
        .map(|j| column_values[j] - neg_col[j].map_or(0.0, |k| column_values[k]))
        .collect();
    let objective = values.iter().zip(&lp.objective).map(|(x, c)| x * c).sum();
    Ok(LpOutcome::Optimal(Solution {
        values,
        objective,
        pivots: t.pivots,
    }))
}
