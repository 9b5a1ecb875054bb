//! Phase-one simplex for small dense linear feasibility systems.
//!
//! Variables are nonnegative. Each constraint is `a·x (>=|=|<=) b`. The
//! routine drives a sum-of-artificials objective to zero with Bland's rule,
//! so the pivot sequence (and the returned vertex) depends only on the input.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Ge,
    Eq,
    #[cfg_attr(not(test), allow(dead_code))]
    Le,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A feasibility system `{x >= 0 : constraints}`.
#[derive(Debug, Clone, Default)]
pub struct FeasibilitySystem {
    num_vars: usize,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feasibility {
    Feasible(Vec<f64>),
    Infeasible { residual: f64 },
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-12;
const ACCEPT_EPS: f64 = 1e-12;

impl FeasibilitySystem {
    pub fn new(num_vars: usize) -> Self {
        FeasibilitySystem {
            num_vars,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.num_vars, "constraint width");
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn solve(&self) -> Result<Feasibility> {
        Tableau::build(self).run()
    }
}

struct Tableau {
    rows: usize,
    cols: usize, // structural + slack + artificial, rhs stored separately
    num_vars: usize,
    first_artificial: usize,
    a: Vec<f64>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    cost: Vec<f64>,
    objective: f64,
}

impl Tableau {
    fn build(sys: &FeasibilitySystem) -> Tableau {
        let rows = sys.constraints.len();
        let num_slack = sys
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let first_artificial = sys.num_vars + num_slack;
        let cols = first_artificial + rows;
        let mut a = vec![0.0; rows * cols];
        let mut rhs = vec![0.0; rows];
        let mut basis = Vec::with_capacity(rows);
        let mut slack = sys.num_vars;

        for (i, c) in sys.constraints.iter().enumerate() {
            let row = &mut a[i * cols..(i + 1) * cols];
            // Equilibrate so every row has largest magnitude 1.
            let mag = c
                .coeffs
                .iter()
                .fold(c.rhs.abs(), |m, v| m.max(v.abs()));
            let f = if mag > 0.0 && mag.is_finite() { 1.0 / mag } else { 1.0 };
            for (dst, v) in row[..sys.num_vars].iter_mut().zip(&c.coeffs) {
                *dst = v * f;
            }
            match c.relation {
                Relation::Ge => {
                    row[slack] = -1.0;
                    slack += 1;
                }
                Relation::Le => {
                    row[slack] = 1.0;
                    slack += 1;
                }
                Relation::Eq => {}
            }
            let mut b = c.rhs * f;
            if b < 0.0 {
                b = -b;
                for v in row[..first_artificial].iter_mut() {
                    *v = -*v;
                }
            }
            row[first_artificial + i] = 1.0;
            rhs[i] = b;
            basis.push(first_artificial + i);
        }

        let mut cost = vec![0.0; cols];
        for j in 0..first_artificial {
            cost[j] = -(0..rows).map(|i| a[i * cols + j]).sum::<f64>();
        }
        let objective = rhs.iter().sum();

        Tableau {
            rows,
            cols,
            num_vars: sys.num_vars,
            first_artificial,
            a,
            rhs,
            basis,
            cost,
            objective,
        }
    }

    fn run(mut self) -> Result<Feasibility> {
        let max_iter = 50 * (self.rows + self.cols) + 100;
        // Columns whose reduced cost is negative only through rounding: no
        // usable pivot entry. Cleared after every pivot.
        let mut blocked = vec![false; self.cols];
        for _ in 0..max_iter {
            // Bland: lowest-index improving column.
            let entering = (0..self.cols).find(|&j| {
                !blocked[j] && !self.basis.contains(&j) && self.cost[j] < -COST_EPS
            });
            let Some(col) = entering else {
                return Ok(self.finish());
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let v = self.a[i * self.cols + col];
                if v > PIVOT_EPS {
                    let ratio = self.rhs[i] / v;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((r, best)) => {
                            if ratio < best || (ratio == best && self.basis[i] < self.basis[r]) {
                                Some((i, ratio))
                            } else {
                                Some((r, best))
                            }
                        }
                    };
                }
            }
            match leave {
                Some((row, _)) => {
                    self.pivot(row, col);
                    blocked.iter_mut().for_each(|b| *b = false);
                }
                None => blocked[col] = true,
            }
        }
        Err(Error::IllConditioned(format!(
            "no convergence within {max_iter} pivots"
        )))
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let cols = self.cols;
        let p = self.a[row * cols + col];
        for v in self.a[row * cols..(row + 1) * cols].iter_mut() {
            *v /= p;
        }
        self.rhs[row] /= p;
        self.a[row * cols + col] = 1.0;

        let pivot_row: Vec<f64> = self.a[row * cols..(row + 1) * cols].to_vec();
        let pivot_rhs = self.rhs[row];
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            let factor = self.a[i * cols + col];
            if factor == 0.0 {
                continue;
            }
            let target = &mut self.a[i * cols..(i + 1) * cols];
            for (t, pv) in target.iter_mut().zip(&pivot_row) {
                *t -= factor * pv;
            }
            target[col] = 0.0;
            self.rhs[i] -= factor * pivot_rhs;
            if self.rhs[i] < 0.0 && self.rhs[i] > -PIVOT_EPS {
                self.rhs[i] = 0.0;
            }
        }
        let factor = self.cost[col];
        for (c, pv) in self.cost.iter_mut().zip(&pivot_row) {
            *c -= factor * pv;
        }
        self.cost[col] = 0.0;
        self.objective -= factor * pivot_rhs;
        self.basis[row] = col;
    }

    fn finish(self) -> Feasibility {
        let residual: f64 = self
            .basis
            .iter()
            .zip(&self.rhs)
            .filter(|(&b, _)| b >= self.first_artificial)
            .map(|(_, &v)| v.max(0.0))
            .sum();
        if residual > ACCEPT_EPS {
            return Feasibility::Infeasible { residual };
        }
        let mut x = vec![0.0; self.num_vars];
        for (&b, &v) in self.basis.iter().zip(&self.rhs) {
            if b < self.num_vars {
                x[b] = v.max(0.0);
            }
        }
        Feasibility::Feasible(x)
    }
}
