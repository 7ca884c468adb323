//! Two-phase dense tableau simplex for `min c.x  s.t.  A x = b, x >= 0`.
//!
//! Bland's rule picks both the entering and the leaving variable, so the
//! method terminates on degenerate problems. Sizes here are tiny (a few dozen
//! columns), so the full tableau is kept.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const FEASIBILITY_EPS: f64 = 1e-9;

pub(crate) struct StandardForm {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Debug)]
pub(crate) enum Outcome {
    Optimal { x: Vec<f64> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[col] = 0.0;
            }
        }
        self.basis[r] = col;
    }

    /// Minimizes `cost . x` over columns `0..allowed`; the tableau must be
    /// primal feasible on entry.
    fn run(&mut self, cost: &[f64], allowed: usize, pivots: &mut usize, limit: usize) -> Result<bool> {
        loop {
            let reduced = |j: usize| -> f64 {
                cost[j]
                    - self
                        .basis
                        .iter()
                        .zip(&self.rows)
                        .map(|(&bj, row)| cost[bj] * row[j])
                        .sum::<f64>()
            };
            let Some(enter) = (0..allowed)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| reduced(j) < -PIVOT_EPS)
            else {
                return Ok(true);
            };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let coef = self.rows[i][enter];
                if coef <= PIVOT_EPS {
                    continue;
                }
                let ratio = self.rhs(i) / coef;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        let tie = (ratio - lr).abs() <= PIVOT_EPS * lr.abs().max(1.0);
                        if ratio < lr && !tie || tie && self.basis[i] < self.basis[li] {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            *pivots += 1;
            if *pivots > limit {
                return Err(Error::LpIterationLimit(limit));
            }
            self.pivot(r, enter);
        }
    }
}

pub(crate) fn solve(problem: &StandardForm, limit: usize) -> Result<Outcome> {
    let m = problem.b.len();
    let nv = problem.c.len();
    let width = nv + m;

    let mut rows = Vec::with_capacity(m);
    for (i, (a_row, &b)) in problem.a.iter().zip(&problem.b).enumerate() {
        debug_assert_eq!(a_row.len(), nv);
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; width + 1];
        for (dst, &src) in row.iter_mut().zip(a_row) {
            *dst = sign * src;
        }
        row[nv + i] = 1.0;
        row[width] = sign * b;
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        basis: (nv..nv + m).collect(),
        width,
    };

    let mut phase_one_cost = vec![0.0; width];
    for c in &mut phase_one_cost[nv..] {
        *c = 1.0;
    }
    let mut pivots = 0;
    t.run(&phase_one_cost, width, &mut pivots, limit)?;
    let infeasibility: f64 = t
        .basis
        .iter()
        .enumerate()
        .filter(|&(_, &bj)| bj >= nv)
        .map(|(i, _)| t.rhs(i))
        .sum();
    let scale = problem.b.iter().fold(1.0_f64, |s, x| s.max(x.abs()));
    if infeasibility > FEASIBILITY_EPS * scale {
        return Ok(Outcome::Infeasible);
    }

    // Drive remaining (zero-level) artificials out of the basis; rows where
    // that is impossible are redundant and are dropped.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= nv {
            match (0..nv).find(|&j| t.rows[i][j].abs() > PIVOT_EPS) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    let mut cost = problem.c.clone();
    cost.resize(width, 0.0);
    if !t.run(&cost, nv, &mut pivots, limit)? {
        return Ok(Outcome::Unbounded);
    }

    let mut x = vec![0.0; nv];
    for (i, &bj) in t.basis.iter().enumerate() {
        if bj < nv {
            x[bj] = t.rhs(i).max(0.0);
        }
    }
    Ok(Outcome::Optimal { x })
}
