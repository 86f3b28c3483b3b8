//! Dense primal simplex for small linear programs of the form
//! `maximize c·x  s.t.  A x <= b, x >= 0` with `b >= 0`, so the origin is a
//! feasible starting basis and no phase one is needed.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-11;
const MAX_PIVOTS: usize = 100_000;
/// Consecutive degenerate pivots before switching to Bland's rule.
const DEGENERATE_SWITCH: usize = 64;

#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    n_vars: usize,
    objective: Vec<f64>,
    rows: Vec<f64>,
    rhs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram {
            n_vars: objective.len(),
            objective,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_constraints(&self) -> usize {
        self.rhs.len()
    }

    /// Adds `coeffs · x <= bound`.
    pub fn add_le(&mut self, coeffs: &[f64], bound: f64) -> Result<()> {
        if coeffs.len() != self.n_vars {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars,
                found: coeffs.len(),
            });
        }
        if !(bound >= 0.0) || !bound.is_finite() {
            return Err(Error::InvalidArgument(
                "constraint bound must be finite and non-negative",
            ));
        }
        self.rows.extend_from_slice(coeffs);
        self.rhs.push(bound);
        Ok(())
    }

    /// Adds the sparse row `Σ coeff_k x_{idx_k} <= bound`.
    pub fn add_le_sparse(&mut self, terms: &[(usize, f64)], bound: f64) -> Result<()> {
        let mut row = vec![0.0; self.n_vars];
        for &(i, c) in terms {
            if i >= self.n_vars {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.n_vars,
                });
            }
            row[i] += c;
        }
        self.add_le(&row, bound)
    }

    pub fn maximize(&self) -> Result<LpSolution> {
        let n = self.n_vars;
        let m = self.rhs.len();
        let width = n + m + 1;
        // row 0 is the objective row `z - c·x = 0`
        let mut t = vec![0.0; (m + 1) * width];
        for j in 0..n {
            t[j] = -self.objective[j];
        }
        for i in 0..m {
            let r = (i + 1) * width;
            t[r..r + n].copy_from_slice(&self.rows[i * n..(i + 1) * n]);
            t[r + n + i] = 1.0;
            t[r + width - 1] = self.rhs[i];
        }
        let mut basis: Vec<usize> = (n..n + m).collect();
        let mut degenerate_run = 0usize;
        let mut bland = false;

        for _ in 0..MAX_PIVOTS {
            let entering = if bland {
                (0..n + m).find(|&j| t[j] < -PIVOT_TOL)
            } else {
                let mut best = None;
                let mut most = -PIVOT_TOL;
                for j in 0..n + m {
                    if t[j] < most {
                        most = t[j];
                        best = Some(j);
                    }
                }
                best
            };
            let Some(col) = entering else {
                let mut x = vec![0.0; n];
                for (i, &b) in basis.iter().enumerate() {
                    if b < n {
                        x[b] = t[(i + 1) * width + width - 1];
                    }
                }
                return Ok(LpSolution {
                    value: t[width - 1],
                    x,
                });
            };

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = t[(i + 1) * width + col];
                if a > PIVOT_TOL {
                    let ratio = t[(i + 1) * width + width - 1] / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - 1e-14 || (ratio <= lr + 1e-14 && basis[i] < basis[li]) {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((row, ratio)) = leave else {
                return Err(Error::SolverFailure("linear program is unbounded"));
            };
            if ratio <= 1e-14 {
                degenerate_run += 1;
                if degenerate_run >= DEGENERATE_SWITCH {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            pivot(&mut t, width, m, row + 1, col);
            basis[row] = col;
        }
        Err(Error::SolverFailure("simplex pivot limit reached"))
    }
}

fn pivot(t: &mut [f64], width: usize, m: usize, prow: usize, pcol: usize) {
    let p = t[prow * width + pcol];
    for v in &mut t[prow * width..(prow + 1) * width] {
        *v /= p;
    }
    let (before, rest) = t.split_at_mut(prow * width);
    let (pivot_row, after) = rest.split_at_mut(width);
    let eliminate = |row: &mut [f64]| {
        let factor = row[pcol];
        if factor != 0.0 {
            for (v, pv) in row.iter_mut().zip(pivot_row.iter()) {
                *v -= factor * pv;
            }
            row[pcol] = 0.0;
        }
    };
    for row in before.chunks_exact_mut(width) {
        eliminate(row);
    }
    for row in after.chunks_exact_mut(width).take(m + 1 - prow - 1) {
        eliminate(row);
    }
}
