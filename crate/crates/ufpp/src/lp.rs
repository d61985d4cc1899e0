//! Dense simplex over exact rationals for the small linear programs the
//! fractional relaxations produce: maximize `c . x` subject to `A x <= b`
//! and `x >= 0`, with every right-hand side nonnegative. The all-slack
//! basis is then feasible, so no auxiliary phase is needed, and optima are
//! exact. Upper bounds on variables are passed as ordinary rows.
//!
//! Entering and leaving variables follow smallest-index rules, which rules
//! out cycling on degenerate bases.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<BigRational>,
    /// `(coefficients, rhs)` per row; every rhs must be nonnegative.
    pub rows: Vec<(Vec<BigRational>, BigRational)>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub value: BigRational,
    pub x: Vec<BigRational>,
}

pub fn maximize(problem: &LpProblem) -> Result<LpSolution> {
    let n = problem.objective.len();
    let m = problem.rows.len();
    for (i, (coeffs, rhs)) in problem.rows.iter().enumerate() {
        if coeffs.len() != n {
            return Err(Error::Invalid(format!(
                "row {i} has {} coefficients, expected {n}",
                coeffs.len()
            )));
        }
        if rhs.is_negative() {
            return Err(Error::Precondition(format!("row {i} has negative right-hand side")));
        }
    }

    // tableau columns: n structural, m slacks, then the right-hand side
    let width = n + m + 1;
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    for (i, (coeffs, rhs)) in problem.rows.iter().enumerate() {
        let mut row = vec![BigRational::zero(); width];
        row[..n].clone_from_slice(coeffs);
        row[n + i] = BigRational::one();
        row[width - 1] = rhs.clone();
        rows.push(row);
    }
    // reduced-cost row; entering candidates are the strictly positive entries
    let mut cost = vec![BigRational::zero(); width];
    cost[..n].clone_from_slice(&problem.objective);
    let mut basis: Vec<usize> = (n..n + m).collect();

    while let Some(col) = (0..n + m).find(|&j| cost[j].is_positive()) {
        // ratio test; ties keep the leaving variable with the smallest index
        let mut pick: Option<(BigRational, usize, usize)> = None;
        for (i, row) in rows.iter().enumerate() {
            if !row[col].is_positive() {
                continue;
            }
            let ratio = &row[width - 1] / &row[col];
            let better = match &pick {
                None => true,
                Some((best, var, _)) => ratio < *best || (ratio == *best && basis[i] < *var),
            };
            if better {
                pick = Some((ratio, basis[i], i));
            }
        }
        let Some((_, _, pivot_row)) = pick else {
            return Err(Error::Internal("objective is unbounded".into()));
        };
        pivot(&mut rows, &mut cost, pivot_row, col);
        basis[pivot_row] = col;
    }

    let mut x = vec![BigRational::zero(); n];
    for (i, &var) in basis.iter().enumerate() {
        if var < n {
            x[var] = rows[i][width - 1].clone();
        }
    }
    let value = problem
        .objective
        .iter()
        .zip(&x)
        .map(|(c, v)| c * v)
        .fold(BigRational::zero(), |acc, t| acc + t);
    Ok(LpSolution { value, x })
}

fn pivot(rows: &mut [Vec<BigRational>], cost: &mut [BigRational], r: usize, c: usize) {
    let inv = rows[r][c].recip();
    for cell in rows[r].iter_mut() {
        if !cell.is_zero() {
            *cell *= &inv;
        }
    }
    let pivot_row = rows[r].clone();
    for (i, row) in rows.iter_mut().enumerate() {
        if i != r && !row[c].is_zero() {
            eliminate(row, &pivot_row, c);
        }
    }
    if !cost[c].is_zero() {
        eliminate(cost, &pivot_row, c);
    }
}

fn eliminate(row: &mut [BigRational], pivot_row: &[BigRational], c: usize) {
    let factor = row[c].clone();
    for (cell, p) in row.iter_mut().zip(pivot_row) {
        if !p.is_zero() {
            *cell -= &factor * p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, ratio};

    fn problem(obj: &[i64], rows: &[(&[i64], i64)]) -> LpProblem {
        LpProblem {
            objective: obj.iter().map(|&c| rat(c)).collect(),
            rows: rows
                .iter()
                .map(|(coeffs, rhs)| (coeffs.iter().map(|&c| rat(c)).collect(), rat(*rhs)))
                .collect(),
        }
    }

    #[test]
    fn fractional_optimum_is_exact() {
        // two unit-profit variables sharing capacity 3 in chunks of 2
        let p = problem(&[1, 1], &[(&[2, 2], 3), (&[1, 0], 1), (&[0, 1], 1)]);
        let sol = maximize(&p).unwrap();
        assert_eq!(sol.value, ratio(3, 2));
        let used = &sol.x[0] * rat(2) + &sol.x[1] * rat(2);
        assert!(used <= rat(3));
    }

    #[test]
    fn binding_rows_stop_the_objective() {
        let p = problem(&[1, 1], &[(&[1, 2], 4), (&[1, 0], 2), (&[0, 1], 3)]);
        let sol = maximize(&p).unwrap();
        assert_eq!(sol.value, rat(3));
        assert_eq!(sol.x, vec![rat(2), rat(1)]);
    }

    #[test]
    fn zero_rhs_pins_a_variable() {
        let p = problem(&[1], &[(&[1], 0)]);
        let sol = maximize(&p).unwrap();
        assert_eq!(sol.value, rat(0));
        assert_eq!(sol.x, vec![rat(0)]);
    }

    #[test]
    fn thirds_survive_exactly() {
        let p = problem(&[1], &[(&[3], 1)]);
        let sol = maximize(&p).unwrap();
        assert_eq!(sol.value, ratio(1, 3));
    }

    #[test]
    fn negative_rhs_is_rejected() {
        let p = LpProblem {
            objective: vec![rat(1)],
            rows: vec![(vec![rat(1)], rat(-1))],
        };
        assert!(maximize(&p).is_err());
    }

    #[test]
    fn unused_variables_stay_zero() {
        let p = problem(&[5, 0], &[(&[1, 1], 2), (&[1, 0], 1), (&[0, 1], 1)]);
        let sol = maximize(&p).unwrap();
        assert_eq!(sol.value, rat(5));
        assert_eq!(sol.x[0], rat(1));
    }
}
