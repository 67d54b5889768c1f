//! Exact two-phase simplex for `{ v ≥ 0 : A v ≥ 1 }` with Bland's rule.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub(crate) enum LpOutcome {
    /// Optimal `v` minimizing `Σ v`.
    Feasible(Vec<BigRational>),
    /// `y ≥ 0`, `y ≠ 0`, `yᵀA ≤ 0`.
    Infeasible(Vec<BigRational>),
}

struct Tableau {
    /// Each row holds the column coefficients followed by the right-hand side.
    rows: Vec<Vec<BigRational>>,
    obj: Vec<BigRational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn width(&self) -> usize {
        self.obj.len() - 1
    }

    fn pivot(&mut self, r: usize, k: usize) {
        let p = self.rows[r][k].clone();
        for x in self.rows[r].iter_mut() {
            *x = &*x / &p;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut Vec<BigRational>| {
            let f = row[k].clone();
            if !f.is_zero() {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(&mut self.obj);
        self.basis[r] = k;
    }

    /// Runs Bland's rule to optimality over the allowed columns.
    fn optimize(&mut self, allowed: &[bool]) {
        let w = self.width();
        loop {
            let Some(k) = (0..w).find(|&k| allowed[k] && self.obj[k].is_negative()) else {
                return;
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[k].is_positive() {
                    let ratio = &row[w] / &row[k];
                    let better = match &leave {
                        None => true,
                        Some((j, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*j]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            // Both phases are bounded below, so a leaving row always exists.
            let (r, _) = leave.expect("bounded objective");
            self.pivot(r, k);
        }
    }
}

/// Solves `A v ≥ 1, v ≥ 0` for the `m × n` matrix `a`, minimizing `Σ v`.
pub(crate) fn solve(a: &[Vec<BigRational>], n: usize) -> LpOutcome {
    let m = a.len();
    // Columns: v (n), surplus (m), artificial (m), then rhs.
    let w = n + 2 * m;
    let zero = BigRational::zero();
    let one = BigRational::one();
    let rows: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(j, coeffs)| {
            let mut row = vec![zero.clone(); w + 1];
            row[..n].clone_from_slice(coeffs);
            row[n + j] = -one.clone();
            row[n + m + j] = one.clone();
            row[w] = one.clone();
            row
        })
        .collect();
    let mut obj = vec![zero.clone(); w + 1];
    for row in &rows {
        for k in 0..n + m {
            obj[k] -= &row[k];
        }
        obj[w] -= &row[w];
    }
    let mut t = Tableau {
        rows,
        obj,
        basis: (n + m..w).collect(),
    };
    let mut allowed = vec![true; w];
    t.optimize(&allowed);

    if !t.obj[w].is_zero() {
        let y = (0..m).map(|j| &one - &t.obj[n + m + j]).collect();
        return LpOutcome::Infeasible(y);
    }

    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are redundant.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n + m {
            match (0..n + m).find(|&k| !t.rows[i][k].is_zero()) {
                Some(k) => t.pivot(i, k),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    for x in allowed[n + m..].iter_mut() {
        *x = false;
    }
    let mut obj = vec![zero.clone(); w + 1];
    for x in obj[..n].iter_mut() {
        *x = one.clone();
    }
    for (row, &b) in t.rows.iter().zip(&t.basis) {
        if b < n {
            for (x, y) in obj.iter_mut().zip(row) {
                *x -= y;
            }
        }
    }
    t.obj = obj;
    t.optimize(&allowed);

    let mut v = vec![zero; n];
    for (row, &b) in t.rows.iter().zip(&t.basis) {
        if b < n {
            v[b] = row[w].clone();
        }
    }
    LpOutcome::Feasible(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn feasible_minimum() {
        // 2a - b ≥ 1, -a + 2b ≥ 1: minimum a + b = 2 at (1, 1).
        let a = vec![vec![q(2), q(-1), q(0)], vec![q(-1), q(2), q(0)]];
        match solve(&a, 3) {
            LpOutcome::Feasible(v) => assert_eq!(v, vec![q(1), q(1), q(0)]),
            LpOutcome::Infeasible(_) => panic!("feasible"),
        }
    }

    #[test]
    fn infeasible_ray() {
        // a - b ≥ 1, b - a ≥ 1.
        let a = vec![vec![q(1), q(-1)], vec![q(-1), q(1)]];
        match solve(&a, 2) {
            LpOutcome::Infeasible(y) => {
                assert!(y.iter().all(|x| !x.is_negative()));
                assert!(y.iter().any(|x| x.is_positive()));
                for k in 0..2 {
                    let col: Vec<BigRational> = a.iter().map(|r| r[k].clone()).collect();
                    assert!(!dot(&y, &col).is_positive());
                }
            }
            LpOutcome::Feasible(_) => panic!("infeasible"),
        }
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let a = vec![vec![q(1), q(0)], vec![q(1), q(0)], vec![q(2), q(0)]];
        match solve(&a, 2) {
            LpOutcome::Feasible(v) => assert_eq!(v, vec![q(1), q(0)]),
            LpOutcome::Infeasible(_) => panic!("feasible"),
        }
    }
}
