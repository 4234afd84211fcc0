//! Exact two-phase simplex over big rationals for small dense linear
//! programs in standard form: minimize c·x subject to A x = b, x >= 0.
//! Bland's rule throughout, so the method terminates without cycling.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::Rat;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, x: Vec<Rat> },
    Infeasible,
}

struct Tableau {
    /// m x (n+1): columns 0..n are variables, last column is the rhs.
    rows: Vec<Vec<Rat>>,
    basis: Vec<usize>,
    n: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v = &*v - &(&factor * p);
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes cost over columns where `allowed` holds; Bland's rule.
    fn run(&mut self, cost: &[Rat], allowed: &dyn Fn(usize) -> bool) -> Result<()> {
        loop {
            // reduced costs r_j = c_j - c_B . column_j
            let mut entering = None;
            'cols: for j in 0..self.n {
                if !allowed(j) || self.basis.contains(&j) {
                    continue;
                }
                let mut rj = cost[j].clone();
                for (i, &bi) in self.basis.iter().enumerate() {
                    if !cost[bi].is_zero() {
                        rj -= &cost[bi] * &self.rows[i][j];
                    }
                }
                if rj.is_negative() {
                    entering = Some(j);
                    break 'cols;
                }
            }
            let j = match entering {
                Some(j) => j,
                None => return Ok(()),
            };
            let mut leaving: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                if self.rows[i][j].is_positive() {
                    let ratio = &self.rows[i][self.n] / &self.rows[i][j];
                    let better = match &leaving {
                        None => true,
                        Some((li, lr)) => {
                            ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            let (r, _) = leaving.ok_or_else(|| {
                Error::Precondition("unbounded linear program".into())
            })?;
            self.pivot(r, j);
        }
    }

    fn objective(&self, cost: &[Rat]) -> Rat {
        let mut v = Rat::zero();
        for (i, &bi) in self.basis.iter().enumerate() {
            if !cost[bi].is_zero() {
                v += &cost[bi] * &self.rows[i][self.n];
            }
        }
        v
    }
}

/// Solves min c·x, A x = b, x >= 0 exactly.
pub fn solve(a: &[Vec<Rat>], b: &[Rat], c: &[Rat]) -> Result<LpOutcome> {
    let m = a.len();
    if b.len() != m {
        return Err(Error::DimensionMismatch("rhs length".into()));
    }
    let n = c.len();
    for row in a {
        if row.len() != n {
            return Err(Error::DimensionMismatch("constraint width".into()));
        }
    }
    // Build tableau with artificial variables n..n+m, rhs made nonnegative.
    let total = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let neg = b[i].is_negative();
        let mut row: Vec<Rat> = Vec::with_capacity(total + 1);
        for j in 0..n {
            row.push(if neg { -&a[i][j] } else { a[i][j].clone() });
        }
        for k in 0..m {
            row.push(if k == i { Rat::one() } else { Rat::zero() });
        }
        row.push(if neg { -&b[i] } else { b[i].clone() });
        rows.push(row);
    }
    let mut t = Tableau {
        rows,
        basis: (n..total).collect(),
        n: total,
    };

    // Phase 1: minimize the sum of artificials.
    let mut phase1: Vec<Rat> = vec![Rat::zero(); total];
    for j in n..total {
        phase1[j] = Rat::one();
    }
    t.run(&phase1, &|_| true)?;
    if !t.objective(&phase1).is_zero() {
        return Ok(LpOutcome::Infeasible);
    }
    // Drive remaining artificials out of the basis or drop redundant rows.
    let mut i = 0;
    while i < t.basis.len() {
        if t.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, j);
            } else {
                t.rows.remove(i);
                t.basis.remove(i);
                continue;
            }
        }
        i += 1;
    }

    // Phase 2 over the original columns only.
    let mut phase2: Vec<Rat> = c.to_vec();
    phase2.extend(vec![Rat::zero(); m]);
    t.run(&phase2, &|j| j < n)?;

    let mut x = vec![Rat::zero(); n];
    for (i, &bi) in t.basis.iter().enumerate() {
        if bi < n {
            x[bi] = t.rows[i][t.n].clone();
        }
    }
    Ok(LpOutcome::Optimal {
        value: t.objective(&phase2),
        x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Int;

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(Int::from(p), Int::from(q))
    }

    fn ri(p: i64) -> Rat {
        Rat::from_integer(Int::from(p))
    }

    #[test]
    fn simple_equality() {
        // min x0 + x1 st x0 + x1 = 1 -> value 1
        let out = solve(&[vec![ri(1), ri(1)]], &[ri(1)], &[ri(1), ri(1)]).unwrap();
        match out {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, ri(1));
                assert_eq!(&x[0] + &x[1], ri(1));
            }
            _ => panic!("expected optimal"),
        }
    }

    #[test]
    fn weighted_choice() {
        // min 3 x0 + x1 st x0 + x1 = 2 -> pick x1 = 2, value 2
        let out = solve(&[vec![ri(1), ri(1)]], &[ri(2)], &[ri(3), ri(1)]).unwrap();
        assert_eq!(
            out,
            LpOutcome::Optimal {
                value: ri(2),
                x: vec![ri(0), ri(2)]
            }
        );
    }

    #[test]
    fn infeasible() {
        // x0 = 1 and x0 = 2
        let out = solve(
            &[vec![ri(1)], vec![ri(1)]],
            &[ri(1), ri(2)],
            &[ri(1)],
        )
        .unwrap();
        assert_eq!(out, LpOutcome::Infeasible);
        // x0 + x1 = -1 with x >= 0
        let out = solve(&[vec![ri(1), ri(1)]], &[ri(-1)], &[ri(1), ri(1)]).unwrap();
        assert_eq!(out, LpOutcome::Infeasible);
    }

    #[test]
    fn redundant_rows_and_negatives() {
        // x0 - x1 = -3 twice (redundant); min x0 + x1 -> x1 = 3
        let a = vec![vec![ri(1), ri(-1)], vec![ri(1), ri(-1)]];
        let out = solve(&a, &[ri(-3), ri(-3)], &[ri(1), ri(1)]).unwrap();
        assert_eq!(
            out,
            LpOutcome::Optimal {
                value: ri(3),
                x: vec![ri(0), ri(3)]
            }
        );
    }

    #[test]
    fn exact_fractions() {
        // min x0 st 3 x0 = 1/2
        let out = solve(&[vec![ri(3)]], &[r(1, 2)], &[ri(1)]).unwrap();
        assert_eq!(
            out,
            LpOutcome::Optimal {
                value: r(1, 6),
                x: vec![r(1, 6)]
            }
        );
    }

    #[test]
    fn two_constraints() {
        // min x0 + 2 x1 + x2
        // x0 + x1 = 2, x1 + x2 = 2 -> x1 = 2 costs 4; x0 = x2 = 2 costs 4;
        // value 4 either way
        let a = vec![vec![ri(1), ri(1), ri(0)], vec![ri(0), ri(1), ri(1)]];
        let out = solve(&a, &[ri(2), ri(2)], &[ri(1), ri(2), ri(1)]).unwrap();
        match out {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, ri(4));
                assert_eq!(&x[0] + &x[1], ri(2));
                assert_eq!(&x[1] + &x[2], ri(2));
            }
            _ => panic!("expected optimal"),
        }
    }
}
