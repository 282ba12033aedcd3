//! Small dense linear programs over exact rationals.
//!
//! Two-phase tableau simplex with Bland's rule, so it terminates on the
//! heavily degenerate systems that polyhedral normal-cone questions produce.
//! Variables are free; callers state bounds as ordinary constraints.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub rel: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<Rational>, rel: Relation, rhs: Rational) -> Self {
        Constraint { coeffs, rel, rhs }
    }

    pub fn le(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self::new(coeffs, Relation::Le, rhs)
    }

    pub fn ge(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self::new(coeffs, Relation::Ge, rhs)
    }

    pub fn eq(coeffs: Vec<Rational>, rhs: Rational) -> Self {
        Self::new(coeffs, Relation::Eq, rhs)
    }

    pub fn holds(&self, x: &[Rational]) -> bool {
        let lhs = crate::rational::dot(&self.coeffs, x);
        match self.rel {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    z: Vec<Rational>,
    basis: Vec<usize>,
    ncols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Rational::one() / &self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        if !self.z[c].is_zero() {
            let f = self.z[c].clone();
            for (v, p) in self.z.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    fn set_objective(&mut self, cost: &[Rational]) {
        // z_j = c_B B^{-1} a_j - c_j; the last entry holds the objective value.
        let mut z: Vec<Rational> = (0..=self.ncols)
            .map(|j| if j < self.ncols { -cost[j].clone() } else { Rational::zero() })
            .collect();
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            if cost[b].is_zero() {
                continue;
            }
            for (zj, a) in z.iter_mut().zip(row) {
                *zj += &cost[b] * a;
            }
        }
        self.z = z;
    }

    /// Runs the simplex iterations restricted to columns `< active`. Returns false when unbounded.
    fn optimize(&mut self, active: usize) -> bool {
        loop {
            let Some(c) = (0..active).find(|&j| self.z[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = &row[self.ncols] / &row[c];
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

/// Maximizes `objective · x` subject to `constraints`, with `x ∈ ℝ^nvars` free.
pub fn maximize(nvars: usize, constraints: &[Constraint], objective: &[Rational]) -> LpOutcome {
    assert_eq!(objective.len(), nvars);
    // columns: x⁺ (nvars), x⁻ (nvars), slack/surplus (one per inequality), artificials
    let n_ineq = constraints.iter().filter(|c| c.rel != Relation::Eq).count();
    let n_struct = 2 * nvars + n_ineq;
    let m = constraints.len();
    let ncols = n_struct + m;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut slack = 2 * nvars;
    for (i, con) in constraints.iter().enumerate() {
        assert_eq!(con.coeffs.len(), nvars);
        let mut row = vec![Rational::zero(); ncols + 1];
        for (j, a) in con.coeffs.iter().enumerate() {
            row[j] = a.clone();
            row[nvars + j] = -a.clone();
        }
        match con.rel {
            Relation::Le => row[slack] = Rational::one(),
            Relation::Ge => row[slack] = -Rational::one(),
            Relation::Eq => {}
        }
        if con.rel != Relation::Eq {
            slack += 1;
        }
        row[ncols] = con.rhs.clone();
        if row[ncols].is_negative() {
            for v in row.iter_mut() {
                *v = -v.clone();
            }
        }
        row[n_struct + i] = Rational::one();
        rows.push(row);
        basis.push(n_struct + i);
    }
    let mut t = Tableau { rows, z: Vec::new(), basis, ncols };

    // phase 1: maximize -Σ artificials
    let phase1: Vec<Rational> = (0..ncols).map(|j| if j >= n_struct { -Rational::one() } else { Rational::zero() }).collect();
    t.set_objective(&phase1);
    t.optimize(ncols);
    if !t.z[ncols].is_zero() {
        return LpOutcome::Infeasible;
    }
    // drive artificials out of the basis; drop redundant rows
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n_struct {
            match (0..n_struct).find(|&j| !t.rows[i][j].is_zero()) {
                Some(c) => {
                    t.pivot(i, c);
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    let mut cost = vec![Rational::zero(); ncols];
    for (j, c) in objective.iter().enumerate() {
        cost[j] = c.clone();
        cost[nvars + j] = -c.clone();
    }
    t.set_objective(&cost);
    if !t.optimize(n_struct) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); nvars];
    for (row, &b) in t.rows.iter().zip(&t.basis) {
        if b < nvars {
            x[b] += &row[ncols];
        } else if b < 2 * nvars {
            x[b - nvars] -= &row[ncols];
        }
    }
    LpOutcome::Optimal { value: t.z[ncols].clone(), x }
}

/// Any point satisfying all constraints.
pub fn feasible_point(nvars: usize, constraints: &[Constraint]) -> Option<Vec<Rational>> {
    match maximize(nvars, constraints, &vec![Rational::zero(); nvars]) {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn textbook_maximum() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let cons = vec![
            Constraint::le(v(&[1, 0]), int(4)),
            Constraint::le(v(&[0, 2]), int(12)),
            Constraint::le(v(&[3, 2]), int(18)),
            Constraint::ge(v(&[1, 0]), int(0)),
            Constraint::ge(v(&[0, 1]), int(0)),
        ];
        match maximize(2, &cons, &v(&[3, 5])) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, int(36));
                assert_eq!(x, v(&[2, 6]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let cons = vec![Constraint::ge(v(&[1]), int(1)), Constraint::le(v(&[1]), int(0))];
        assert_eq!(maximize(1, &cons, &v(&[1])), LpOutcome::Infeasible);
        let cons = vec![Constraint::ge(v(&[1, -1]), int(0))];
        assert_eq!(maximize(2, &cons, &v(&[1, 0])), LpOutcome::Unbounded);
    }

    #[test]
    fn equalities_and_negative_solutions() {
        // x + y = -3, x - y = 1  -> x = -1, y = -2
        let cons = vec![Constraint::eq(v(&[1, 1]), int(-3)), Constraint::eq(v(&[1, -1]), int(1))];
        let x = feasible_point(2, &cons).unwrap();
        assert_eq!(x, v(&[-1, -2]));
    }

    #[test]
    fn redundant_equalities() {
        let cons = vec![
            Constraint::eq(v(&[1, 1]), int(2)),
            Constraint::eq(v(&[2, 2]), int(4)),
            Constraint::le(v(&[1, 0]), int(5)),
            Constraint::ge(v(&[1, 0]), int(-5)),
        ];
        match maximize(2, &cons, &v(&[1, 0])) {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, int(5));
                assert_eq!(x, v(&[5, -3]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's classic cycling LP; Bland's rule must terminate.
        let q = |a: i64, b: i64| Rational::new(a.into(), b.into());
        let cons = vec![
            Constraint::le(vec![q(1, 4), int(-60), q(-1, 25), int(9)], int(0)),
            Constraint::le(vec![q(1, 2), int(-90), q(-1, 50), int(3)], int(0)),
            Constraint::le(vec![int(0), int(0), int(1), int(0)], int(1)),
            Constraint::ge(v(&[1, 0, 0, 0]), int(0)),
            Constraint::ge(v(&[0, 1, 0, 0]), int(0)),
            Constraint::ge(v(&[0, 0, 1, 0]), int(0)),
            Constraint::ge(v(&[0, 0, 0, 1]), int(0)),
        ];
        match maximize(4, &cons, &[q(3, 4), int(-150), q(1, 50), int(-6)]) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(1, 20)),
            other => panic!("{other:?}"),
        }
    }
}
