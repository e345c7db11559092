//! Exact linear feasibility over the rationals: Phase-I simplex with Bland's rule.

use crate::rational::{zero, Q};
use num_traits::Zero;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
struct Row {
    coeffs: Vec<(usize, Q)>,
    cmp: Cmp,
    rhs: Q,
}

/// Constraints over nonnegative variables.
#[derive(Clone, Debug, Default)]
pub struct Lp {
    nvars: usize,
    rows: Vec<Row>,
}

impl Lp {
    pub fn new(nvars: usize) -> Lp {
        Lp { nvars, rows: Vec::new() }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add(&mut self, coeffs: Vec<(usize, Q)>, cmp: Cmp, rhs: Q) {
        let coeffs = coeffs.into_iter().filter(|(_, q)| !q.is_zero()).collect();
        self.rows.push(Row { coeffs, cmp, rhs });
    }

    /// A feasible point, or `None` if the system is infeasible.
    pub fn solve(&self) -> Option<Vec<Q>> {
        // Rows without variables are decided directly.
        let mut rows: Vec<&Row> = Vec::new();
        for r in &self.rows {
            if r.coeffs.is_empty() {
                let ok = match r.cmp {
                    Cmp::Le => zero() <= r.rhs,
                    Cmp::Ge => zero() >= r.rhs,
                    Cmp::Eq => r.rhs.is_zero(),
                };
                if !ok {
                    return None;
                }
            } else {
                rows.push(r);
            }
        }
        let m = rows.len();
        let n = self.nvars;
        let nslack = rows.iter().filter(|r| r.cmp != Cmp::Eq).count();
        let width = n + nslack;
        let mut t: Vec<Vec<Q>> = Vec::with_capacity(m);
        let mut b: Vec<Q> = Vec::with_capacity(m);
        // basis[r]: Some(column) or None for an artificial variable.
        let mut basis: Vec<Option<usize>> = Vec::with_capacity(m);
        let mut next_slack = n;
        for r in &rows {
            let mut row = vec![zero(); width];
            for (j, q) in &r.coeffs {
                row[*j] += q;
            }
            let mut rhs = r.rhs.clone();
            let mut slack = None;
            if r.cmp != Cmp::Eq {
                let s = next_slack;
                next_slack += 1;
                row[s] = if r.cmp == Cmp::Le { Q::from_integer(1.into()) } else { Q::from_integer((-1).into()) };
                slack = Some(s);
            }
            if rhs < zero() {
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
                rhs = -rhs;
            }
            let start = slack.filter(|s| row[*s] > zero());
            t.push(row);
            b.push(rhs);
            basis.push(start);
        }
        // Reduced costs of the Phase-I objective (sum of artificials).
        let mut d = vec![zero(); width];
        let mut obj = zero();
        for r in 0..m {
            if basis[r].is_none() {
                for j in 0..width {
                    d[j] -= &t[r][j];
                }
                obj += &b[r];
            }
        }
        loop {
            let Some(enter) = (0..width).find(|j| d[*j] < zero()) else { break };
            let mut leave: Option<(usize, Q)> = None;
            for r in 0..m {
                if t[r][enter] > zero() {
                    let ratio = &b[r] / &t[r][enter];
                    let better = match &leave {
                        None => true,
                        Some((lr, best)) => {
                            ratio < *best || (ratio == *best && key(basis[r], width, r) < key(basis[*lr], width, *lr))
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let (pr, _) = leave?; // unbounded cannot happen in Phase I
            let piv = t[pr][enter].clone();
            for x in t[pr].iter_mut() {
                *x /= &piv;
            }
            b[pr] /= &piv;
            let prow = t[pr].clone();
            let pb = b[pr].clone();
            for r in 0..m {
                if r == pr || t[r][enter].is_zero() {
                    continue;
                }
                let f = t[r][enter].clone();
                for j in 0..width {
                    if !prow[j].is_zero() {
                        t[r][j] -= &f * &prow[j];
                    }
                }
                b[r] -= &f * &pb;
            }
            if !d[enter].is_zero() {
                let f = d[enter].clone();
                for j in 0..width {
                    if !prow[j].is_zero() {
                        d[j] -= &f * &prow[j];
                    }
                }
                obj += &f * &pb;
            }
            basis[pr] = Some(enter);
        }
        if !obj.is_zero() {
            return None;
        }
        let mut x = vec![zero(); n];
        for r in 0..m {
            if let Some(j) = basis[r] {
                if j < n {
                    x[j] = b[r].clone();
                }
            }
        }
        Some(x)
    }

    /// Checks a point against every constraint.
    pub fn satisfied_by(&self, x: &[Q]) -> bool {
        x.len() == self.nvars
            && x.iter().all(|v| *v >= zero())
            && self.rows.iter().all(|r| {
                let lhs: Q = r.coeffs.iter().map(|(j, q)| q * &x[*j]).sum();
                match r.cmp {
                    Cmp::Le => lhs <= r.rhs,
                    Cmp::Ge => lhs >= r.rhs,
                    Cmp::Eq => lhs == r.rhs,
                }
            })
    }
}

// Artificials rank after structural columns; ties by row.
fn key(b: Option<usize>, width: usize, r: usize) -> usize {
    b.unwrap_or(width + r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn simple_feasible() {
        let mut lp = Lp::new(2);
        lp.add(vec![(0, int(1)), (1, int(1))], Cmp::Eq, int(1));
        lp.add(vec![(0, int(1)), (1, int(-1))], Cmp::Ge, frac(1, 2));
        let x = lp.solve().unwrap();
        assert!(lp.satisfied_by(&x));
    }

    #[test]
    fn simple_infeasible() {
        let mut lp = Lp::new(2);
        lp.add(vec![(0, int(1)), (1, int(1))], Cmp::Le, int(1));
        lp.add(vec![(0, int(1)), (1, int(1))], Cmp::Ge, int(2));
        assert!(lp.solve().is_none());
    }

    #[test]
    fn negative_rhs_and_empty_rows() {
        let mut lp = Lp::new(1);
        lp.add(vec![(0, int(-1))], Cmp::Le, int(-3));
        lp.add(vec![], Cmp::Le, int(0));
        let x = lp.solve().unwrap();
        assert!(x[0] >= int(3));
        lp.add(vec![], Cmp::Ge, int(1));
        assert!(lp.solve().is_none());
    }

    #[test]
    fn degenerate_cycle_prone_system() {
        // Beale's example constraints, with a floor on the objective that is attainable.
        let mut lp = Lp::new(4);
        lp.add(vec![(0, frac(1, 4)), (1, int(-60)), (2, frac(-1, 25)), (3, int(9))], Cmp::Le, int(0));
        lp.add(vec![(0, frac(1, 2)), (1, int(-90)), (2, frac(-1, 50)), (3, int(3))], Cmp::Le, int(0));
        lp.add(vec![(2, int(1))], Cmp::Le, int(1));
        lp.add(vec![(0, frac(3, 4)), (1, int(-150)), (2, frac(1, 50)), (3, int(-6))], Cmp::Ge, frac(1, 20));
        let x = lp.solve().unwrap();
        assert!(lp.satisfied_by(&x));
        lp.add(vec![(0, frac(3, 4)), (1, int(-150)), (2, frac(1, 50)), (3, int(-6))], Cmp::Ge, frac(1, 19));
        assert!(lp.solve().is_none());
    }
}
