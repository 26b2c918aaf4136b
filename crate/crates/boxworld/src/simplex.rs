//! Dense two-phase simplex, generic over an exact rational or `f64`
//! scalar. Solves `max c.x : A x = b, x >= 0` and returns a basic
//! optimal solution, so every optimum is a vertex of the feasible set.

use crate::{Error, Rat};
use num_traits::{One, Signed, Zero};

/// Scalar abstraction: exact rationals solve with zero tolerance, floats
/// with a fixed pivot tolerance.
pub trait LpScalar: Clone + PartialOrd + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn neg(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn is_positive(&self) -> bool {
        !self.is_zero() && *self > Self::zero()
    }
    fn is_negative(&self) -> bool {
        !self.is_zero() && *self < Self::zero()
    }
}

impl LpScalar for Rat {
    fn zero() -> Self {
        <Rat as Zero>::zero()
    }
    fn one() -> Self {
        <Rat as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

const F64_TOL: f64 = 1e-9;

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        self.abs() < F64_TOL
    }
    fn neg(&self) -> Self {
        -self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
}

/// A program `max c.x : A x = b, x >= 0`.
pub struct StandardLp<S> {
    pub rows: Vec<Vec<S>>,
    pub rhs: Vec<S>,
    pub objective: Vec<S>,
}

#[derive(Debug, Clone)]
pub struct LpSolution<S> {
    pub x: Vec<S>,
    pub objective: S,
    /// Column index of the basic variable in each row.
    pub basis: Vec<usize>,
}

struct Tableau<S> {
    tab: Vec<Vec<S>>, // m rows of n+1 entries (rhs last)
    cost: Vec<S>,     // reduced costs, length n+1 (objective value last, negated)
    basis: Vec<usize>,
    n: usize,
    bland: bool,
    stall: usize,
}

impl<S: LpScalar> Tableau<S> {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.tab[r][c].clone();
        for v in self.tab[r].iter_mut() {
            *v = v.div(&piv);
        }
        let prow = self.tab[r].clone();
        for i in 0..self.tab.len() {
            if i != r && !self.tab[i][c].is_zero() {
                let f = self.tab[i][c].clone();
                for (v, p) in self.tab[i].iter_mut().zip(&prow) {
                    *v = v.sub(&f.mul(p));
                }
            }
        }
        if !self.cost[c].is_zero() {
            let f = self.cost[c].clone();
            for (v, p) in self.cost.iter_mut().zip(&prow) {
                *v = v.sub(&f.mul(p));
            }
        }
        self.basis[r] = c;
    }

    /// One simplex phase: drive all reduced costs nonpositive.
    fn optimize(&mut self, allow: impl Fn(usize) -> bool) -> Result<(), Error> {
        let max_iters = 50_000 + 200 * (self.n + self.tab.len());
        for _ in 0..max_iters {
            let entering = if self.bland {
                (0..self.n).find(|&c| allow(c) && self.cost[c].is_positive())
            } else {
                let mut best: Option<(usize, S)> = None;
                for c in 0..self.n {
                    if allow(c) && self.cost[c].is_positive() {
                        if best.as_ref().map_or(true, |(_, bv)| self.cost[c] > *bv) {
                            best = Some((c, self.cost[c].clone()));
                        }
                    }
                }
                best.map(|(c, _)| c)
            };
            let Some(c) = entering else {
                return Ok(());
            };
            // ratio test; Bland tie-break on lowest basis index
            let mut leave: Option<(usize, S)> = None;
            for r in 0..self.tab.len() {
                if self.tab[r][c].is_positive() {
                    let ratio = self.tab[r][self.n].div(&self.tab[r][c]);
                    let better = match &leave {
                        None => true,
                        Some((lr, lv)) => {
                            ratio < *lv || (ratio == *lv && self.basis[r] < self.basis[*lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, ratio)) = leave else {
                return Err(Error::Unbounded);
            };
            if ratio.is_zero() {
                self.stall += 1;
                if self.stall > 2 * (self.n + self.tab.len()) {
                    self.bland = true; // anti-cycling fallback
                }
            } else {
                self.stall = 0;
            }
            self.pivot(r, c);
        }
        Err(Error::Guard("simplex iteration limit".into()))
    }
}

/// Solve the standard-form program. Redundant equality rows are dropped
/// during phase 1; infeasibility and unboundedness are reported as errors.
pub fn solve<S: LpScalar>(lp: &StandardLp<S>) -> Result<LpSolution<S>, Error> {
    let m = lp.rows.len();
    let n = lp.objective.len();
    for row in &lp.rows {
        if row.len() != n {
            return Err(Error::DimensionMismatch(format!("row len {} vs {}", row.len(), n)));
        }
    }
    // build tableau with artificials; rhs normalized nonnegative
    let total = n + m;
    let mut tab: Vec<Vec<S>> = Vec::with_capacity(m);
    for (i, row) in lp.rows.iter().enumerate() {
        let flip = lp.rhs[i].is_negative();
        let mut r: Vec<S> = row.iter().map(|v| if flip { v.neg() } else { v.clone() }).collect();
        r.resize(total, S::zero());
        r[n + i] = S::one();
        r.push(if flip { lp.rhs[i].neg() } else { lp.rhs[i].clone() });
        tab.push(r);
    }
    // phase-1 reduced costs: maximize -sum(artificials) => cost_j = sum of rows
    let mut cost = vec![S::zero(); total + 1];
    for j in 0..total {
        if j >= n {
            continue;
        }
        let mut s = S::zero();
        for row in tab.iter() {
            s = s.add(&row[j]);
        }
        cost[j] = s;
    }
    let mut obj0 = S::zero();
    for row in tab.iter() {
        obj0 = obj0.add(&row[total]);
    }
    cost[total] = obj0;
    let mut t = Tableau {
        tab,
        cost,
        basis: (n..n + m).collect(),
        n: total,
        bland: false,
        stall: 0,
    };
    t.optimize(|c| c < n)?;
    if t.cost[total].is_positive() {
        return Err(Error::Infeasible);
    }
    // pivot out or drop lingering artificials
    let mut drop_rows = Vec::new();
    for r in 0..m {
        if t.basis[r] >= n {
            if let Some(c) = (0..n).find(|&c| !t.tab[r][c].is_zero()) {
                t.pivot(r, c);
            } else {
                drop_rows.push(r);
            }
        }
    }
    for &r in drop_rows.iter().rev() {
        t.tab.remove(r);
        t.basis.remove(r);
    }
    // phase 2: rebuild reduced costs for the true objective
    let rows_n = t.tab.len();
    let mut cost: Vec<S> = lp.objective.clone();
    cost.resize(total + 1, S::zero());
    for r in 0..rows_n {
        let b = t.basis[r];
        if !cost[b].is_zero() {
            let f = cost[b].clone();
            let prow = t.tab[r].clone();
            for (v, p) in cost.iter_mut().zip(prow.iter()) {
                *v = v.sub(&f.mul(p));
            }
        }
    }
    t.cost = cost;
    t.bland = false;
    t.stall = 0;
    t.optimize(|c| c < n)?;
    let mut x = vec![S::zero(); n];
    for r in 0..t.tab.len() {
        if t.basis[r] < n {
            x[t.basis[r]] = t.tab[r][total].clone();
        }
    }
    let mut objective = S::zero();
    for (xi, ci) in x.iter().zip(&lp.objective) {
        objective = objective.add(&xi.mul(ci));
    }
    Ok(LpSolution { x, objective, basis: t.basis.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, ratio};

    #[test]
    fn exact_small_lp() {
        // max x0 + 2 x1 : x0 + x1 + s = 4, x1 <= 3 (as x1 + s2 = 3)
        let lp = StandardLp {
            rows: vec![
                vec![rat(1), rat(1), rat(1), rat(0)],
                vec![rat(0), rat(1), rat(0), rat(1)],
            ],
            rhs: vec![rat(4), rat(3)],
            objective: vec![rat(1), rat(2), rat(0), rat(0)],
        };
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.objective, rat(7)); // x = (1, 3)
        assert_eq!(sol.x[0], rat(1));
        assert_eq!(sol.x[1], rat(3));
    }

    #[test]
    fn redundant_rows_are_dropped() {
        let lp = StandardLp {
            rows: vec![
                vec![rat(1), rat(1)],
                vec![rat(2), rat(2)],
            ],
            rhs: vec![rat(1), rat(2)],
            objective: vec![rat(1), rat(0)],
        };
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.objective, rat(1));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let lp = StandardLp {
            rows: vec![vec![rat(1), rat(1)], vec![rat(1), rat(1)]],
            rhs: vec![rat(1), rat(2)],
            objective: vec![rat(0), rat(0)],
        };
        assert!(matches!(solve(&lp), Err(Error::Infeasible)));
        let lp2 = StandardLp {
            rows: vec![vec![rat(1), rat(-1)]],
            rhs: vec![rat(0)],
            objective: vec![rat(1), rat(0)],
        };
        assert!(matches!(solve(&lp2), Err(Error::Unbounded)));
    }

    #[test]
    fn fractional_optimum_is_exact() {
        // max x0 : 2 x0 + x1 = 1, x0 - x1 = 0  => x0 = 1/3
        let lp = StandardLp {
            rows: vec![vec![rat(2), rat(1)], vec![rat(1), rat(-1)]],
            rhs: vec![rat(1), rat(0)],
            objective: vec![rat(1), rat(0)],
        };
        assert_eq!(solve(&lp).unwrap().x[0], ratio(1, 3));
    }

    #[test]
    fn float_variant_agrees() {
        let lp = StandardLp {
            rows: vec![vec![2.0, 1.0], vec![1.0, -1.0]],
            rhs: vec![1.0, 0.0],
            objective: vec![1.0, 0.0],
        };
        assert!((solve(&lp).unwrap().x[0] - 1.0 / 3.0).abs() < 1e-12);
    }
}
