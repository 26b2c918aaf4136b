//! Exact rational Gaussian elimination: reduced row echelon form, rank,
//! span comparison, and affine solution of equality systems.

use crate::{Error, Int, Rat};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A matrix in reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Rref {
    pub rows: Vec<Vec<Rat>>,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

/// Reduced row echelon form of `rows` (zero rows dropped).
pub fn rref(rows: &[Vec<Rat>]) -> Rref {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0usize;
    for c in 0..ncols {
        let Some(sel) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, sel);
        let inv = m[r][c].recip();
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..ncols {
                    let sub = &f * &m[r][k];
                    m[i][k] = &m[i][k] - sub;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    Rref { rows: m, pivots }
}

/// Rank of a rational matrix.
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    rref(rows).rank()
}

/// Whether `v` lies in the row span of an RREF basis.
pub fn in_span(basis: &Rref, v: &[Rat]) -> bool {
    let mut w = v.to_vec();
    for (row, &p) in basis.rows.iter().zip(&basis.pivots) {
        if !w[p].is_zero() {
            let f = w[p].clone();
            for k in 0..w.len() {
                let sub = &f * &row[k];
                w[k] = &w[k] - sub;
            }
        }
    }
    w.iter().all(Zero::is_zero)
}

/// Whether two row sets span the same subspace.
pub fn same_span(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> bool {
    let ra = rref(a);
    let rb = rref(b);
    ra.rank() == rb.rank()
        && b.iter().all(|v| in_span(&ra, v))
        && a.iter().all(|v| in_span(&rb, v))
}

/// Solution of the affine system `A x = b`: one particular point plus an
/// integer basis of the null space.
#[derive(Debug, Clone)]
pub struct AffineSolution {
    pub particular: Vec<Rat>,
    /// Null-space basis vectors, scaled to integers.
    pub null_basis: Vec<Vec<Int>>,
    pub rank: usize,
}

/// Solve `A x = b` exactly, reporting inconsistency distinctly.
pub fn solve_affine(rows: &[Vec<Rat>], rhs: &[Rat]) -> Result<AffineSolution, Error> {
    let ncols = rows.first().map_or(0, Vec::len);
    let aug: Vec<Vec<Rat>> = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    let red = rref(&aug);
    if red.pivots.contains(&ncols) {
        return Err(Error::InconsistentSystem);
    }
    let pivot_cols = red.pivots.clone();
    let is_pivot = {
        let mut mask = vec![false; ncols];
        for &c in &pivot_cols {
            mask[c] = true;
        }
        mask
    };
    let mut particular = vec![Rat::zero(); ncols];
    for (row, &p) in red.rows.iter().zip(&pivot_cols) {
        particular[p] = row[ncols].clone();
    }
    let mut null_basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rat::zero(); ncols];
        v[free] = Rat::one();
        for (row, &p) in red.rows.iter().zip(&pivot_cols) {
            v[p] = -row[free].clone();
        }
        null_basis.push(integerize(&v));
    }
    Ok(AffineSolution { particular, null_basis, rank: red.rank() })
}

/// Scale a rational vector by the lcm of denominators and divide by the
/// gcd of numerators, giving a primitive integer vector.
pub fn integerize(v: &[Rat]) -> Vec<Int> {
    let mut lcm = Int::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let mut ints: Vec<Int> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    let mut g = Int::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if !g.is_zero() && !g.is_one() {
        for x in ints.iter_mut() {
            *x = &*x / &g;
        }
    }
    ints
}

/// Primitive form of an integer vector (divide by gcd, keep orientation).
pub fn reduce_int(v: &mut [Int]) {
    let mut g = Int::zero();
    for x in v.iter() {
        g = g.gcd(x);
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = &*x / &g;
        }
    }
}

/// Integer dot product.
pub fn idot(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    let mut s = Int::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

/// Sign of an integer as -1/0/+1.
pub fn isign(v: &Int) -> i8 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn rv(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn rref_rank_and_duplicates() {
        let rows = vec![rv(&[1, 2, 3]), rv(&[2, 4, 6]), rv(&[0, 1, 1])];
        assert_eq!(rank(&rows), 2);
        // duplicated rows leave rank unchanged
        let mut dup = rows.clone();
        dup.push(rv(&[1, 2, 3]));
        assert_eq!(rank(&dup), 2);
    }

    #[test]
    fn solve_affine_reports_inconsistency() {
        let rows = vec![rv(&[1, 1]), rv(&[1, 1])];
        assert!(solve_affine(&rows, &[rat(1), rat(2)]).is_err());
        let sol = solve_affine(&rows, &[rat(1), rat(1)]).unwrap();
        assert_eq!(sol.rank, 1);
        assert_eq!(sol.null_basis.len(), 1);
        // particular solution satisfies the system
        assert_eq!(&sol.particular[0] + &sol.particular[1], rat(1));
    }

    #[test]
    fn span_comparison() {
        let a = vec![rv(&[1, 0, 1]), rv(&[0, 1, 1])];
        let b = vec![rv(&[1, 1, 2]), rv(&[1, -1, 0])];
        assert!(same_span(&a, &b));
        let c = vec![rv(&[1, 0, 0]), rv(&[0, 1, 1])];
        assert!(!same_span(&a, &c));
    }

    #[test]
    fn integerize_primitive() {
        let v = vec![crate::ratio(1, 2), crate::ratio(-3, 4), rat(0)];
        assert_eq!(integerize(&v), vec![Int::from(2), Int::from(-3), Int::from(0)]);
    }
}
