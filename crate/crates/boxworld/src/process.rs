//! Deterministic classical processes and their fixed-point consistency
//! semantics: a process is a total map from output strings to input
//! strings, and it is logically consistent when every choice of local
//! operations admits exactly one fixed point.

use crate::bitcore::{all_product_ops, bits_of, index_of, inner_with_op, ProductOp};
use crate::{rat, Error, Rat};
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// A deterministic process `f : A -> X` on `n` binary parties.
///
/// `x_of_a[a]` is the input string handed back by the process when the
/// joint output string is `a`. Its matrix form is `{0,1}`-valued and
/// right stochastic (one 1 per row).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DetProcess {
    pub n: usize,
    pub x_of_a: Vec<u16>,
}

impl DetProcess {
    pub fn new(n: usize, x_of_a: Vec<u16>) -> Result<Self, Error> {
        let m = 1usize << n;
        if x_of_a.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "x_of_a has {} entries, expected {}",
                x_of_a.len(),
                m
            )));
        }
        if let Some(&bad) = x_of_a.iter().find(|&&x| x as usize >= m) {
            return Err(Error::IndexOutOfRange { index: bad as usize, n });
        }
        Ok(DetProcess { n, x_of_a })
    }

    /// Build from per-party coordinate functions of the output bits.
    pub fn from_coords(n: usize, f: impl Fn(&[u8]) -> Vec<u8>) -> Self {
        let m = 1usize << n;
        let x_of_a = (0..m)
            .map(|a| {
                let xb = f(&bits_of(a, n));
                debug_assert_eq!(xb.len(), n);
                index_of(&xb) as u16
            })
            .collect();
        DetProcess { n, x_of_a }
    }

    /// The tripartite self-circle process:
    /// `x1 = !a2 & !a3`, `x2 = a1 & a3`, `x3 = !a1 & a2`.
    pub fn self_circle() -> Self {
        DetProcess::from_coords(3, |a| {
            vec![(1 - a[1]) & (1 - a[2]), a[0] & a[2], (1 - a[0]) & a[1]]
        })
    }

    /// Bit `i` of the returned input string at output index `a`.
    pub fn coord(&self, i: usize, a: usize) -> u8 {
        ((self.x_of_a[a] >> (self.n - 1 - i)) & 1) as u8
    }

    /// Whether party `i`'s coordinate function is constant over all outputs.
    pub fn coord_is_constant(&self, i: usize) -> bool {
        let m = 1usize << self.n;
        let v = self.coord(i, 0);
        (1..m).all(|a| self.coord(i, a) == v)
    }

    /// Number of parties receiving a constant input; the `D(k)` class index.
    pub fn dk_class(&self) -> usize {
        (0..self.n).filter(|&i| self.coord_is_constant(i)).count()
    }

    /// The `{0,1}` right-stochastic matrix `M(a|x) = [x = f(a)]`.
    pub fn to_matrix(&self) -> ProcessVector {
        let m = 1usize << self.n;
        let mut entries = vec![Rat::zero(); m * m];
        for a in 0..m {
            entries[a * m + self.x_of_a[a] as usize] = rat(1);
        }
        ProcessVector { n: self.n, entries }
    }

    /// Output strings fixed by the loop `a -> f(a) -> d(f(a))`.
    pub fn fixed_points(&self, d: &ProductOp) -> Vec<usize> {
        let m = 1usize << self.n;
        (0..m).filter(|&a| d.apply(self.x_of_a[a] as usize) == a).collect()
    }

    fn fixed_point_count_is_one(&self, d_map: &[u16]) -> bool {
        let mut cnt = 0u32;
        for (a, &x) in self.x_of_a.iter().enumerate() {
            if d_map[x as usize] as usize == a {
                cnt += 1;
                if cnt > 1 {
                    return false;
                }
            }
        }
        cnt == 1
    }

    /// Logical consistency: exactly one fixed point for all `4^n` product ops.
    pub fn is_consistent(&self) -> bool {
        let ops = all_product_ops(self.n);
        ops.iter().all(|d| self.fixed_point_count_is_one(d.map()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, Error> {
        let p: DetProcess = serde_json::from_str(s)?;
        DetProcess::new(p.n, p.x_of_a)
    }
}

/// A nonnegative rational vector over `(a, x)` pairs; the general
/// (possibly probabilistic) classical-process candidate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProcessVector {
    pub n: usize,
    /// Entries indexed by `a * 2^n + x`.
    pub entries: Vec<Rat>,
}

impl ProcessVector {
    pub fn entry(&self, a: usize, x: usize) -> &Rat {
        &self.entries[a * (1 << self.n) + x]
    }

    /// Valid classical process: nonnegative and `M . D = 1` for all ops.
    pub fn validate(&self) -> bool {
        if self.entries.iter().any(|v| v.is_negative()) {
            return false;
        }
        all_product_ops(self.n)
            .iter()
            .all(|d| inner_with_op(&self.entries, d).map(|v| v == rat(1)).unwrap_or(false))
    }

    /// Matrix CSV: `2^n` rows of `2^n` exact rationals, row index = `a`.
    pub fn to_csv(&self) -> String {
        let m = 1usize << self.n;
        let mut out = String::new();
        for a in 0..m {
            for x in 0..m {
                if x > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", fmt_rat(self.entry(a, x)));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(s: &str) -> Result<Self, Error> {
        let rows: Vec<&str> = s.lines().filter(|l| !l.trim().is_empty()).collect();
        let m = rows.len();
        let n = m.trailing_zeros() as usize;
        if m == 0 || 1usize << n != m {
            return Err(Error::DimensionMismatch(format!("{m} rows is not a power of two")));
        }
        let mut entries = Vec::with_capacity(m * m);
        for row in rows {
            let cells: Vec<&str> = row.split(',').map(str::trim).collect();
            if cells.len() != m {
                return Err(Error::DimensionMismatch(format!(
                    "row has {} columns, expected {m}",
                    cells.len()
                )));
            }
            for c in cells {
                entries.push(parse_rat(c)?);
            }
        }
        Ok(ProcessVector { n, entries })
    }
}

/// Render an exact rational as `p` or `p/q`.
pub fn fmt_rat(v: &Rat) -> String {
    if v.denom() == &crate::Int::from(1) {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Parse `p` or `p/q`.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let parse_int = |t: &str| -> Result<crate::Int, Error> {
        t.parse::<crate::Int>()
            .map_err(|_| Error::Precondition(format!("bad rational literal {s:?}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::Precondition(format!("zero denominator in {s:?}")));
            }
            Ok(Rat::new(parse_int(p)?, den))
        }
        None => Ok(Rat::from_integer(parse_int(s)?)),
    }
}

/// Exhaustively enumerate all consistent deterministic processes for
/// `n <= 3`, sorted by `x_of_a` lexicographic order.
///
/// Candidates are encoded as base-`2^n` digit strings so the n = 3 scan
/// (16,777,216 functions against 64 precomputed op tables) is a pure
/// table walk, partitioned across rayon workers.
pub fn enumerate_det(n: usize) -> Result<Vec<DetProcess>, Error> {
    if n == 0 || n > 3 {
        return Err(Error::EnumerationBudget(n));
    }
    let m = 1usize << n;
    let op_maps: Vec<Vec<u16>> = all_product_ops(n).iter().map(|d| d.map().to_vec()).collect();
    let total: u64 = (m as u64).pow(m as u32);

    let chunk: u64 = 1 << 16;
    let chunks: Vec<u64> = (0..total.div_ceil(chunk)).collect();
    let mut found: Vec<DetProcess> = chunks
        .par_iter()
        .flat_map_iter(|&ci| {
            let start = ci * chunk;
            let end = (start + chunk).min(total);
            let mut local = Vec::new();
            let mut digits = vec![0u16; m];
            for code in start..end {
                let mut t = code;
                for d in digits.iter_mut().rev() {
                    *d = (t % m as u64) as u16;
                    t /= m as u64;
                }
                let consistent = op_maps.iter().all(|dm| {
                    let mut cnt = 0u32;
                    for (a, &x) in digits.iter().enumerate() {
                        if dm[x as usize] as usize == a {
                            cnt += 1;
                            if cnt > 1 {
                                break;
                            }
                        }
                    }
                    cnt == 1
                });
                if consistent {
                    local.push(DetProcess { n, x_of_a: digits.clone() });
                }
            }
            local
        })
        .collect();
    found.sort();
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::{all_product_ops, index_of};
    use proptest::prelude::*;

    /// Printed 8x8 self-circle matrix, rows indexed by a, columns by x.
    const SELF_CIRCLE_ROWS: [[u8; 8]; 8] = [
        [0, 0, 0, 0, 1, 0, 0, 0],
        [1, 0, 0, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 0, 0],
        [1, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 0, 0],
    ];

    #[test]
    fn self_circle_matches_printed_matrix() {
        let m = DetProcess::self_circle().to_matrix();
        for a in 0..8 {
            for x in 0..8 {
                assert_eq!(m.entry(a, x), &rat(SELF_CIRCLE_ROWS[a][x] as i64), "at ({a},{x})");
            }
        }
        assert_eq!(DetProcess::self_circle().x_of_a, vec![4, 0, 1, 1, 4, 2, 0, 2]);
    }

    #[test]
    fn constant_process_matrix_is_first_column() {
        let f = DetProcess::new(3, vec![0; 8]).unwrap();
        let m = f.to_matrix();
        for a in 0..8 {
            for x in 0..8 {
                assert_eq!(m.entry(a, x), &rat(i64::from(x == 0)));
            }
        }
        let id1 = DetProcess::new(1, vec![0, 1]).unwrap();
        let m1 = id1.to_matrix();
        assert_eq!(m1.entries, vec![rat(1), rat(0), rat(0), rat(1)]);
    }

    #[test]
    fn fixed_points_examples() {
        let id3 = ProductOp::from_tag_indices(&[1, 1, 1]).unwrap();
        // constant process: exactly { d(x0) }
        let f0 = DetProcess::new(3, vec![3; 8]).unwrap();
        for d in all_product_ops(3) {
            assert_eq!(f0.fixed_points(&d), vec![d.apply(3)]);
        }
        // unidirectional cycle x1=a3, x2=a1, x3=a2: two fixed points under identity
        let cyc = DetProcess::from_coords(3, |a| vec![a[2], a[0], a[1]]);
        assert_eq!(cyc.fixed_points(&id3), vec![0, 7]);
        assert!(!cyc.is_consistent());
        // self-circle: exactly one fixed point, the string 100
        let sc = DetProcess::self_circle();
        assert_eq!(sc.fixed_points(&id3), vec![index_of(&[1, 0, 0])]);
        assert!(sc.is_consistent());
    }

    #[test]
    fn enumerate_small() {
        let c1 = enumerate_det(1).unwrap();
        assert_eq!(c1.len(), 2); // only the two constants
        assert!(c1.iter().all(|f| f.dk_class() == 1));
        let c2 = enumerate_det(2).unwrap();
        assert_eq!(c2.len(), 12);
        assert!(enumerate_det(4).is_err());
    }

    #[test]
    fn dk_class_examples() {
        assert_eq!(DetProcess::new(2, vec![1, 1, 1, 1]).unwrap().dk_class(), 2);
        assert_eq!(DetProcess::self_circle().dk_class(), 0);
    }

    #[test]
    fn validate_vector_examples() {
        // uniform 1/2^n vector is a valid process
        let uni = ProcessVector { n: 2, entries: vec![crate::ratio(1, 4); 16] };
        assert!(uni.validate());
        let sc = DetProcess::self_circle().to_matrix();
        assert!(sc.validate());
        // moving one 1 within its row breaks normalization against some op
        let mut bad = sc.clone();
        bad.entries[4] = rat(0); // row a=000 had its 1 at x=100
        bad.entries[0] = rat(1);
        assert!(!bad.validate());
    }

    #[test]
    fn oracle_equivalence_all_n2_candidates() {
        // is_consistent(f) <=> validate(to_matrix(f)) across all 256 candidates
        for code in 0..256usize {
            let digits: Vec<u16> =
                (0..4).rev().map(|k| ((code >> (2 * k)) & 3) as u16).collect();
            let f = DetProcess::new(2, digits).unwrap();
            assert_eq!(f.is_consistent(), f.to_matrix().validate());
        }
    }

    #[test]
    fn csv_roundtrip() {
        let m = DetProcess::self_circle().to_matrix();
        let csv = m.to_csv();
        assert_eq!(ProcessVector::from_csv(&csv).unwrap(), m);
        let uni = ProcessVector { n: 1, entries: vec![crate::ratio(1, 2); 4] };
        assert_eq!(ProcessVector::from_csv(&uni.to_csv()).unwrap(), uni);
    }

    #[test]
    fn json_roundtrip() {
        let f = DetProcess::self_circle();
        let j = f.to_json();
        assert_eq!(DetProcess::from_json(&j).unwrap(), f);
        assert!(DetProcess::from_json("{\"n\":2,\"x_of_a\":[0,9,0,0]}").is_err());
    }

    proptest! {
        #[test]
        fn convex_mixtures_of_consistent_processes_validate(
            i in 0usize..12, j in 0usize..12, num in 0i64..=4
        ) {
            let cat = enumerate_det(2).unwrap();
            let (wi, wj) = (crate::ratio(num, 4), crate::ratio(4 - num, 4));
            let (mi, mj) = (cat[i].to_matrix(), cat[j].to_matrix());
            let mix: Vec<Rat> = mi.entries.iter().zip(&mj.entries)
                .map(|(a, b)| &wi * a + &wj * b).collect();
            let mixed = ProcessVector { n: 2, entries: mix };
            prop_assert!(mixed.validate());
        }

        #[test]
        fn fixed_point_count_equals_inner(fi in 0usize..12, di in 0usize..16) {
            let f = &enumerate_det(2).unwrap()[fi];
            let d = &all_product_ops(2)[di];
            let cnt = f.fixed_points(d).len() as i64;
            prop_assert_eq!(inner_with_op(&f.to_matrix().entries, d).unwrap(), rat(cnt));
        }
    }
}
