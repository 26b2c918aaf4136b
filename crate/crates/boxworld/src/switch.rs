//! The PAR-SER switch: a 4-partite classical process whose two control
//! parties select serial (either direction) or parallel composition of a
//! channel between the first two parties, together with its diagonal
//! process-matrix form expanded in exact dyadic arithmetic.

use crate::bitcore::{all_product_ops, index_of};
use crate::caustruct::SignalingDigraph;
use crate::process::DetProcess;
use crate::{rat, ratio, Error, Rat};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// The PAR-SER process:
/// `x1 = a2 | !a3 | !a4`, `x2 = a1 | a3 | a4`, `x3 = 0`, `x4 = 0`.
pub fn parser_process() -> DetProcess {
    DetProcess::from_coords(4, |a| {
        vec![
            a[1] | (1 - a[2]) | (1 - a[3]),
            a[0] | a[2] | a[3],
            0,
            0,
        ]
    })
}

/// Signaling between the first two parties conditioned on the control
/// parties' outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionalSignaling {
    /// Keyed by the control outputs `(a3, a4)`; values are flip-test
    /// edges between parties 1 and 2 (1-indexed).
    pub per_control: Vec<((u8, u8), Vec<(u8, u8)>)>,
}

/// Restricted flip test between parties 1 and 2 for each fixed value of
/// the control outputs `(a3, a4)`.
pub fn conditional_signaling_report(f: &DetProcess) -> Result<ConditionalSignaling, Error> {
    if f.n != 4 {
        return Err(Error::Precondition("conditional signaling expects 4 parties".into()));
    }
    let mut per_control = Vec::new();
    for a3 in 0..2u8 {
        for a4 in 0..2u8 {
            let mut edges = BTreeSet::new();
            for a1 in 0..2u8 {
                for a2 in 0..2u8 {
                    let a = index_of(&[a1, a2, a3, a4]);
                    for (i, j) in [(0usize, 1usize), (1, 0)] {
                        let af = a ^ (1 << (3 - i));
                        if f.coord(j, a) != f.coord(j, af) {
                            edges.insert(((i + 1) as u8, (j + 1) as u8));
                        }
                    }
                }
            }
            per_control.push(((a3, a4), edges.into_iter().collect()));
        }
    }
    Ok(ConditionalSignaling { per_control })
}

/// A diagonal process matrix over `2^{2n}` basis labels ordered
/// `x1..xn a1..an` (x1 is the most significant bit).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalProcessMatrix {
    pub n: usize,
    pub diag: Vec<Rat>,
}

impl DiagonalProcessMatrix {
    pub fn trace(&self) -> Rat {
        self.diag.iter().sum()
    }

    pub fn all_nonnegative(&self) -> bool {
        self.diag.iter().all(|v| !v.is_negative())
    }

    /// Entry at `(x, a)` with both strings MSB-first.
    pub fn entry(&self, x: usize, a: usize) -> &Rat {
        &self.diag[(x << self.n) | a]
    }
}

/// The graph diagonal of a deterministic process: 1 at `(f(a), a)`.
pub fn diag_from_process(f: &DetProcess) -> DiagonalProcessMatrix {
    let m = 1usize << f.n;
    let mut diag = vec![Rat::zero(); m * m];
    for a in 0..m {
        diag[((f.x_of_a[a] as usize) << f.n) | a] = rat(1);
    }
    DiagonalProcessMatrix { n: f.n, diag }
}

// slot indices in the 8-bit basis label x1 x2 x3 x4 a1 a2 a3 a4
const X1: usize = 0;
const X2: usize = 1;
const X3: usize = 2;
const X4: usize = 3;
const A1: usize = 4;
const A2: usize = 5;
const A3: usize = 6;
const A4: usize = 7;

fn mask(slots: &[usize]) -> u32 {
    slots.iter().fold(0u32, |m, &s| m | (1 << (7 - s)))
}

/// Expand the printed Pauli-z sum for the PAR-SER process matrix into its
/// 256-entry diagonal, in exact dyadic rationals.
pub fn build_w_parser() -> DiagonalProcessMatrix {
    // (coefficient, z-mask) pairs; each sigma^{S} contributes
    // (-1)^{popcount(label & mask)} on a basis label
    let mut terms: Vec<(Rat, u32)> = Vec::with_capacity(108);
    for s in [vec![], vec![X3], vec![X4], vec![X3, X4]] {
        terms.push((rat(1), mask(&s)));
    }
    let quarter = ratio(1, 4);
    let groups: [(&[&[usize]], &[(i64, &[usize])]); 3] = [
        (
            &[&[X1], &[X1, X3], &[X1, X4], &[X1, X3, X4]],
            &[
                (-3, &[]),
                (1, &[A2]),
                (-1, &[A3]),
                (-1, &[A4]),
                (-1, &[A2, A3]),
                (-1, &[A2, A4]),
                (1, &[A3, A4]),
                (1, &[A2, A3, A4]),
            ],
        ),
        (
            &[&[X2], &[X2, X3], &[X2, X4], &[X2, X3, X4]],
            &[
                (-3, &[]),
                (1, &[A1]),
                (1, &[A3]),
                (1, &[A4]),
                (1, &[A1, A3]),
                (1, &[A1, A4]),
                (1, &[A3, A4]),
                (1, &[A1, A3, A4]),
            ],
        ),
        (
            &[&[X1, X2], &[X1, X2, X3], &[X1, X2, X4], &[X1, X2, X3, X4]],
            &[
                (2, &[]),
                (-1, &[A1]),
                (-1, &[A2]),
                (-2, &[A3, A4]),
                (1, &[A2, A3]),
                (1, &[A2, A4]),
                (-1, &[A1, A3]),
                (-1, &[A1, A4]),
                (-1, &[A1, A3, A4]),
                (-1, &[A2, A3, A4]),
            ],
        ),
    ];
    for (xparts, aparts) in groups {
        for xs in xparts {
            let xm = mask(xs);
            for &(c, ats) in aparts.iter() {
                terms.push((&quarter * rat(c), xm | mask(ats)));
            }
        }
    }
    let sixteenth = ratio(1, 16);
    let diag = (0u32..256)
        .map(|label| {
            let mut v = Rat::zero();
            for (c, m) in &terms {
                if (label & m).count_ones() % 2 == 0 {
                    v += c;
                } else {
                    v -= c;
                }
            }
            v * &sixteenth
        })
        .collect();
    DiagonalProcessMatrix { n: 4, diag }
}

/// Classical Choi-Jamiolkowski contraction check: for every product
/// operation `d`, the diagonal restricted to `{(x, d(x))}` sums to 1, and
/// the diagonal support equals the graph of `f` with constant value.
pub fn validate_w(w: &DiagonalProcessMatrix, f: &DetProcess) -> Result<bool, Error> {
    if w.n != f.n {
        return Err(Error::DimensionMismatch(format!("w.n {} vs f.n {}", w.n, f.n)));
    }
    let m = 1usize << f.n;
    for d in all_product_ops(f.n) {
        let s: Rat = (0..m).map(|x| w.entry(x, d.apply(x)).clone()).sum();
        if s != rat(1) {
            return Ok(false);
        }
    }
    // entrywise proportionality to the process graph
    let graph = diag_from_process(f);
    let mut scale: Option<Rat> = None;
    for i in 0..w.diag.len() {
        match (w.diag[i].is_zero(), graph.diag[i].is_zero()) {
            (true, true) => {}
            (false, true) | (true, false) => return Ok(false),
            (false, false) => {
                let r = &w.diag[i] / &graph.diag[i];
                match &scale {
                    None => scale = Some(r),
                    Some(s) if *s == r => {}
                    _ => return Ok(false),
                }
            }
        }
    }
    Ok(true)
}

/// CLI report for `switch validate`.
#[derive(Debug, Serialize)]
pub struct SwitchReport {
    pub consistent: bool,
    pub signaling_pattern: ConditionalSignaling,
    pub trace: String,
    pub diag_nonneg: bool,
    pub nonzero_entries: usize,
    pub contractions_ok: bool,
}

pub fn switch_report() -> Result<SwitchReport, Error> {
    let f = parser_process();
    let w = build_w_parser();
    Ok(SwitchReport {
        consistent: f.is_consistent(),
        signaling_pattern: conditional_signaling_report(&f)?,
        trace: crate::process::fmt_rat(&w.trace()),
        diag_nonneg: w.all_nonnegative(),
        nonzero_entries: w.diag.iter().filter(|v| !v.is_zero()).count(),
        contractions_ok: validate_w(&w, &f)?,
    })
}

/// Flip-test digraph restricted to the full process (re-exported here for
/// the report pipeline).
pub fn parser_digraph() -> SignalingDigraph {
    crate::caustruct::signaling_digraph(&parser_process())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parser_process_shape() {
        let f = parser_process();
        assert_eq!(
            f.x_of_a,
            vec![8, 12, 12, 4, 8, 12, 12, 12, 12, 12, 12, 4, 12, 12, 12, 12]
        );
        assert!(f.is_consistent());
        assert_eq!(f.dk_class(), 2);
        // a3 ^ a4 = 1 forces x1 = x2 = 1 regardless of a1, a2
        for a1 in 0..2u8 {
            for a2 in 0..2u8 {
                for (a3, a4) in [(0u8, 1u8), (1, 0)] {
                    let a = index_of(&[a1, a2, a3, a4]);
                    assert_eq!(f.coord(0, a), 1);
                    assert_eq!(f.coord(1, a), 1);
                }
            }
        }
        // control 00: x2 = a1 (one-way channel), x1 constant
        for a1 in 0..2u8 {
            for a2 in 0..2u8 {
                let a = index_of(&[a1, a2, 0, 0]);
                assert_eq!(f.coord(1, a), a1);
                assert_eq!(f.coord(0, a), 1);
            }
        }
    }

    #[test]
    fn conditional_signaling_pattern() {
        let rep = conditional_signaling_report(&parser_process()).unwrap();
        let get = |c: (u8, u8)| {
            rep.per_control.iter().find(|(k, _)| *k == c).unwrap().1.clone()
        };
        assert_eq!(get((0, 0)), vec![(1, 2)]);
        assert_eq!(get((1, 1)), vec![(2, 1)]);
        assert!(get((0, 1)).is_empty());
        assert!(get((1, 0)).is_empty());
    }

    #[test]
    fn w_parser_support_and_trace() {
        let w = build_w_parser();
        assert_eq!(w.trace(), rat(16));
        assert!(w.all_nonnegative());
        let nz: Vec<usize> = (0..256).filter(|&i| !w.diag[i].is_zero()).collect();
        assert_eq!(nz.len(), 16);
        // all nonzero entries equal, located exactly on the process graph
        let f = parser_process();
        let graph = diag_from_process(&f);
        for i in 0..256 {
            assert_eq!(w.diag[i], graph.diag[i], "at label {i}");
        }
    }

    #[test]
    fn w_parser_contractions() {
        let w = build_w_parser();
        let f = parser_process();
        assert!(validate_w(&w, &f).unwrap());
        // perturbing one diagonal entry breaks some contraction
        let mut bad = w.clone();
        bad.diag[3] += ratio(1, 16);
        assert!(!validate_w(&bad, &f).unwrap());
    }

    #[test]
    fn single_party_constant_process_matrix() {
        // W = (I + sigma^{x1}) / 2 has diagonal [x = 0]
        let f = DetProcess::new(1, vec![0, 0]).unwrap();
        let w = DiagonalProcessMatrix {
            n: 1,
            diag: vec![rat(1), rat(1), rat(0), rat(0)],
        };
        assert!(validate_w(&w, &f).unwrap());
        assert_eq!(w.trace(), rat(2));
    }
}
