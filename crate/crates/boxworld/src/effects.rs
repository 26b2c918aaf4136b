//! Classification of {0,1}-valued effects into normal and extra ones.
//!
//! A normal effect is a subset of the ones of some deterministic
//! classical process; an extra effect over-counts against at least one
//! product operation. The pairwise index-set criterion decides between
//! the two, and the brute-force oracle over all `4^n` operations serves
//! as its independent ground truth.

use crate::bitcore::{all_product_ops, bits_of, ProductOp};
use crate::geometry::cp_hrep;
use crate::process::{fmt_rat, ProcessVector};
use crate::Error;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// A {0,1}-valued matrix stored as its set of one-positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZMatrix {
    pub n: usize,
    pub ones: BTreeSet<(u16, u16)>,
}

impl ZMatrix {
    pub fn new(n: usize, ones: impl IntoIterator<Item = (u16, u16)>) -> Result<Self, Error> {
        let m = 1u16 << n;
        let ones: BTreeSet<(u16, u16)> = ones.into_iter().collect();
        if let Some(&(a, x)) = ones.iter().find(|&&(a, x)| a >= m || x >= m) {
            return Err(Error::IndexOutOfRange { index: (a.max(x)) as usize, n });
        }
        Ok(ZMatrix { n, ones })
    }

    pub fn inner_with_op(&self, op: &ProductOp) -> usize {
        self.ones.iter().filter(|&&(a, x)| op.apply(x as usize) == a as usize).count()
    }

    pub fn to_csv(&self) -> String {
        let m = 1usize << self.n;
        let mut out = String::new();
        for a in 0..m {
            let row: Vec<&str> = (0..m)
                .map(|x| if self.ones.contains(&(a as u16, x as u16)) { "1" } else { "0" })
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Parse a `2^n x 2^n` CSV of exact values; entries must be 0 or 1
    /// (fractional effects are rejected, not classified).
    pub fn from_csv(s: &str) -> Result<Self, Error> {
        let pv = ProcessVector::from_csv(s)?;
        let m = 1usize << pv.n;
        let mut ones = BTreeSet::new();
        for a in 0..m {
            for x in 0..m {
                let v = pv.entry(a, x);
                if v.is_one() {
                    ones.insert((a as u16, x as u16));
                } else if !v.is_zero() {
                    return Err(Error::Precondition(format!(
                        "entry {} at ({a},{x}) is not 0/1; only {{0,1}}-valued effects are classifiable",
                        fmt_rat(v)
                    )));
                }
            }
        }
        Ok(ZMatrix { n: pv.n, ones })
    }
}

/// Index set of identical bits between two equal-length strings
/// (1-indexed parties).
pub fn identical_index_set(u: &[u8], v: &[u8]) -> Result<BTreeSet<usize>, Error> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", u.len(), v.len())));
    }
    Ok(u.iter().zip(v).enumerate().filter(|(_, (a, b))| a == b).map(|(q, _)| q + 1).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EffectKind {
    Normal,
    Extra,
}

/// Which case of the pairwise criterion fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EffectCase {
    #[serde(rename = "1.1")]
    Empty,
    #[serde(rename = "1.2")]
    Singleton,
    #[serde(rename = "2")]
    PairwiseSeparated,
    #[serde(rename = "3")]
    SharedAssignment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectVerdict {
    pub kind: EffectKind,
    pub case: EffectCase,
    /// For an extra effect, the first product operation (in
    /// tag-lexicographic order) with inner product >= 2.
    pub witness: Option<ProductOp>,
}

/// Decide normal vs extra by the pairwise index-set criterion.
///
/// Normal: at most one 1, or every pair of ones has some party with equal
/// inputs and different outputs. Extra: some pair agrees on every output
/// bit whose party has identical inputs. The two cases are complementary
/// for each pair; the runtime asserts the dichotomy on every call.
pub fn classify(z: &ZMatrix) -> Result<EffectVerdict, Error> {
    let m = 1usize << z.n;
    if z.ones.len() >= m {
        return Err(Error::Precondition(format!(
            "effect has {} ones; classification requires fewer than 2^n = {m}",
            z.ones.len()
        )));
    }
    if z.ones.is_empty() {
        return Ok(EffectVerdict { kind: EffectKind::Normal, case: EffectCase::Empty, witness: None });
    }
    if z.ones.len() == 1 {
        return Ok(EffectVerdict {
            kind: EffectKind::Normal,
            case: EffectCase::Singleton,
            witness: None,
        });
    }
    let ones: Vec<(Vec<u8>, Vec<u8>)> = z
        .ones
        .iter()
        .map(|&(a, x)| (bits_of(a as usize, z.n), bits_of(x as usize, z.n)))
        .collect();
    let mut extra_pair = None;
    'pairs: for i in 0..ones.len() {
        for j in i + 1..ones.len() {
            let (ai, xi) = &ones[i];
            let (aj, xj) = &ones[j];
            let separated =
                (0..z.n).any(|q| xi[q] == xj[q] && ai[q] != aj[q]);
            let shared = (0..z.n).all(|q| xi[q] != xj[q] || ai[q] == aj[q]);
            if separated == shared {
                // cannot happen: the conditions are logical complements
                return Err(Error::Guard(format!(
                    "case dichotomy violated for pair {:?} / {:?}",
                    (ai, xi),
                    (aj, xj)
                )));
            }
            if shared {
                extra_pair = Some((i, j));
                break 'pairs;
            }
        }
    }
    if extra_pair.is_some() {
        let witness = all_product_ops(z.n).into_iter().find(|op| z.inner_with_op(op) >= 2);
        let witness = witness.ok_or_else(|| {
            Error::Guard("extra verdict without an over-counting operation".into())
        })?;
        Ok(EffectVerdict {
            kind: EffectKind::Extra,
            case: EffectCase::SharedAssignment,
            witness: Some(witness),
        })
    } else {
        Ok(EffectVerdict {
            kind: EffectKind::Normal,
            case: EffectCase::PairwiseSeparated,
            witness: None,
        })
    }
}

/// Brute-force ground truth: normal iff no product operation counts the
/// ones more than once.
pub fn oracle(z: &ZMatrix) -> bool {
    all_product_ops(z.n).iter().all(|op| z.inner_with_op(op) <= 1)
}

#[derive(Debug, Clone)]
pub struct FractionalProbe {
    /// The extra selection found within the support.
    pub witness_selection: ZMatrix,
    /// The over-counting operation for it.
    pub witness_op: ProductOp,
    pub selections_tried: usize,
}

/// Probe a fractional vertex of the classical-process polytope for an
/// extra {0,1} right-stochastic selection inside its support.
///
/// Exhaustion without a witness would falsify the determinism theorem and
/// is reported as a hard error.
pub fn probe_fractional_vertex(m: &ProcessVector) -> Result<FractionalProbe, Error> {
    let n = m.n;
    let size = 1usize << n;
    let support: Vec<Vec<u16>> = (0..size)
        .map(|a| {
            (0..size)
                .filter(|&x| !m.entry(a, x).is_zero())
                .map(|x| x as u16)
                .collect()
        })
        .collect();
    let support_size: usize = support.iter().map(Vec::len).sum();
    if support_size > 64 {
        return Err(Error::Guard(format!("support size {support_size} exceeds the 64-entry probe guard")));
    }
    if m.entries.iter().all(|v| v.is_zero() || v.is_one()) {
        return Err(Error::Precondition("vertex has no fractional entry".into()));
    }
    let h = cp_hrep(n);
    if !h.is_vertex(&m.entries) {
        return Err(Error::Precondition(
            "input is not a vertex of the classical-process polytope".into(),
        ));
    }

    // walk all selections of one support column per row
    let mut choice = vec![0usize; size];
    let mut tried = 0usize;
    loop {
        tried += 1;
        let ones: Vec<(u16, u16)> =
            (0..size).map(|a| (a as u16, support[a][choice[a]])).collect();
        let z = ZMatrix { n, ones: ones.into_iter().collect() };
        if let Some(op) = all_product_ops(n).into_iter().find(|op| z.inner_with_op(op) >= 2) {
            return Ok(FractionalProbe { witness_selection: z, witness_op: op, selections_tried: tried });
        }
        // next selection
        let mut row = 0usize;
        loop {
            if row == size {
                return Err(Error::Guard(format!(
                    "no extra selection among {tried} candidates; this falsifies the fine-tuning theorem"
                )));
            }
            choice[row] += 1;
            if choice[row] < support[row].len() {
                break;
            }
            choice[row] = 0;
            row += 1;
        }
    }
}

/// Uniform-random {0,1} matrix with `ones` one-entries.
pub fn random_zmatrix(n: usize, ones: usize, rng: &mut impl rand::Rng) -> ZMatrix {
    let m = 1u16 << n;
    let mut set = BTreeSet::new();
    while set.len() < ones {
        set.insert((rng.gen_range(0..m), rng.gen_range(0..m)));
    }
    ZMatrix { n, ones: set }
}

/// Serializable verdict for the CLI.
#[derive(Debug, Serialize)]
pub struct EffectReport {
    pub kind: EffectKind,
    pub case: EffectCase,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_tags: Option<Vec<u8>>,
    pub oracle_agrees: bool,
}

pub fn effect_report(z: &ZMatrix) -> Result<EffectReport, Error> {
    let v = classify(z)?;
    let oracle_normal = oracle(z);
    Ok(EffectReport {
        kind: v.kind,
        case: v.case,
        witness_tags: v
            .witness
            .as_ref()
            .map(|op| op.tags.iter().map(|t| *t as u8).collect()),
        oracle_agrees: (v.kind == EffectKind::Normal) == oracle_normal,
    })
}

/// Guard used by CLI/tests: the verdict's witness over-counts exactly as
/// claimed.
pub fn witness_is_valid(z: &ZMatrix, v: &EffectVerdict) -> bool {
    match (&v.kind, &v.witness) {
        (EffectKind::Extra, Some(op)) => z.inner_with_op(op) >= 2,
        (EffectKind::Normal, None) => true,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitcore::index_of;
    use crate::geometry::{lp_vertex, random_objective};
    use crate::process::DetProcess;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn identical_index_set_examples() {
        let a = [0, 1, 0, 0, 1, 0];
        let b = [0, 1, 0, 0, 0, 1];
        assert_eq!(
            identical_index_set(&a, &b).unwrap(),
            BTreeSet::from([1, 2, 3, 4])
        );
        assert_eq!(identical_index_set(&a, &a).unwrap().len(), 6);
        let c: Vec<u8> = a.iter().map(|&v| 1 - v).collect();
        assert!(identical_index_set(&a, &c).unwrap().is_empty());
        assert!(identical_index_set(&a, &[0]).is_err());
    }

    #[test]
    fn classify_examples() {
        // single one: normal, case 1.2
        let z = ZMatrix::new(2, [(3, 1)]).unwrap();
        let v = classify(&z).unwrap();
        assert_eq!((v.kind, v.case), (EffectKind::Normal, EffectCase::Singleton));
        // x equal, a1 differs: normal case 2
        let z = ZMatrix::new(2, [(0, 0), (2, 0)]).unwrap();
        let v = classify(&z).unwrap();
        assert_eq!((v.kind, v.case), (EffectKind::Normal, EffectCase::PairwiseSeparated));
        assert!(oracle(&z));
        // ones at (00|00),(00|01): extra with the double constant-0 witness
        let z = ZMatrix::new(2, [(0, 0), (0, 1)]).unwrap();
        let v = classify(&z).unwrap();
        assert_eq!((v.kind, v.case), (EffectKind::Extra, EffectCase::SharedAssignment));
        let w = v.witness.clone().unwrap();
        assert_eq!(w.tags.iter().map(|t| *t as u8).collect::<Vec<_>>(), vec![0, 0]);
        assert!(witness_is_valid(&z, &v));
        assert!(!oracle(&z));
        // all-zero: case 1.1
        let z = ZMatrix::new(2, []).unwrap();
        assert_eq!(classify(&z).unwrap().case, EffectCase::Empty);
        assert!(oracle(&z));
        // full measurement rejected
        let full = ZMatrix::new(1, [(0, 0), (1, 0)]).unwrap();
        assert!(classify(&full).is_err());
    }

    #[test]
    fn subsets_of_consistent_processes_are_normal() {
        let sc = DetProcess::self_circle();
        let all: Vec<(u16, u16)> =
            (0..8).map(|a| (a as u16, sc.x_of_a[a])).collect();
        // every proper subset of the ones classifies normal
        for mask in 0..(1u16 << 8) - 1 {
            if mask.count_ones() > 4 {
                continue; // sample the small subsets densely, large ones via mask symmetry
            }
            let ones: Vec<(u16, u16)> = (0..8)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| all[i])
                .collect();
            let z = ZMatrix::new(3, ones).unwrap();
            let v = classify(&z).unwrap();
            assert_eq!(v.kind, EffectKind::Normal, "subset mask {mask:#b}");
            assert!(oracle(&z));
        }
    }

    #[test]
    fn classifier_matches_oracle_exhaustively_n2() {
        // all Z with |ones| <= 3 over the 16 cells
        let cells: Vec<(u16, u16)> =
            (0..4u16).flat_map(|a| (0..4u16).map(move |x| (a, x))).collect();
        let mut checked = 0usize;
        for i in 0..cells.len() {
            for j in i + 1..cells.len() {
                for k in j + 1..cells.len() {
                    let z = ZMatrix::new(2, [cells[i], cells[j], cells[k]]).unwrap();
                    let v = classify(&z).unwrap();
                    assert_eq!(v.kind == EffectKind::Normal, oracle(&z));
                    assert!(witness_is_valid(&z, &v));
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 560);
    }

    #[test]
    fn classifier_matches_oracle_randomized_n3_n4() {
        let mut rng = ChaCha20Rng::seed_from_u64(20_250_810);
        for n in [3usize, 4] {
            for _ in 0..2_000 {
                let ones = rng.gen_range(0..(1 << n));
                let z = random_zmatrix(n, ones, &mut rng);
                let v = classify(&z).unwrap();
                assert_eq!(v.kind == EffectKind::Normal, oracle(&z));
                assert!(witness_is_valid(&z, &v));
            }
        }
    }

    #[test]
    fn probe_rejects_non_vertices_and_deterministic_input() {
        let uniform = ProcessVector { n: 2, entries: vec![crate::ratio(1, 4); 16] };
        assert!(matches!(probe_fractional_vertex(&uniform), Err(Error::Precondition(_))));
        let det = DetProcess::self_circle().to_matrix();
        assert!(matches!(probe_fractional_vertex(&det), Err(Error::Precondition(_))));
    }

    #[test]
    fn probe_finds_extra_selection_on_a_fractional_vertex() {
        let h = cp_hrep(3);
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        let mut probed = false;
        for _ in 0..400 {
            let obj = random_objective(h.dim, &mut rng);
            let v = lp_vertex(&h, &obj).unwrap();
            if v.iter().any(|q| !q.is_zero() && !q.is_one()) {
                let pv = ProcessVector { n: 3, entries: v };
                let probe = probe_fractional_vertex(&pv).unwrap();
                assert!(probe.witness_selection.inner_with_op(&probe.witness_op) >= 2);
                // the selection is right stochastic within the support
                assert_eq!(probe.witness_selection.ones.len(), 8);
                probed = true;
                break;
            }
        }
        assert!(probed, "no fractional vertex found to probe");
    }

    #[test]
    fn csv_parse_rejects_fractional_entries() {
        assert!(ZMatrix::from_csv("1,0\n1/2,0\n").is_err());
        let z = ZMatrix::from_csv("1,0\n0,1\n").unwrap();
        assert_eq!(z.ones.len(), 2);
        assert_eq!(ZMatrix::from_csv(&z.to_csv()).unwrap(), z);
    }

    #[test]
    fn eq19_witness_overcounts_exactly() {
        // every extra verdict carries a witness with inner >= 2
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        let mut extras = 0;
        while extras < 50 {
            let ones = rng.gen_range(2..8);
            let z = random_zmatrix(3, ones, &mut rng);
            let v = classify(&z).unwrap();
            if v.kind == EffectKind::Extra {
                assert!(z.inner_with_op(v.witness.as_ref().unwrap()) >= 2);
                extras += 1;
            }
        }
    }

    #[test]
    fn index_set_matches_bitstring_layout() {
        // parties are 1-indexed MSB-first in the pairwise criterion
        let z = ZMatrix::new(2, [(index_of(&[0, 0]) as u16, 0), (index_of(&[1, 0]) as u16, 0)])
            .unwrap();
        assert_eq!(classify(&z).unwrap().kind, EffectKind::Normal);
    }
}
