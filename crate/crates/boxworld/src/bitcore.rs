//! Scenario conventions, bit-string indexing, local and product
//! deterministic operations, and deterministic behaviors.
//!
//! Bit order is fixed crate-wide: party 1 occupies the most significant
//! bit, so for n = 3 the output string a1a2a3 = 010 has index 2. Rows of
//! every matrix are indexed by the output string a, columns by the input
//! string x. This is the unique convention under which the self-circle
//! process reproduces its printed 8x8 matrix row by row.

use crate::{rat, Error, Rat};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// An (n, input_cardinality, output_cardinality) measurement scenario.
///
/// All the exact machinery in this crate works in (n,2,2); the
/// certification module uses its own mixed-cardinality scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub n_parties: usize,
    pub input_cardinality: usize,
    pub output_cardinality: usize,
}

impl Scenario {
    /// The binary scenario on `n` parties.
    pub fn binary(n: usize) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::Precondition("n_parties must be >= 1".into()));
        }
        Ok(Scenario { n_parties: n, input_cardinality: 2, output_cardinality: 2 })
    }

    /// Number of joint strings, `2^n`.
    pub fn strings(&self) -> usize {
        1 << self.n_parties
    }
}

/// A length-`n` bit string identified with its MSB-first index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString {
    pub n: usize,
    pub value: usize,
}

impl BitString {
    pub fn new(n: usize, value: usize) -> Result<Self, Error> {
        if value >= (1 << n) {
            return Err(Error::IndexOutOfRange { index: value, n });
        }
        Ok(BitString { n, value })
    }

    /// Bit of party `i` (0-indexed; party 1 is `i = 0`).
    pub fn bit(&self, i: usize) -> u8 {
        ((self.value >> (self.n - 1 - i)) & 1) as u8
    }

    /// Flip party `i`'s bit.
    pub fn flip(&self, i: usize) -> BitString {
        BitString { n: self.n, value: self.value ^ (1 << (self.n - 1 - i)) }
    }
}

/// MSB-first index of a bit list: party 1 first.
pub fn index_of(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

/// Inverse of [`index_of`].
pub fn bits_of(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((index >> (n - 1 - i)) & 1) as u8).collect()
}

/// The four single-party deterministic operations.
///
/// Tags follow the printed order: 0 = constant-0, 1 = identity,
/// 2 = bit-flip, 3 = constant-1. Each is a left stochastic 2x2 matrix
/// `D(a|x)` with exactly one 1 per column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LocalTag {
    Const0 = 0,
    Identity = 1,
    Flip = 2,
    Const1 = 3,
}

impl LocalTag {
    pub fn from_u8(t: u8) -> Result<Self, Error> {
        match t {
            0 => Ok(LocalTag::Const0),
            1 => Ok(LocalTag::Identity),
            2 => Ok(LocalTag::Flip),
            3 => Ok(LocalTag::Const1),
            _ => Err(Error::InvalidTag(t)),
        }
    }

    pub fn apply(&self, x: u8) -> u8 {
        match self {
            LocalTag::Const0 => 0,
            LocalTag::Identity => x,
            LocalTag::Flip => 1 - x,
            LocalTag::Const1 => 1,
        }
    }

    /// The 2x2 table `D(a|x)`, rows indexed by `a`, columns by `x`.
    pub fn table(&self) -> [[u8; 2]; 2] {
        let mut t = [[0u8; 2]; 2];
        for x in 0..2u8 {
            t[self.apply(x) as usize][x as usize] = 1;
        }
        t
    }
}

pub const ALL_TAGS: [LocalTag; 4] =
    [LocalTag::Const0, LocalTag::Identity, LocalTag::Flip, LocalTag::Const1];

/// A product of local deterministic operations, `D = D^(t1) x ... x D^(tn)`.
///
/// `map[x]` is the unique output string with `D(a|x) = 1`, so the matrix
/// has exactly `2^n` ones, one per column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProductOp {
    pub tags: Vec<LocalTag>,
    map: Vec<u16>,
}

impl ProductOp {
    pub fn new(tags: &[LocalTag]) -> Self {
        let n = tags.len();
        let map = (0..1usize << n)
            .map(|x| {
                let xb = bits_of(x, n);
                let ab: Vec<u8> = (0..n).map(|i| tags[i].apply(xb[i])).collect();
                index_of(&ab) as u16
            })
            .collect();
        ProductOp { tags: tags.to_vec(), map }
    }

    pub fn from_tag_indices(tags: &[u8]) -> Result<Self, Error> {
        let tags: Result<Vec<_>, _> = tags.iter().map(|&t| LocalTag::from_u8(t)).collect();
        Ok(ProductOp::new(&tags?))
    }

    pub fn n(&self) -> usize {
        self.tags.len()
    }

    /// Output string for input string `x`.
    pub fn apply(&self, x: usize) -> usize {
        self.map[x] as usize
    }

    /// The lookup table `x -> a` backing this operation.
    pub fn map(&self) -> &[u16] {
        &self.map
    }

    /// Matrix entry `D(a|x)`.
    pub fn entry(&self, a: usize, x: usize) -> u8 {
        u8::from(self.map[x] as usize == a)
    }
}

/// All `4^n` product operations in tag-lexicographic order (party 1's tag
/// varies slowest).
pub fn all_product_ops(n: usize) -> Vec<ProductOp> {
    let total = 1usize << (2 * n);
    (0..total)
        .map(|code| {
            let tags: Vec<LocalTag> = (0..n)
                .map(|i| ALL_TAGS[(code >> (2 * (n - 1 - i))) & 3])
                .collect();
            ProductOp::new(&tags)
        })
        .collect()
}

/// A behavior `P(a|x)` over `(output, input)` string pairs, stored as
/// exact rationals indexed by `a * 2^n + x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Behavior {
    pub scenario: Scenario,
    pub p: Vec<Rat>,
}

impl Behavior {
    pub fn entry(&self, a: usize, x: usize) -> &Rat {
        &self.p[a * self.scenario.strings() + x]
    }

    /// Per-setting normalization, printed Eqs. for the state space.
    pub fn is_normalized(&self) -> bool {
        let m = self.scenario.strings();
        (0..m).all(|x| (0..m).map(|a| self.entry(a, x)).sum::<Rat>() == rat(1))
    }

    pub fn is_nonnegative(&self) -> bool {
        self.p.iter().all(|v| !v.is_negative())
    }

    /// Exact marginal identities: `sum_{a_i} P(a|x)` independent of `x_i`.
    pub fn is_no_signaling(&self) -> bool {
        let n = self.scenario.n_parties;
        let m = self.scenario.strings();
        for i in 0..n {
            let hi = 1 << (n - 1 - i);
            for a in 0..m {
                if a & hi != 0 {
                    continue; // marginal sums pair a with a-flipped; visit once
                }
                let af = a | hi;
                for x in 0..m {
                    if x & hi != 0 {
                        continue;
                    }
                    let xf = x ^ (1 << (n - 1 - i));
                    let lhs = self.entry(a, x) + self.entry(af, x);
                    let rhs = self.entry(a, xf) + self.entry(af, xf);
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// The local deterministic behavior of a product operation:
/// `Q(a|x) = 1` iff `a = op(x)`.
pub fn local_det_behavior(op: &ProductOp) -> Behavior {
    let n = op.n();
    let m = 1usize << n;
    let mut p = vec![Rat::zero(); m * m];
    for x in 0..m {
        p[op.apply(x) * m + x] = rat(1);
    }
    Behavior { scenario: Scenario::binary(n).expect("n >= 1"), p }
}

/// Exact inner product of two `(a,x)`-indexed rational vectors.
pub fn inner(u: &[Rat], v: &[Rat]) -> Result<Rat, Error> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", u.len(), v.len())));
    }
    Ok(u.iter().zip(v).map(|(a, b)| a * b).sum())
}

/// Inner product of a rational vector with a product operation's 0/1 matrix:
/// the sum of `u(op(x)|x)` over all inputs.
pub fn inner_with_op(u: &[Rat], op: &ProductOp) -> Result<Rat, Error> {
    let m = 1usize << op.n();
    if u.len() != m * m {
        return Err(Error::DimensionMismatch(format!("{} vs {}", u.len(), m * m)));
    }
    Ok((0..m).map(|x| u[op.apply(x) * m + x].clone()).sum())
}
