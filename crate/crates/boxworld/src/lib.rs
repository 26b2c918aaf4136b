//! Box-world behaviors, logically consistent classical processes, and the
//! exact polytope machinery connecting them.
//!
//! The crate is organized around the duality between two descriptions of
//! multipartite causality: the no-signaling polytope of behaviors
//! `P(a|x)` and the polytope of classical processes `M(a|x)` normalized
//! against every product of local deterministic operations. On top of the
//! exact-rational core sit the effect classifier, the 4-partite process
//! sampler with symmetry reduction, causal-structure extraction, the
//! PAR-SER switch (as a classical process and as a diagonal process
//! matrix), and the floating-point certification of its quantum variant.

pub mod bitcore;
pub mod caustruct;
pub mod certify;
pub mod discover;
pub mod effects;
pub mod geometry;
pub mod linalg;
pub mod process;
pub mod simplex;
pub mod switch;

mod error;

pub use error::Error;

/// Exact rational scalar used by all polytope-facing arithmetic.
pub type Rat = num_rational::BigRational;
/// Arbitrary-precision integer backing [`Rat`] and the double-description rays.
pub type Int = num_bigint::BigInt;

/// Shorthand for an integer-valued [`Rat`].
pub fn rat(v: i64) -> Rat {
    Rat::from_integer(Int::from(v))
}

/// Shorthand for the exact fraction `num/den`.
pub fn ratio(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}
