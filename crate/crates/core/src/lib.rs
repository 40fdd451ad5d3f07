//! Binary reachability of timed automata.

pub mod formula;
pub mod model;
pub mod nfa;
pub mod oracle;
pub mod parikh;
pub mod reach;
pub mod region;
pub mod scalar;
pub mod zone;

pub use num_rational::Ratio;

/// Exact rationals with 64-bit numerator and denominator.
pub type Rational = num_rational::Ratio<i64>;
/// Arbitrary-precision rationals.
pub type BigRational = num_rational::Ratio<num_bigint::BigInt>;
