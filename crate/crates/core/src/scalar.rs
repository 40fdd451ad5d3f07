//! Exact scalar types for clock values.
//!
//! Everything that touches concrete time (valuations, delays, membership of a
//! point in a zone) is generic over [`Scalar`]. Only exact ordered fields are
//! admitted: boundary tests such as `x = 1` must be decided exactly, so there is
//! deliberately no implementation for `f32`/`f64`.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// An exact, totally ordered number type usable as a clock value.
pub trait Scalar:
    Clone + Ord + Hash + Debug + Display + Num + Signed + Send + Sync + 'static
{
    fn from_int(value: i64) -> Self;

    /// `numerator / denominator`; panics on a zero denominator.
    fn from_frac(numerator: i64, denominator: i64) -> Self;

    /// Largest integer not above `self`.
    fn floor_int(&self) -> i64;

    fn is_integral(&self) -> bool;

    /// Denominator in lowest terms.
    fn denominator_u64(&self) -> u64;

    /// `self - floor(self)`, always in `[0, 1)`.
    fn fract_part(&self) -> Self {
        self.clone() - Self::from_int(self.floor_int())
    }

    fn half(&self) -> Self {
        self.clone() / Self::from_int(2)
    }
}

impl<I> Scalar for Ratio<I>
where
    I: Integer
        + Clone
        + Hash
        + Debug
        + Display
        + Signed
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static,
{
    fn from_int(value: i64) -> Self {
        Ratio::from_integer(I::from_i64(value).expect("integer fits the scalar type"))
    }

    fn from_frac(numerator: i64, denominator: i64) -> Self {
        Ratio::new(
            I::from_i64(numerator).expect("numerator fits the scalar type"),
            I::from_i64(denominator).expect("denominator fits the scalar type"),
        )
    }

    fn floor_int(&self) -> i64 {
        self.floor()
            .to_integer()
            .to_i64()
            .expect("clock value fits in i64")
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn denominator_u64(&self) -> u64 {
        self.denom().to_u64().expect("denominator fits in u64")
    }
}
