//! Scalar abstraction shared by fuzzy semantics, networks and loss circuits.
//!
//! Everything numeric that flows through a network or a fuzzy evaluation is
//! generic over [`Scalar`], implemented for `f32` and `f64`. Exact
//! probability bookkeeping in the learning-theory module uses its own
//! [`Weight`](crate::theory::Weight) trait so that rationals can be used too.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + FromStr
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Bit pattern used for exact hashing of states.
    fn key_bits(self) -> u64;
}

impl Scalar for f32 {
    fn key_bits(self) -> u64 {
        // -0.0 and 0.0 denote the same state
        if self == 0.0 {
            0
        } else {
            self.to_bits() as u64
        }
    }
}

impl Scalar for f64 {
    fn key_bits(self) -> u64 {
        if self == 0.0 {
            0
        } else {
            self.to_bits()
        }
    }
}

/// True when `x` is exactly 0 or 1.
pub fn is_crisp<T: Scalar>(x: T) -> bool {
    x == T::zero() || x == T::one()
}

/// True when `x` lies in the closed unit interval.
pub fn in_unit<T: Scalar>(x: T) -> bool {
    x >= T::zero() && x <= T::one()
}

/// Pairwise (cascade) summation over a slice, fixed order.
pub fn pairwise_sum<T: Scalar>(xs: &[T]) -> T {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}
