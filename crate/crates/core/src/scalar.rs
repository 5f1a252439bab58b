//! Coefficient-ring abstractions shared by the generic containers
//! ([`crate::linalg::Matrix`], [`crate::series::PowerSeries`]).
//!
//! The traits sit on top of `num-traits` so that exact types
//! ([`crate::Rational`], [`crate::CycloNum`], [`crate::RadicalCoeff`]) and
//! machine floats plug into the same code.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, ToPrimitive, Zero};

use crate::Rational;

/// A commutative ring containing the rationals.
pub trait Ring:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_rational(q: &Rational) -> Self;

    fn scale(&self, q: &Rational) -> Self {
        self.clone() * Self::from_rational(q)
    }

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n.into()))
    }
}

/// A ring in which nonzero elements are (at least sometimes) invertible.
///
/// `try_inv` returns `None` for zero, and for rings that are not fields it
/// may also return `None` for nonzero non-units.
pub trait Field: Ring {
    fn try_inv(&self) -> Option<Self>;
}

impl Ring for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn scale(&self, q: &Rational) -> Self {
        self * q
    }
}

impl Field for Rational {
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

impl Ring for f64 {
    fn from_rational(q: &Rational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
}

impl Field for f64 {
    fn try_inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
}

impl Ring for f32 {
    fn from_rational(q: &Rational) -> Self {
        q.to_f32().unwrap_or(f32::NAN)
    }
}

impl Field for f32 {
    fn try_inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
}
