//! Scalar abstractions shared by the polynomial and matrix code.
//!
//! Everything above this module is written against [`Ring`] so the same
//! determinant and evaluation routines serve machine integers, big integers,
//! rationals, floats, complex samples and integer polynomials alike.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// A commutative ring with identity.
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
{
}

impl<T> Ring for T where
    T: Clone
        + Debug
        + PartialEq
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// Division that is only ever called when the quotient is known to exist,
/// as in fraction-free elimination. Implementations may panic otherwise.
pub trait ExactDiv: Sized {
    fn div_exact(&self, divisor: &Self) -> Self;
}

impl ExactDiv for BigInt {
    fn div_exact(&self, divisor: &Self) -> Self {
        let (q, r) = self.div_rem(divisor);
        assert!(r.is_zero(), "inexact integer division {self} / {divisor}");
        q
    }
}

macro_rules! exact_div_int {
    ($($t:ty),*) => {$(
        impl ExactDiv for $t {
            fn div_exact(&self, divisor: &Self) -> Self {
                assert!(self % divisor == 0, "inexact integer division {} / {}", self, divisor);
                self / divisor
            }
        }
    )*};
}
exact_div_int!(i64, i128);

impl ExactDiv for BigRational {
    fn div_exact(&self, divisor: &Self) -> Self {
        self / divisor
    }
}

impl ExactDiv for f64 {
    fn div_exact(&self, divisor: &Self) -> Self {
        self / divisor
    }
}

impl ExactDiv for f32 {
    fn div_exact(&self, divisor: &Self) -> Self {
        self / divisor
    }
}

/// Scalars that integer coefficients can be embedded into.
pub trait FromInteger: Ring {
    fn from_integer(n: &BigInt) -> Self;
}

impl FromInteger for BigInt {
    fn from_integer(n: &BigInt) -> Self {
        n.clone()
    }
}

impl FromInteger for BigRational {
    fn from_integer(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
}

impl FromInteger for f64 {
    fn from_integer(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(f64::NAN)
    }
}

impl FromInteger for f32 {
    fn from_integer(n: &BigInt) -> Self {
        n.to_f32().unwrap_or(f32::NAN)
    }
}

impl FromInteger for i64 {
    fn from_integer(n: &BigInt) -> Self {
        n.to_i64().expect("coefficient does not fit in i64")
    }
}

impl<F: FromInteger + num_traits::Float> FromInteger for Complex<F> {
    fn from_integer(n: &BigInt) -> Self {
        Complex::new(F::from_integer(n), F::zero())
    }
}
