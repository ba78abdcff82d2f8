//! The exact integer scalar behind every count.
//!
//! Counting routines are generic over [`ExactScalar`], which is satisfied by
//! `BigUint` (the default, see [`crate::ExactCount`]) as well as the fixed
//! width unsigned integers. Fixed widths report [`Error::Overflow`] instead of
//! wrapping.

use std::fmt;

use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub trait ExactScalar:
    Clone
    + Ord
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + CheckedAdd
    + CheckedSub
    + CheckedMul
    + FromPrimitive
    + ToPrimitive
{
}

impl<T> ExactScalar for T where
    T: Clone
        + Ord
        + fmt::Debug
        + fmt::Display
        + Zero
        + One
        + CheckedAdd
        + CheckedSub
        + CheckedMul
        + FromPrimitive
        + ToPrimitive
{
}

pub(crate) fn lift<T: ExactScalar>(v: u64) -> Result<T> {
    T::from_u64(v).ok_or(Error::Overflow)
}

pub(crate) fn add<T: ExactScalar>(a: &T, b: &T) -> Result<T> {
    a.checked_add(b).ok_or(Error::Overflow)
}

pub(crate) fn sub<T: ExactScalar>(a: &T, b: &T) -> Result<T> {
    a.checked_sub(b).ok_or(Error::Overflow)
}

pub(crate) fn mul<T: ExactScalar>(a: &T, b: &T) -> Result<T> {
    a.checked_mul(b).ok_or(Error::Overflow)
}

/// `base^exp` with a negative exponent rejected by the caller.
pub(crate) fn pow<T: ExactScalar>(base: u64, exp: u64) -> Result<T> {
    let base: T = lift(base)?;
    let mut acc = T::one();
    for _ in 0..exp {
        acc = mul(&acc, &base)?;
    }
    Ok(acc)
}

pub(crate) fn sum<T: ExactScalar>(terms: impl IntoIterator<Item = Result<T>>) -> Result<T> {
    let mut acc = T::zero();
    for term in terms {
        acc = add(&acc, &term?)?;
    }
    Ok(acc)
}

/// Converts a count to `usize` if it fits.
pub fn to_usize<T: ExactScalar>(v: &T) -> Option<usize> {
    v.to_usize()
}
