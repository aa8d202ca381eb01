use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_traits::{PrimInt, Signed};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// Signed machine integers usable as monomial exponents and weight coordinates.
///
/// All arithmetic on exponents goes through the checked helpers below, so an
/// overflow surfaces as [`Error::Overflow`] instead of wrapping.
pub trait Exponent:
    PrimInt
    + Signed
    + Hash
    + Debug
    + Display
    + FromStr
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
}

impl<T> Exponent for T where
    T: PrimInt
    + Signed
    + Hash
    + Debug
    + Display
    + FromStr
    + Default
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
}

#[inline]
pub(crate) fn add<E: Exponent>(a: E, b: E) -> Result<E> {
    a.checked_add(&b).ok_or(Error::Overflow)
}

#[inline]
pub(crate) fn sub<E: Exponent>(a: E, b: E) -> Result<E> {
    a.checked_sub(&b).ok_or(Error::Overflow)
}

#[inline]
pub(crate) fn mul<E: Exponent>(a: E, b: E) -> Result<E> {
    a.checked_mul(&b).ok_or(Error::Overflow)
}

#[inline]
pub(crate) fn neg<E: Exponent>(a: E) -> Result<E> {
    E::zero().checked_sub(&a).ok_or(Error::Overflow)
}

/// Converts a small structural integer (Cartan entry, scaling factor, ...)
/// into the exponent type.
#[inline]
pub(crate) fn cast<E: Exponent>(x: i64) -> Result<E> {
    E::from(x).ok_or(Error::Overflow)
}
