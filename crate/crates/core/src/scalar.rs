//! Floating-point abstraction shared by the simulator.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rand::distr::uniform::SampleUniform;
use serde::de::DeserializeOwned;
use serde::Serialize;

/// A real scalar the simulator can run on. Implemented for `f32` and `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + SampleUniform
    + Sum
    + Default
    + Debug
    + Display
    + Serialize
    + DeserializeOwned
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this type.
    fn lit(v: f64) -> Self;

    /// Widens to `f64` for reporting and serialization.
    fn as_f64(self) -> f64;

    fn two() -> Self {
        Self::lit(2.0)
    }

    fn half() -> Self {
        Self::lit(0.5)
    }
}

impl Scalar for f32 {
    #[inline]
    fn lit(v: f64) -> Self {
        v as f32
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline]
    fn lit(v: f64) -> Self {
        v
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}
