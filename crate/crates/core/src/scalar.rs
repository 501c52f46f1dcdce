//! Scalar abstraction shared by the geometric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating point scalar the curve geometry is generic over: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Lossy conversion from an integer.
    fn of_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative tolerance scaled to the precision of the type, floored at `floor`.
    fn tol(floor: f64) -> Self {
        let eps = Self::epsilon().to_f64_lossy();
        Self::lit(floor.max(64.0 * eps))
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `x` reduced into `(-pi, pi]`.
pub(crate) fn wrap_pi<T: Real>(x: T) -> T {
    let two_pi = T::TAU();
    let mut r = x - two_pi * (x / two_pi).round();
    if r <= -T::PI() {
        r += two_pi;
    } else if r > T::PI() {
        r -= two_pi;
    }
    r
}
