//! Scalar abstraction so that all numerics work for both `f32` and `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating-point scalar used throughout the crate.
///
/// Implemented by `f32` and `f64`. The only addition over the `num-traits`
/// building blocks is [`Real::lit`], which converts an `f64` literal to `T`
/// so generic code can spell constants naturally.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal into `T` (panics only if `T` cannot
    /// represent any nearby value, which never happens for `f32`/`f64`).
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in scalar type")
    }
}

impl<T> Real for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + Sum
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}
