//! Floating-point scalar abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, ToPrimitive};

/// Real scalar used for probabilities, LLRs and information measures:
/// `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant; never fails for finite input.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite constant")
    }

    #[inline]
    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("representable count")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `x * log2(x)` with the `0 log 0 = 0` convention.
#[inline]
pub(crate) fn xlog2x<F: Real>(x: F) -> F {
    if x <= F::zero() {
        F::zero()
    } else {
        x * x.log2()
    }
}
