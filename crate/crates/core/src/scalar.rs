//! Scalar abstraction shared by the closed-form modules.

use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point type the closed-form kernels are written against.
///
/// Implemented for `f32` and `f64`. The brute-force oracles in [`crate::oracle`]
/// work in `f64` only.
pub trait Real:
    'static + Send + Sync + Float + FloatConst + FromPrimitive + NumAssign + Default + Debug + Display + LowerExp
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    /// Converts an index or count.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}
