//! Scalar abstraction shared by the linear-algebra layer.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point field used for amplitudes and matrix entries (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal is representable")
    }

    /// Converts a count into this scalar.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count is representable")
    }

    /// Tolerance for unit-norm checks, never tighter than a few hundred ulps.
    fn norm_tolerance() -> Self {
        Self::lit(1e-12).max(Self::epsilon() * Self::lit(256.0))
    }

    /// Default comparison tolerance.
    fn default_tolerance() -> Self {
        Self::lit(1e-10).max(Self::epsilon() * Self::lit(1024.0))
    }
}

impl Real for f32 {}
impl Real for f64 {}
