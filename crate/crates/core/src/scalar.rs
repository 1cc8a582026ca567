use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, NumAssign};

/// Floating-point scalar the numerical core is written against: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + NumAssign + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    fn lit(x: f64) -> Self;

    fn as_f64(self) -> f64;

    /// Tolerance for a check whose nominal `f64` threshold is `base`, widened for
    /// lower precision types.
    fn tol(base: f64) -> Self {
        let floor = Self::epsilon().as_f64() * 4096.0;
        Self::lit(base.max(floor))
    }
}

impl Real for f64 {
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}
