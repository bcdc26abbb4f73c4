//! Numeric traits shared by the scoring and alignment code.
//!
//! Alignment only needs ordered ring arithmetic, so it runs on exact
//! rationals as well as floats. Everything that takes logarithms or
//! sigmoids needs [`Real`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Ordered ring scalar: enough for dynamic-programming maximisation.
pub trait Score: Num + Copy + PartialOrd + Debug + Send + Sync + 'static {}

impl<T> Score for T where T: Num + Copy + PartialOrd + Debug + Send + Sync + 'static {}

/// Floating point scalar (`f32` or `f64`).
pub trait Real: Score + Float + FromPrimitive + ToPrimitive + Display + Sum + Default {
    /// Lossy conversion from `f64`; every finite `f64` maps to a finite or
    /// infinite value of `Self`.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(Self::nan)
    }

    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(Self::infinity)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Logistic function, clamped to the open interval (0, 1).
pub fn sigmoid<F: Real>(z: F) -> F {
    let one = F::one();
    let s = if z >= F::zero() {
        one / (one + (-z).exp())
    } else {
        let e = z.exp();
        e / (one + e)
    };
    s.max(F::min_positive_value()).min(one - F::epsilon())
}
