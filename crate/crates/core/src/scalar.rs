//! Scalar abstraction shared by the numeric kernels.
//!
//! Everything below the experiment layer is written against [`Real`] so the
//! same code runs in `f32` for quick sweeps and `f64` for the reference
//! numbers. The experiment and CLI layers fix `T = f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar used by the numeric kernels: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts a count into the scalar type.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Returns true when `x` lies within `tol` of an integer.
pub fn near_integer<T: Real>(x: T, tol: T) -> bool {
    (x - x.round()).abs() <= tol
}

/// Neumaier-compensated sum of the terms, after ordering them by decreasing
/// magnitude.
pub fn compensated_sum<T: Real>(terms: &mut [T]) -> T {
    terms.sort_by(|a, b| {
        b.abs()
            .partial_cmp(&a.abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut sum = T::zero();
    let mut comp = T::zero();
    for &t in terms.iter() {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp = comp + ((sum - s) + t);
        } else {
            comp = comp + ((t - s) + sum);
        }
        sum = s;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_residue() {
        let mut v = vec![1e16_f64, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(&mut v), 2.0);
    }

    #[test]
    fn near_integer_detects() {
        assert!(near_integer(2.0000000001_f64, 1e-9));
        assert!(!near_integer(2.1_f64, 1e-9));
    }
}
