//! One-dimensional quadrature: adaptive Gauss–Kronrod for general panels and
//! tanh-sinh for integrands with algebraic endpoint singularities.

mod gauss_kronrod;
mod tanh_sinh;

pub use gauss_kronrod::{integrate, AdaptiveOpts};
pub use tanh_sinh::tanh_sinh;

use crate::scalar::Real;

/// Result of a quadrature: value, committed error bound, and the integral of
/// `|f|` (used to propagate relative errors of the integrand).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub err: T,
    pub abs_value: T,
    pub evals: usize,
}

impl<T: Real> Estimate<T> {
    pub fn zero() -> Self {
        Estimate {
            value: T::zero(),
            err: T::zero(),
            abs_value: T::zero(),
            evals: 0,
        }
    }

    /// Sum of two independent pieces of one integral.
    pub fn add(self, other: Self) -> Self {
        Estimate {
            value: self.value + other.value,
            err: self.err + other.err,
            abs_value: self.abs_value + other.abs_value,
            evals: self.evals + other.evals,
        }
    }

    pub fn scale(self, factor: T) -> Self {
        Estimate {
            value: self.value * factor,
            err: self.err * factor.abs(),
            abs_value: self.abs_value * factor.abs(),
            evals: self.evals,
        }
    }
}
