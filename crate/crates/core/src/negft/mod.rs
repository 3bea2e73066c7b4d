//! Fourier transforms of `‖x‖^{-p}` on homogeneous spaces.
//!
//! Convention: `f̂(ξ) = ∫ f(x) e^{-i(x,ξ)} dx`. The transform of a degree
//! `-p` function is homogeneous of degree `p - n`, and the space embeds in
//! `L_{-p}` exactly when it is a nonnegative distribution away from 0.
//!
//! Routes:
//! - [`ft_linf_closed`]: closed form for the max-norm through the sign sums
//!   [`h_np`]/[`g_np`];
//! - [`ft_linf_quadrature`]: one-dimensional oscillatory integral for the
//!   max-norm, valid at integer `p`;
//! - [`ft_lq_quadrature`] / [`LqEvaluator`]: one-dimensional integral of a
//!   product of `γ_q` factors;
//! - [`ft_lq_via_linf`]: Monte Carlo average of max-norm transforms;
//! - [`ft_sphere`]: sphere integral for any norm when `p ∈ [n-1, n)`.

mod linf;
mod lq;
mod recurrence;
mod signsum;
mod sphere;

pub use linf::{ft_linf_closed, ft_linf_quadrature};
pub use lq::{ft_lq_quadrature, ft_lq_via_linf, GammaQTable, LqEvaluator};
pub use recurrence::{u_recurrence_check, u_recurrence_residual, RecurrenceCheck};
pub use signsum::{g_np, h_np, u_np};
pub use sphere::ft_sphere;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which evaluator produced a [`TransformValue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Closed,
    QuadLinf,
    QuadLq,
    LqViaLinf,
    Sphere,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Closed => "closed",
            Method::QuadLinf => "quad_linf",
            Method::QuadLq => "quad_lq",
            Method::LqViaLinf => "lq_via_linf",
            Method::Sphere => "sphere",
        }
    }
}

/// Value of `(‖x‖^{-p})^∧(ξ)` with the error bound the evaluator commits to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformValue<T> {
    pub value: T,
    pub err_estimate: T,
    pub method: Method,
    /// False when a sampling route stopped short of its relative tolerance;
    /// the value and error bar are still usable.
    pub converged: bool,
}

impl<T: Real> TransformValue<T> {
    pub(crate) fn new(value: T, err_estimate: T, method: Method) -> Self {
        TransformValue {
            value,
            err_estimate,
            method,
            converged: true,
        }
    }

    /// True when the two values agree within the sum of their error bounds.
    pub fn agrees_with(&self, other: &Self) -> bool {
        (self.value - other.value).abs() <= self.err_estimate + other.err_estimate
    }
}

/// Largest dimension accepted by the pointwise evaluators (the sign sums
/// have `2^n` terms).
pub const MAX_DIM: usize = 24;

pub(crate) fn check_xi<T: Real>(xi: &[T]) -> Result<()> {
    if xi.is_empty() {
        return Err(Error::invalid("xi must have at least one coordinate"));
    }
    if xi.len() > MAX_DIM {
        return Err(Error::invalid(format!(
            "dimension {} exceeds the supported maximum {MAX_DIM}",
            xi.len()
        )));
    }
    if let Some(x) = xi.iter().find(|x| !x.is_finite() || **x == T::zero()) {
        return Err(Error::domain(format!("xi coordinates must be finite and nonzero, got {x}")));
    }
    Ok(())
}

pub(crate) fn check_p_range<T: Real>(p: T, n: usize) -> Result<()> {
    if !(p > T::zero() && p < T::from_count(n)) {
        return Err(Error::domain(format!("p = {p} must lie in (0, {n})")));
    }
    Ok(())
}
