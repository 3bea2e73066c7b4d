use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::AdaptiveOpts;
use crate::scalar::Real;

/// How the far tail of a power-decaying or exponentially decaying integrand
/// is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailPolicy {
    PowerBound,
    Exponential,
}

/// Tolerances and limits shared by every quadrature-based evaluator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
    /// `None` lets the evaluator pick per integrand.
    pub tail_policy: Option<TailPolicy>,
    /// Draws used by the Monte Carlo route of the ℓ_q transform.
    pub mc_samples: usize,
    pub mc_seed: u64,
    /// Relative standard error below which a Monte Carlo value counts as
    /// converged.
    pub mc_rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_panels: 200_000,
            tail_policy: None,
            mc_samples: 1_000_000,
            mc_seed: 0x5eed,
            mc_rel_tol: 1e-2,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::invalid("tolerances must be positive"));
        }
        if !(self.mc_rel_tol > 0.0) {
            return Err(Error::invalid("mc_rel_tol must be positive"));
        }
        if self.max_panels < 16 {
            return Err(Error::invalid("max_panels must be at least 16"));
        }
        Ok(())
    }

    /// Same config with both tolerances divided by `factor`.
    pub fn tightened(&self, factor: f64) -> Self {
        QuadratureConfig {
            rel_tol: self.rel_tol / factor,
            abs_tol: self.abs_tol / factor,
            ..self.clone()
        }
    }

    pub(crate) fn opts<T: Real>(&self) -> AdaptiveOpts<T> {
        AdaptiveOpts::new(T::lit(self.abs_tol), T::lit(self.rel_tol), self.max_panels)
    }
}
