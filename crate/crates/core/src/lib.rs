//! Fourier transforms of negative powers of finite-dimensional norms,
//! embedding checks for `L_{-p}`, and correlation experiments with
//! q-stable random vectors.
//!
//! The numeric kernels are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar for the common cases.

pub mod acceptance;
pub mod config;
pub mod embedcheck;
pub mod error;
pub mod negft;
pub mod quad;
pub mod scalar;
pub mod space;
pub mod specfun;
pub mod stablesim;

pub use config::{QuadratureConfig, TailPolicy};
pub use error::{Error, Result};
pub use negft::{Method, TransformValue};
pub use scalar::Real;
pub use space::{HomogeneousNorm, SpaceSpec};

pub type TransformValue64 = TransformValue<f64>;
pub type TransformValue32 = TransformValue<f32>;
pub type SpaceSpec64 = SpaceSpec<f64>;
pub type SpaceSpec32 = SpaceSpec<f32>;
pub type LqEvaluator64 = negft::LqEvaluator<f64>;
pub type GammaQTable64 = negft::GammaQTable<f64>;
