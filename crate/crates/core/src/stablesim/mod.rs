//! Symmetric `q`-stable vectors with a finite spectral measure, and the
//! correlation experiments comparing a vector `X` with its block-decoupled
//! copy `Y`.

mod checks;
mod estimate;
mod experiment;
mod sampler;

pub use checks::{clarkson_check, symmetry_check, ClarksonResult};
pub use estimate::{check_moment_regime, expectation_norm_power, Estimator, MomentEstimate, Z99};
pub use experiment::{
    correlation_experiment, expected_direction, simulate_norm_powers, Direction, ExperimentVerdict,
    StableExperimentReport,
    PARTITIONS,
};
pub use sampler::{sample_standard_stable, sample_x, sample_y, stream_rng, StableSpec, STREAM_X, STREAM_Y};
