use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{HomogeneousNorm, SpaceSpec};

use super::checks::symmetry_check;
use super::estimate::{check_moment_regime, estimate_values, Estimator, MomentEstimate};
use super::sampler::{sample_x, sample_y, stream_rng, StableSpec, STREAM_X, STREAM_Y};

/// Fixed number of sampling partitions; each has its own random stream.
pub const PARTITIONS: u64 = 64;

/// Inequality between `E_X = E‖X‖^p` and `E_Y = E‖Y‖^p` predicted for the
/// regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "E_X >= E_Y")]
    XAtLeastY,
    #[serde(rename = "E_X <= E_Y")]
    XAtMostY,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExperimentVerdict {
    InequalityHolds,
    InequalityViolated,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StableExperimentReport {
    pub space: SpaceSpec<f64>,
    pub spec: StableSpec,
    pub p_signed: f64,
    pub n_samples: usize,
    pub seed: u64,
    pub partitions: u64,
    pub e_x: MomentEstimate,
    pub e_y: MomentEstimate,
    pub expected: Direction,
    pub verdict: ExperimentVerdict,
}

/// Negative exponents: decoupling lowers `E‖·‖^{-p}` for spaces embedding in
/// `L_{-p}`. Positive `p ≤ q`: decoupling maximizes `E‖·‖^p` on subspaces of
/// `L_p`. Gaussian vectors with `p > 2`: decoupling minimizes it.
pub fn expected_direction(q: f64, p_signed: f64) -> Result<Direction> {
    if p_signed < 0.0 {
        Ok(Direction::XAtLeastY)
    } else if q == 2.0 && p_signed > 2.0 {
        Ok(Direction::XAtLeastY)
    } else if p_signed > 0.0 && p_signed <= q {
        Ok(Direction::XAtMostY)
    } else {
        Err(Error::MomentNonexistent { p: p_signed, q })
    }
}

/// `‖V‖^{p_signed}` for `n_samples` draws of `V = X` (`stream = 1`) or
/// `V = Y` (`stream = 2`), in partition order.
pub fn simulate_norm_powers(
    space: &SpaceSpec<f64>,
    spec: &StableSpec,
    p_signed: f64,
    n_samples: usize,
    seed: u64,
    stream: u64,
) -> Vec<f64> {
    let per = n_samples.div_ceil(PARTITIONS as usize);
    let parts: Vec<Vec<f64>> = (0..PARTITIONS)
        .into_par_iter()
        .map(|part| {
            let start = part as usize * per;
            let count = per.min(n_samples.saturating_sub(start));
            let mut rng = stream_rng(seed, stream, part);
            let mut v = vec![0.0; spec.n()];
            (0..count)
                .map(|_| {
                    if stream == STREAM_Y {
                        sample_y(spec, &mut rng, &mut v);
                    } else {
                        sample_x(spec, &mut rng, &mut v);
                    }
                    space.norm(&v).powf(p_signed)
                })
                .collect()
        })
        .collect();
    parts.concat()
}

/// Estimates `E‖X‖^p` and `E‖Y‖^p` from independent streams of one seed
/// and compares their 99% intervals with the predicted direction.
///
/// `estimator` defaults to the one [`check_moment_regime`] picks; forcing
/// the mean where the variance is infinite is rejected.
pub fn correlation_experiment(
    space: &SpaceSpec<f64>,
    spec: &StableSpec,
    p_signed: f64,
    n_samples: usize,
    seed: u64,
    estimator: Option<Estimator>,
) -> Result<StableExperimentReport> {
    space.validate()?;
    spec.validate()?;
    if space.n() != spec.n() {
        return Err(Error::invalid(format!(
            "space has dimension {}, atoms have {} rows",
            space.n(),
            spec.n()
        )));
    }
    if !symmetry_check(space, spec.k, 256, seed)? {
        return Err(Error::invalid(format!(
            "{space} is not symmetric under flipping the block after k = {}",
            spec.k
        )));
    }
    let (auto, heuristic) = check_moment_regime(spec.q, spec.support_rank(), p_signed)?;
    let estimator = match estimator {
        Some(Estimator::Mean) if heuristic => {
            return Err(Error::invalid(
                "the sample-mean interval needs finite variance here; use median_of_means",
            ))
        }
        Some(e) => e,
        None => auto,
    };
    let expected = expected_direction(spec.q, p_signed)?;
    if n_samples < 2 * PARTITIONS as usize {
        return Err(Error::invalid(format!("need at least {} samples", 2 * PARTITIONS)));
    }
    let xs = simulate_norm_powers(space, spec, p_signed, n_samples, seed, STREAM_X);
    let ys = simulate_norm_powers(space, spec, p_signed, n_samples, seed, STREAM_Y);
    let e_x = estimate_values(&xs, estimator)?;
    let e_y = estimate_values(&ys, estimator)?;
    let verdict = compare(&e_x, &e_y, expected);
    Ok(StableExperimentReport {
        space: space.clone(),
        spec: spec.clone(),
        p_signed,
        n_samples,
        seed,
        partitions: PARTITIONS,
        e_x,
        e_y,
        expected,
        verdict,
    })
}

fn compare(x: &MomentEstimate, y: &MomentEstimate, dir: Direction) -> ExperimentVerdict {
    let (big, small) = match dir {
        Direction::XAtLeastY => (x, y),
        Direction::XAtMostY => (y, x),
    };
    if big.value - big.ci_half_width > small.value + small.ci_half_width {
        ExperimentVerdict::InequalityHolds
    } else if big.value + big.ci_half_width < small.value - small.ci_half_width {
        ExperimentVerdict::InequalityViolated
    } else {
        ExperimentVerdict::Inconclusive
    }
}
