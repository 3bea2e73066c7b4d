use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::HomogeneousNorm;

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Mean,
    MedianOfMeans,
}

/// Estimate of `E‖·‖^p` with a 99% confidence half-width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub ci_half_width: f64,
    pub estimator: Estimator,
    /// Blocks used by the median-of-means estimator (0 for the mean).
    pub blocks: usize,
    pub n_samples: usize,
    /// The interval is not backed by a CLT (infinite variance regime).
    pub heuristic_ci: bool,
    pub ci_method: String,
}

const MOM_BLOCKS: usize = 64;

/// Checks that `E‖X‖^{p_signed}` exists for a `q`-stable vector whose law
/// has a density on an `n`-dimensional subspace, and returns the estimator whose interval is honest there, with the flag
/// marking a heuristic interval.
///
/// Negative exponents need `|p| < n`; the variance is finite only for
/// `2|p| < n`. Positive exponents need `p < q` unless `q = 2`; for `q < 2`
/// the variance is finite only for `2p < q`.
pub fn check_moment_regime(q: f64, n: usize, p_signed: f64) -> Result<(Estimator, bool)> {
    if !p_signed.is_finite() || p_signed == 0.0 {
        return Err(Error::invalid(format!("exponent must be finite and nonzero, got {p_signed}")));
    }
    let nf = n as f64;
    if p_signed < 0.0 {
        let p = -p_signed;
        if p >= nf {
            return Err(Error::domain(format!(
                "E||X||^-{p} diverges: ||x||^-p is not locally integrable for p >= {n}, the dimension of the support"
            )));
        }
        return Ok(if 2.0 * p < nf {
            (Estimator::Mean, false)
        } else {
            (Estimator::MedianOfMeans, true)
        });
    }
    if q < 2.0 {
        if p_signed >= q {
            return Err(Error::MomentNonexistent { p: p_signed, q });
        }
        if 2.0 * p_signed >= q {
            return Ok((Estimator::MedianOfMeans, true));
        }
    }
    Ok((Estimator::Mean, false))
}

/// Estimates `E‖x‖^{p_signed}` over the given samples.
///
/// `Mean`: sample mean with the interval `z·sd/√N`. `MedianOfMeans`:
/// median of 64 contiguous block means with `z·√(π/2)·sd_B/√64`, where
/// `sd_B` is the spread of the block means; flagged heuristic.
pub fn expectation_norm_power<N, I>(norm: &N, p_signed: f64, samples: I, estimator: Estimator) -> Result<MomentEstimate>
where
    N: HomogeneousNorm<f64> + ?Sized,
    I: IntoIterator,
    I::Item: AsRef<[f64]>,
{
    if !p_signed.is_finite() {
        return Err(Error::invalid("exponent must be finite"));
    }
    let values: Vec<f64> = samples
        .into_iter()
        .map(|x| {
            let x = x.as_ref();
            if x.len() != norm.dim() {
                return Err(Error::invalid(format!(
                    "sample has {} coordinates, space has {}",
                    x.len(),
                    norm.dim()
                )));
            }
            Ok(norm.norm(x).powf(p_signed))
        })
        .collect::<Result<_>>()?;
    estimate_values(&values, estimator)
}

pub(crate) fn estimate_values(values: &[f64], estimator: Estimator) -> Result<MomentEstimate> {
    let n = values.len();
    if n < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    match estimator {
        Estimator::Mean => {
            let (mean, m2) = welford(values);
            let sd = (m2 / (n - 1) as f64).sqrt();
            Ok(MomentEstimate {
                value: mean,
                ci_half_width: Z99 * sd / (n as f64).sqrt(),
                estimator,
                blocks: 0,
                n_samples: n,
                heuristic_ci: false,
                ci_method: "normal approximation, 99%: z*sd/sqrt(N)".into(),
            })
        }
        Estimator::MedianOfMeans => {
            if n < MOM_BLOCKS * 2 {
                return Err(Error::invalid(format!("median of means needs at least {} samples", MOM_BLOCKS * 2)));
            }
            let size = n / MOM_BLOCKS;
            let mut means: Vec<f64> = (0..MOM_BLOCKS)
                .map(|b| {
                    let end = if b + 1 == MOM_BLOCKS { n } else { (b + 1) * size };
                    welford(&values[b * size..end]).0
                })
                .collect();
            let (_, m2) = welford(&means);
            let sd = (m2 / (MOM_BLOCKS - 1) as f64).sqrt();
            means.sort_by(f64::total_cmp);
            let median = 0.5 * (means[MOM_BLOCKS / 2 - 1] + means[MOM_BLOCKS / 2]);
            Ok(MomentEstimate {
                value: median,
                ci_half_width: Z99 * (std::f64::consts::FRAC_PI_2).sqrt() * sd / (MOM_BLOCKS as f64).sqrt(),
                estimator,
                blocks: MOM_BLOCKS,
                n_samples: n,
                heuristic_ci: true,
                ci_method: "median of 64 block means, 99%: z*sqrt(pi/2)*sd_blocks/sqrt(64) (heuristic)".into(),
            })
        }
    }
}

/// Running mean and sum of squared deviations.
fn welford(values: &[f64]) -> (f64, f64) {
    let (mut mean, mut m2) = (0.0, 0.0);
    for (i, &v) in values.iter().enumerate() {
        let d = v - mean;
        mean += d / (i + 1) as f64;
        m2 += d * (v - mean);
    }
    (mean, m2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SpaceSpec;

    #[test]
    fn constant_stream_is_exact() {
        let l2 = SpaceSpec::lq(2.0, 3).unwrap();
        let v = [0.3, -1.2, 2.0];
        let e = expectation_norm_power(&l2, -1.3, std::iter::repeat_n(v, 1000), Estimator::Mean).unwrap();
        assert_eq!(e.value, l2.norm(&v).powf(-1.3));
        assert_eq!(e.ci_half_width, 0.0);
        let e = expectation_norm_power(&l2, 0.7, std::iter::repeat_n(v, 1000), Estimator::MedianOfMeans).unwrap();
        assert_eq!(e.value, l2.norm(&v).powf(0.7));
        assert_eq!(e.ci_half_width, 0.0);
    }

    #[test]
    fn regimes() {
        assert_eq!(check_moment_regime(2.0, 3, -1.0).unwrap(), (Estimator::Mean, false));
        assert_eq!(check_moment_regime(1.5, 4, -2.5).unwrap(), (Estimator::MedianOfMeans, true));
        assert!(matches!(check_moment_regime(1.0, 3, 1.5), Err(Error::MomentNonexistent { .. })));
        assert!(check_moment_regime(2.0, 3, -3.0).is_err());
        assert_eq!(check_moment_regime(2.0, 3, 3.0).unwrap(), (Estimator::Mean, false));
        assert_eq!(check_moment_regime(1.5, 3, 1.0).unwrap(), (Estimator::MedianOfMeans, true));
    }
}
