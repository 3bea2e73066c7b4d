use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::QuadratureConfig;
use crate::error::{Error, Result};
use crate::negft::{ft_linf_closed, ft_linf_quadrature, ft_sphere, LqEvaluator, Method, TransformValue};
use crate::scalar::near_integer;
use crate::space::SpaceSpec;

/// Outcome of a sign scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    AllNonnegative,
    SignChange,
    Inconclusive,
}

/// Sample points and noise band of a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Coordinate levels per axis; the grid holds every multiset of `n`
    /// levels.
    pub levels: usize,
    /// Additional seeded random points.
    pub samples: usize,
    pub seed: u64,
    /// Lower bound for every coordinate on the unit sphere.
    pub floor: f64,
    /// Overrides `max(1e-7, 10·median err)`.
    pub decision_tol: Option<f64>,
    pub quad: QuadratureConfig,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            levels: 6,
            samples: 64,
            seed: 7,
            floor: 1e-3,
            decision_tol: None,
            quad: QuadratureConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<f64>,
    pub value: f64,
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignScanReport {
    pub space: SpaceSpec<f64>,
    pub p: f64,
    pub method: Method,
    /// `p` is an integer: the closed forms do not apply and the verdict
    /// extends to it from neighbouring exponents by continuity.
    pub by_continuity: bool,
    pub seed: u64,
    pub n_samples: usize,
    pub grid_points: usize,
    pub random_points: usize,
    pub min_value: f64,
    pub argmin: Vec<f64>,
    pub max_value: f64,
    pub argmax: Vec<f64>,
    pub pos_witness: Option<Witness>,
    pub neg_witness: Option<Witness>,
    pub decision_tol: f64,
    pub median_err: f64,
    pub max_err: f64,
    pub verdict: Verdict,
}

/// Transform evaluator chosen for a space and exponent.
#[derive(Debug, Clone)]
pub enum PointEvaluator {
    LinfClosed,
    LinfQuad(QuadratureConfig),
    Lq(Box<LqEvaluator<f64>>),
    Sphere(SpaceSpec<f64>, QuadratureConfig),
}

impl PointEvaluator {
    /// Closed form for the max-norm at non-integer `p` (quadrature at integer
    /// `p`), the `γ_q` integral for `ℓ_q`, the sphere integral otherwise when
    /// `p ≥ n-1`.
    pub fn for_space(space: &SpaceSpec<f64>, p: f64, cfg: &QuadratureConfig) -> Result<Self> {
        space.validate()?;
        Ok(match space {
            SpaceSpec::Linf { .. } => {
                if near_integer(p, 1e-12) {
                    PointEvaluator::LinfQuad(cfg.clone())
                } else {
                    PointEvaluator::LinfClosed
                }
            }
            SpaceSpec::Lq { q, .. } => PointEvaluator::Lq(Box::new(LqEvaluator::new(*q, cfg)?)),
            SpaceSpec::Spectral { .. } => {
                let n = space.n() as f64;
                if p < n - 1.0 {
                    return Err(Error::NoEvaluator(format!(
                        "no transform formula for {space} at p = {p} < n - 1"
                    )));
                }
                PointEvaluator::Sphere(space.clone(), cfg.clone())
            }
        })
    }

    /// Re-targets the evaluator at another exponent (keeps the `γ_q` table).
    pub fn retarget(self, space: &SpaceSpec<f64>, p: f64, cfg: &QuadratureConfig) -> Result<Self> {
        match self {
            PointEvaluator::Lq(e) => Ok(PointEvaluator::Lq(e)),
            _ => PointEvaluator::for_space(space, p, cfg),
        }
    }

    pub fn method(&self) -> Method {
        match self {
            PointEvaluator::LinfClosed => Method::Closed,
            PointEvaluator::LinfQuad(_) => Method::QuadLinf,
            PointEvaluator::Lq(_) => Method::QuadLq,
            PointEvaluator::Sphere(..) => Method::Sphere,
        }
    }

    pub fn eval(&self, p: f64, xi: &[f64]) -> Result<TransformValue<f64>> {
        match self {
            PointEvaluator::LinfClosed => ft_linf_closed(p, xi),
            PointEvaluator::LinfQuad(cfg) => ft_linf_quadrature(p, xi, cfg),
            PointEvaluator::Lq(e) => e.eval(p, xi),
            PointEvaluator::Sphere(space, cfg) => ft_sphere(space, p, xi, cfg),
        }
    }

    /// Like [`eval`](Self::eval), but a non-converged quadrature yields its
    /// best estimate with the achieved bound.
    fn eval_lenient(&self, p: f64, xi: &[f64]) -> Result<(f64, f64)> {
        match self.eval(p, xi) {
            Ok(v) => Ok((v.value, v.err_estimate)),
            Err(Error::NonConvergence { estimate, err_bound, .. }) => Ok((estimate, err_bound)),
            Err(e) => Err(e),
        }
    }
}

/// Scan points on `{ξ : ‖ξ‖_2 = 1, ξ_k ≥ floor}`: every multiset of `n`
/// log-spaced levels, then `samples` log-uniform random points. The
/// transforms are even in each coordinate and symmetric under permutations
/// for `ℓ_q` spaces, so the sorted positive orthant is representative.
pub fn scan_points(n: usize, cfg: &ScanConfig) -> (Vec<Vec<f64>>, usize) {
    let lo = cfg.floor * (n as f64).sqrt();
    let levels = cfg.levels.max(1);
    let level = |j: usize| {
        if levels == 1 {
            1.0
        } else {
            (lo.ln() * (1.0 - j as f64 / (levels - 1) as f64)).exp()
        }
    };
    let mut points = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        points.push(normalized(idx.iter().map(|&j| level(j)).collect()));
        // Next nondecreasing index tuple.
        let mut pos = n;
        while pos > 0 && idx[pos - 1] == levels - 1 {
            pos -= 1;
        }
        if pos == 0 {
            break;
        }
        let v = idx[pos - 1] + 1;
        for x in idx[pos - 1..].iter_mut() {
            *x = v;
        }
    }
    let grid = points.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.samples {
        let v: Vec<f64> = (0..n).map(|_| (lo.ln() * rng.random::<f64>()).exp()).collect();
        points.push(normalized(v));
    }
    (points, grid)
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= r;
    }
    v
}

/// Evaluates the transform of `‖x‖^{-p}` on the scan points and classifies
/// its sign.
pub fn sign_scan(space: &SpaceSpec<f64>, p: f64, cfg: &ScanConfig) -> Result<SignScanReport> {
    let eval = PointEvaluator::for_space(space, p, &cfg.quad)?;
    sign_scan_with(&eval, space, p, cfg)
}

/// [`sign_scan`] with a prepared evaluator.
pub fn sign_scan_with(
    eval: &PointEvaluator,
    space: &SpaceSpec<f64>,
    p: f64,
    cfg: &ScanConfig,
) -> Result<SignScanReport> {
    let n = space.n();
    if !(p > 0.0 && p < n as f64) {
        return Err(Error::domain(format!("p = {p} must lie in (0, {n})")));
    }
    if !(cfg.floor > 0.0 && cfg.floor * (n as f64).sqrt() < 1.0) {
        return Err(Error::invalid(format!("coordinate floor {} out of range", cfg.floor)));
    }
    let (points, grid) = scan_points(n, cfg);
    let values: Vec<Result<(f64, f64)>> = points.par_iter().map(|x| eval.eval_lenient(p, x)).collect();
    let values: Vec<(f64, f64)> = values.into_iter().collect::<Result<_>>()?;

    let mut errs: Vec<f64> = values.iter().map(|v| v.1).collect();
    errs.sort_by(f64::total_cmp);
    let median_err = errs[errs.len() / 2];
    let max_err = errs[errs.len() - 1];
    let decision_tol = cfg.decision_tol.unwrap_or((10.0 * median_err).max(1e-7));

    let mut imin = 0;
    let mut imax = 0;
    let mut ipos = 0;
    let mut ineg = 0;
    for (i, &(v, e)) in values.iter().enumerate() {
        if v < values[imin].0 {
            imin = i;
        }
        if v > values[imax].0 {
            imax = i;
        }
        if v - e > values[ipos].0 - values[ipos].1 {
            ipos = i;
        }
        if v + e < values[ineg].0 + values[ineg].1 {
            ineg = i;
        }
    }
    let witness = |i: usize| Witness {
        point: points[i].clone(),
        value: values[i].0,
        err: values[i].1,
    };
    let pos_witness = (values[ipos].0 > decision_tol + values[ipos].1).then(|| witness(ipos));
    let neg_witness = (values[ineg].0 < -(decision_tol + values[ineg].1)).then(|| witness(ineg));
    let min_value = values[imin].0;
    let verdict = if pos_witness.is_some() && neg_witness.is_some() {
        Verdict::SignChange
    } else if min_value >= -(decision_tol + max_err) {
        Verdict::AllNonnegative
    } else {
        Verdict::Inconclusive
    };
    Ok(SignScanReport {
        space: space.clone(),
        p,
        method: eval.method(),
        by_continuity: near_integer(p, 1e-12),
        seed: cfg.seed,
        n_samples: points.len(),
        grid_points: grid,
        random_points: points.len() - grid,
        min_value,
        argmin: points[imin].clone(),
        max_value: values[imax].0,
        argmax: points[imax].clone(),
        pos_witness,
        neg_witness,
        decision_tol,
        median_err,
        max_err,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_size_and_normalization() {
        let cfg = ScanConfig {
            levels: 4,
            samples: 5,
            ..ScanConfig::default()
        };
        let (pts, grid) = scan_points(3, &cfg);
        assert_eq!(grid, 20);
        assert_eq!(pts.len(), 25);
        for x in &pts {
            let r: f64 = x.iter().map(|v| v * v).sum();
            assert!((r - 1.0).abs() < 1e-12);
            assert!(x.iter().all(|&v| v >= 1e-3 * (1.0 - 1e-12)));
        }
    }

    #[test]
    fn max_norm_examples() {
        let cfg = ScanConfig::default();
        let l4 = SpaceSpec::Linf { n: 4 };
        let r = sign_scan(&l4, 0.5, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::SignChange, "{r:?}");
        let r = sign_scan(&l4, 2.5, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::AllNonnegative, "{r:?}");
    }

    #[test]
    fn deterministic() {
        let cfg = ScanConfig::default();
        let l4 = SpaceSpec::Linf { n: 4 };
        assert_eq!(sign_scan(&l4, 0.7, &cfg).unwrap(), sign_scan(&l4, 0.7, &cfg).unwrap());
    }

    #[test]
    fn spectral_needs_high_exponent() {
        let s = SpaceSpec::spectral(vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]], 1.0).unwrap();
        assert!(matches!(sign_scan(&s, 0.5, &ScanConfig::default()), Err(Error::NoEvaluator(_))));
    }
}
