//! The acceptance suite: one check per published property of the library,
//! shared by the `acceptance` test target and `lpneg selftest`.
//!
//! Results are pure functions of the options (fixed seeds, order-stable
//! parallel reductions); elapsed times are kept out of the comparable part.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::QuadratureConfig;
use crate::embedcheck::{critical_exponent, sign_change_certificate, sign_scan, ScanConfig, Verdict};
use crate::error::Result;
use crate::negft::{
    ft_linf_closed, ft_linf_quadrature, ft_lq_via_linf, ft_sphere, u_np, LqEvaluator, TransformValue,
};
use crate::space::SpaceSpec;
use crate::specfun::{gamma, gamma_q, stable_moment};
use crate::stablesim::{
    clarkson_check, correlation_experiment, sample_standard_stable, stream_rng, ExperimentVerdict, StableSpec,
};

/// Deliberate defects for checking that the suite notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// Gamma values seen by the suite are off by one part in 10^6.
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SuiteOptions {
    /// Reduced sample sizes and case counts.
    pub quick: bool,
    pub fault: Option<Fault>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Wall time; excluded from comparisons and from serialized output.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl PartialEq for CriterionResult {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.name == other.name && self.passed == other.passed && self.detail == other.detail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub mode: String,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn failed(&self) -> Vec<&CriterionResult> {
        self.criteria.iter().filter(|c| !c.passed).collect()
    }
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn(&SuiteOptions) -> Result<(bool, String)>,
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "special-function oracles", budget: secs(5), run: c1_special },
        Criterion { id: 2, name: "closed form vs oscillatory quadrature", budget: secs(120), run: c2_cross },
        Criterion { id: 3, name: "Riesz kernel from the gamma_2 integral", budget: secs(60), run: c3_riesz },
        Criterion { id: 4, name: "l_q transform: Monte Carlo vs quadrature", budget: secs(120), run: c4_monte_carlo },
        Criterion { id: 5, name: "sign tables and sign-change witnesses", budget: secs(60), run: c5_signs },
        Criterion { id: 6, name: "critical exponents n-3", budget: secs(600), run: c6_critical },
        Criterion { id: 7, name: "sphere route nonnegativity", budget: secs(120), run: c7_sphere },
        Criterion { id: 8, name: "moment-product certificates", budget: secs(1), run: c8_certificate },
        Criterion { id: 9, name: "stable sampler characteristic function", budget: secs(60), run: c9_sampler },
        Criterion { id: 10, name: "negative moments: E_X >= E_Y", budget: secs(300), run: c10_negative_moments },
        Criterion { id: 11, name: "positive moments: both directions", budget: secs(180), run: c11_positive_moments },
        Criterion { id: 12, name: "Clarkson-type inequalities", budget: secs(10), run: c12_clarkson },
    ]
}

/// Criteria 1-12.
pub fn run_criteria(opts: &SuiteOptions) -> Vec<CriterionResult> {
    criteria().iter().map(|c| run_one(c, opts)).collect()
}

fn run_one(c: &Criterion, opts: &SuiteOptions) -> CriterionResult {
    let start = Instant::now();
    let outcome = (c.run)(opts);
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match outcome {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    if elapsed > c.budget {
        passed = false;
        detail.push_str(&format!("; over the {} s budget", c.budget.as_secs()));
    }
    CriterionResult {
        id: c.id,
        name: c.name.to_string(),
        passed,
        detail,
        elapsed,
    }
}

/// Criterion 13: two quick runs give identical results. `previous` is a
/// quick run already made by the caller, if any.
pub fn determinism(previous: Option<&[CriterionResult]>, fault: Option<Fault>) -> CriterionResult {
    let start = Instant::now();
    let quick = SuiteOptions { quick: true, fault };
    let first = match previous {
        Some(p) => p.to_vec(),
        None => run_criteria(&quick),
    };
    let second = run_criteria(&quick);
    let same = first == second;
    CriterionResult {
        id: 13,
        name: "deterministic quick summaries".into(),
        passed: same,
        detail: if same {
            format!("{} criteria identical across two quick runs", first.len())
        } else {
            "quick runs differ".into()
        },
        elapsed: start.elapsed(),
    }
}

/// Runs the whole suite: criteria 1-12 in the requested mode, then the
/// determinism check.
pub fn run_suite(opts: &SuiteOptions) -> SuiteReport {
    let mut results = run_criteria(opts);
    let det = if opts.quick {
        determinism(Some(&results), opts.fault)
    } else {
        determinism(None, opts.fault)
    };
    results.push(det);
    SuiteReport {
        mode: if opts.quick { "quick" } else { "full" }.into(),
        passed: results.iter().all(|c| c.passed),
        criteria: results,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn suite_gamma(opts: &SuiteOptions, x: f64) -> Result<f64> {
    let g = gamma(x)?;
    Ok(match opts.fault {
        Some(Fault::Gamma) => g * (1.0 + 1e-6),
        None => g,
    })
}

fn c1_special(opts: &SuiteOptions) -> Result<(bool, String)> {
    let cfg = QuadratureConfig::default();
    let mut worst1: f64 = 0.0;
    let mut worst2: f64 = 0.0;
    for i in 0..=40 {
        let t = 0.5 * i as f64;
        worst1 = worst1.max(rel(gamma_q(1.0, t, &cfg)?.value, 2.0 / (1.0 + t * t)));
        let g2 = std::f64::consts::PI.sqrt() * (-t * t / 4.0).exp();
        worst2 = worst2.max(rel(gamma_q(2.0, t, &cfg)?.value, g2));
    }
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let classical = [(0.5, sqrt_pi), (1.0, 1.0), (5.0, 24.0), (-0.5, -2.0 * sqrt_pi)];
    let mut worst_gamma: f64 = 0.0;
    for (x, v) in classical {
        worst_gamma = worst_gamma.max(rel(suite_gamma(opts, x)?, v));
    }
    let s21 = rel(stable_moment(2.0, 1.0)?, 4.0 * sqrt_pi);
    let mut pattern_ok = true;
    let mut checked = 0;
    for q in [2.5, 3.0, 4.7, 8.0] {
        for a in [-0.5_f64, 0.7, 1.9, 2.1, 2.9] {
            if a >= q {
                pattern_ok &= stable_moment(q, a).is_err();
                continue;
            }
            let s = stable_moment(q, a)?;
            let expect_negative = a > 2.0 && a < q.min(4.0);
            pattern_ok &= if expect_negative { s < 0.0 } else { s > 0.0 };
            checked += 1;
        }
    }
    let ok = worst1 <= 1e-8 && worst2 <= 1e-8 && worst_gamma <= 1e-12 && s21 <= 1e-10 && pattern_ok;
    Ok((
        ok,
        format!(
            "gamma_1 rel {worst1:.2e}, gamma_2 rel {worst2:.2e}, Gamma rel {worst_gamma:.2e}, S_2(1) rel {s21:.2e}, \
             S_q signs {} on {checked} points",
            if pattern_ok { "match" } else { "MISMATCH" }
        ),
    ))
}

fn random_xi(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// Uniform on `(lo, hi)`, at least `gap` away from integers.
fn random_p(rng: &mut ChaCha8Rng, lo: f64, hi: f64, gap: f64) -> f64 {
    loop {
        let p: f64 = rng.random_range(lo..hi);
        if (p - p.round()).abs() > gap {
            return p;
        }
    }
}

fn c2_cross(opts: &SuiteOptions) -> Result<(bool, String)> {
    let cases = if opts.quick { 25 } else { 100 };
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cfg = QuadratureConfig::default();
    let mut agree = 0;
    let mut retried = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let n = rng.random_range(2..=5usize);
        let p = random_p(&mut rng, 0.2, n as f64 - 0.2, 1e-3);
        let xi = random_xi(&mut rng, n, 0.2, 3.0);
        let c = ft_linf_closed(p, &xi)?;
        let mut q = ft_linf_quadrature(p, &xi, &cfg)?;
        if !c.agrees_with(&q) {
            retried += 1;
            q = ft_linf_quadrature(p, &xi, &cfg.tightened(100.0))?;
        }
        let gap = (c.value - q.value).abs() / (c.err_estimate + q.err_estimate);
        worst = worst.max(gap);
        if c.agrees_with(&q) {
            agree += 1;
        }
    }
    Ok((
        agree + 1 >= cases,
        format!("{agree}/{cases} agree ({retried} retried), max |diff|/(err sum) = {worst:.3}"),
    ))
}

fn c3_riesz(opts: &SuiteOptions) -> Result<(bool, String)> {
    let cases = if opts.quick { 8 } else { 20 };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let eval = LqEvaluator::new(2.0, &QuadratureConfig::default())?;
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let n = rng.random_range(2..=4usize);
        let p = random_p(&mut rng, 0.2, n as f64 - 0.2, 0.0);
        let xi = random_xi(&mut rng, n, 0.2, 3.0);
        let v = eval.eval(p, &xi)?;
        let nf = n as f64;
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let riesz = 2f64.powf(nf - p) * std::f64::consts::PI.powf(nf / 2.0) * suite_gamma(opts, (nf - p) / 2.0)?
            / suite_gamma(opts, p / 2.0)?
            * r.powf(p - nf);
        worst = worst.max(rel(v.value, riesz));
    }
    Ok((worst <= 1e-6, format!("{cases} cases, max rel err {worst:.2e}")))
}

fn c4_monte_carlo(opts: &SuiteOptions) -> Result<(bool, String)> {
    let cfg = QuadratureConfig {
        mc_samples: if opts.quick { 200_000 } else { 1_000_000 },
        ..QuadratureConfig::default()
    };
    let eval = LqEvaluator::new(3.0, &cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut ok = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let p = random_p(&mut rng, 0.2, 2.8, 0.02);
        let xi = random_xi(&mut rng, 3, 0.5, 2.0);
        let quad = eval.eval(p, &xi)?;
        let mc = ft_lq_via_linf(3.0, p, &xi, &cfg)?;
        let z = (mc.value - quad.value).abs() / (mc.err_estimate / 3.0);
        worst = worst.max(z);
        if mc.agrees_with(&quad) {
            ok += 1;
        }
    }
    Ok((
        ok == 5,
        format!("{ok}/5 within 3 standard errors (max {worst:.2} SE), N = {}", cfg.mc_samples),
    ))
}

fn c5_signs(_opts: &SuiteOptions) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bad = Vec::new();
    for n in 2..=5usize {
        let nf = n as f64;
        for positive in [true, false] {
            let (lo, hi) = if positive { (nf - 2.0, nf) } else { (nf - 3.0, nf - 2.0) };
            let mut wrong = 0;
            for _ in 0..1000 {
                let p = random_p(&mut rng, lo, hi, 1e-3);
                let xi = random_xi(&mut rng, n, 0.05, 2.0);
                let u = u_np(p, &xi)?;
                if (positive && !(u > 0.0)) || (!positive && !(u < 0.0)) {
                    wrong += 1;
                }
            }
            if wrong > 0 {
                bad.push(format!("n={n} {} range: {wrong} wrong signs", if positive { "positive" } else { "negative" }));
            }
        }
    }
    let cfg = ScanConfig::default();
    let mut witnesses = Vec::new();
    for (n, p) in [(4usize, 0.5), (5, 0.5), (5, 1.5)] {
        let r = sign_scan(&SpaceSpec::Linf { n }, p, &cfg)?;
        if r.verdict != Verdict::SignChange {
            bad.push(format!("no witnesses for n={n}, p={p}"));
        }
        witnesses.push(format!("(n={n}, p={p}): {:?}", r.verdict));
    }
    let ok = bad.is_empty();
    let detail = if ok {
        format!("8000 sign-table points correct; {}", witnesses.join(", "))
    } else {
        bad.join("; ")
    };
    Ok((ok, detail))
}

fn c6_critical(opts: &SuiteOptions) -> Result<(bool, String)> {
    let cfg = ScanConfig {
        levels: if opts.quick { 5 } else { 6 },
        ..ScanConfig::default()
    };
    let a = critical_exponent(&SpaceSpec::Linf { n: 4 }, &cfg)?;
    let b = critical_exponent(&SpaceSpec::lq(3.0, 5)?, &cfg)?;
    let c = critical_exponent(&SpaceSpec::Linf { n: 3 }, &cfg)?;
    // The bisection only probes the low end for l_inf^3; sweep the rest.
    let mut sweep_ok = true;
    for p in [0.5, 1.0, 1.5, 2.0, 2.5, 2.95] {
        sweep_ok &= sign_scan(&SpaceSpec::Linf { n: 3 }, p, &cfg)?.verdict != Verdict::SignChange;
    }
    let ok = a.transition
        && (a.estimate - 1.0).abs() <= 0.05
        && b.transition
        && (b.estimate - 2.0).abs() <= 0.05
        && !c.transition
        && sweep_ok;
    Ok((
        ok,
        format!(
            "l_inf^4: {:.4} [{:.4}, {:.4}]; l_3^5: {:.4} [{:.4}, {:.4}]; l_inf^3: {}",
            a.estimate,
            a.lo,
            a.hi,
            b.estimate,
            b.lo,
            b.hi,
            if !c.transition && sweep_ok { "no sign change on (0.05, 2.95)" } else { "unexpected sign change" }
        ),
    ))
}

fn c7_sphere(opts: &SuiteOptions) -> Result<(bool, String)> {
    let cfg = QuadratureConfig {
        rel_tol: 1e-6,
        ..QuadratureConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let norms = if opts.quick { 4 } else { 10 };
    let mut min_scaled = f64::INFINITY;
    let mut negative = 0;
    let mut evals = 0;
    for _ in 0..norms {
        let m = rng.random_range(3..=5usize);
        let atoms: Vec<Vec<f64>> = (0..3).map(|_| random_xi(&mut rng, m, -1.0, 1.0)).collect();
        let r = rng.random_range(0.5..2.0);
        let space = SpaceSpec::spectral(atoms, r)?;
        let xi = random_xi(&mut rng, 3, -1.0, 1.0);
        for p in [2.0, 2.5, 2.9] {
            let v: TransformValue<f64> = ft_sphere(&space, p, &xi, &cfg)?;
            evals += 1;
            if v.value < -v.err_estimate {
                negative += 1;
            }
            min_scaled = min_scaled.min(v.value / v.value.abs().max(v.err_estimate));
        }
    }
    let xi = [1.0, 0.5, 2.0];
    let s = ft_sphere(&SpaceSpec::<f64>::Linf { n: 3 }, 2.3, &xi, &cfg)?;
    let c = ft_linf_closed(2.3, &xi)?;
    let err = rel(s.value, c.value);
    Ok((
        negative == 0 && err <= 1e-4,
        format!("{evals} evaluations on {norms} spectral norms, {negative} negative; l_inf^3 at p=2.3 rel err {err:.2e}"),
    ))
}

fn c8_certificate(_opts: &SuiteOptions) -> Result<(bool, String)> {
    let mut parts = Vec::new();
    let mut ok = true;
    for (q, n, p) in [(3.0, 5usize, 0.5), (4.5, 6, 1.0), (8.0, 5, 1.5)] {
        let c = sign_change_certificate(q, n, p)?;
        ok &= c.i_pos > 0.0 && c.i_neg < 0.0;
        parts.push(format!("(q={q}, n={n}, p={p}): I+ {:.4e}, I- {:.4e}", c.i_pos, c.i_neg));
    }
    Ok((ok, parts.join("; ")))
}

fn c9_sampler(opts: &SuiteOptions) -> Result<(bool, String)> {
    let n: usize = if opts.quick { 200_000 } else { 1_000_000 };
    let tol = 3.0 / (n as f64).sqrt();
    let mut worst: f64 = 0.0;
    for (qi, q) in [0.8, 1.0, 1.5, 2.0].into_iter().enumerate() {
        let mut rng = stream_rng(9, 100 + qi as u64, 0);
        let draws: Vec<f64> = (0..n).map(|_| sample_standard_stable(q, &mut rng)).collect();
        for t in [0.5, 1.0, 2.0] {
            let e = draws.iter().map(|x| (t * x).cos()).sum::<f64>() / n as f64;
            worst = worst.max((e - (-f64::powf(t, q)).exp()).abs() / tol);
        }
    }
    Ok((worst <= 1.0, format!("N = {n}, max deviation {worst:.3} x 3/sqrt(N)")))
}

fn experiment_with_rerun(
    space: &SpaceSpec<f64>,
    spec: &StableSpec,
    p: f64,
    n: usize,
    rerun_n: usize,
) -> Result<(ExperimentVerdict, ExperimentVerdict, String)> {
    let r = correlation_experiment(space, spec, p, n, 42, None)?;
    let summary = |r: &crate::stablesim::StableExperimentReport| {
        format!(
            "E_X {:.5} ± {:.5}, E_Y {:.5} ± {:.5}",
            r.e_x.value, r.e_x.ci_half_width, r.e_y.value, r.e_y.ci_half_width
        )
    };
    if r.verdict == ExperimentVerdict::Inconclusive {
        let r2 = correlation_experiment(space, spec, p, rerun_n, 42, None)?;
        return Ok((r.verdict, r2.verdict, format!("{} -> rerun {}", summary(&r), summary(&r2))));
    }
    Ok((r.verdict, r.verdict, summary(&r)))
}

fn c10_negative_moments(opts: &SuiteOptions) -> Result<(bool, String)> {
    let (n, rerun) = if opts.quick { (50_000, 200_000) } else { (200_000, 1_000_000) };
    let mut inconclusive = 0;
    let mut ok = true;
    let mut parts = Vec::new();
    for q in [1.5, 2.0] {
        for space in [SpaceSpec::Linf { n: 4 }, SpaceSpec::lq(3.0, 4)?] {
            let spec = StableSpec::new(q, StableSpec::coupled_atoms(4), 2)?;
            let (first, last, s) = experiment_with_rerun(&space, &spec, -1.5, n, rerun)?;
            if first == ExperimentVerdict::Inconclusive {
                inconclusive += 1;
            }
            ok &= last == ExperimentVerdict::InequalityHolds;
            parts.push(format!("{space}, q={q}: {first:?} ({s})"));
        }
    }
    ok &= inconclusive <= 1;
    Ok((ok, parts.join("; ")))
}

fn c11_positive_moments(opts: &SuiteOptions) -> Result<(bool, String)> {
    let (n, rerun) = if opts.quick { (50_000, 200_000) } else { (200_000, 1_000_000) };
    let spec = StableSpec::new(2.0, StableSpec::coupled_atoms(3), 1)?;
    let (a0, a1, sa) = experiment_with_rerun(&SpaceSpec::lq(1.0, 3)?, &spec, 1.0, n, rerun)?;
    let (b0, b1, sb) = experiment_with_rerun(&SpaceSpec::lq(2.0, 3)?, &spec, 3.0, n, rerun)?;
    let ok = a1 == ExperimentVerdict::InequalityHolds && b1 == ExperimentVerdict::InequalityHolds;
    Ok((
        ok,
        format!("l_1^3, p=1, E_X <= E_Y: {a0:?}/{a1:?} ({sa}); l_2^3, p=3, E_X >= E_Y: {b0:?}/{b1:?} ({sb})"),
    ))
}

fn c12_clarkson(_opts: &SuiteOptions) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut failures = 0;
    let draw = |rng: &mut ChaCha8Rng| {
        let m = rng.random_range(1..=8usize);
        let scale = 10f64.powf(rng.random_range(-1.0..1.0));
        let x: Vec<f64> = (0..m).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..m).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
        (x, y)
    };
    for _ in 0..10_000 {
        let (x, y) = draw(&mut rng);
        let q: f64 = rng.random_range(0.05..=2.0);
        let p = rng.random_range(0.0..q).max(1e-3);
        let r = clarkson_check(&x, &y, q, p)?;
        if !(r.exponential && r.power == Some(true) && r.clarkson) {
            failures += 1;
        }
    }
    let mut reversed_failures = 0;
    for _ in 0..1_000 {
        let (x, y) = draw(&mut rng);
        if clarkson_check(&x, &y, 2.0, 3.0)?.power != Some(true) {
            reversed_failures += 1;
        }
    }
    Ok((
        failures == 0 && reversed_failures == 0,
        format!("{failures}/10000 failures for q <= 2, p <= q; {reversed_failures}/1000 for the reversed q = 2, p = 3"),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_fault_is_caught_by_name() {
        let clean = c1_special(&SuiteOptions::default()).unwrap();
        assert!(clean.0, "{}", clean.1);
        let opts = SuiteOptions {
            quick: true,
            fault: Some(Fault::Gamma),
        };
        let c = criteria().into_iter().find(|c| c.id == 1).unwrap();
        let r = run_one(&c, &opts);
        assert!(!r.passed);
        assert_eq!(r.name, "special-function oracles");
    }

    #[test]
    fn equality_ignores_timing() {
        let mk = |ms| CriterionResult {
            id: 1,
            name: "x".into(),
            passed: true,
            detail: "d".into(),
            elapsed: Duration::from_millis(ms),
        };
        assert_eq!(mk(1), mk(500));
    }
}
