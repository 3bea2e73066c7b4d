//! Transform of `‖x‖_q^{-p}`: one-dimensional `γ_q` integral and the Monte
//! Carlo reduction to the max-norm.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

use crate::config::QuadratureConfig;
use crate::error::{Error, Result};
use crate::quad::{self, Estimate};
use crate::scalar::{near_integer, Real};
use crate::specfun::{gamma, gamma_q, gamma_q_asymptotic};

use super::linf::closed_prefactor;
use super::signsum::sign_sum;
use super::{check_p_range, check_xi, Method, TransformValue};

const CHEB_NODES: usize = 25;

#[derive(Debug, Clone)]
struct ChebPanel<T> {
    a: T,
    b: T,
    coeffs: Vec<T>,
    err: T,
}

impl<T: Real> ChebPanel<T> {
    fn eval(&self, s: T) -> T {
        let y = (T::lit(2.0) * s - self.a - self.b) / (self.b - self.a);
        let y2 = y + y;
        let (mut b1, mut b2) = (T::zero(), T::zero());
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + y2 * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + y * b1 - b2
    }
}

#[derive(Debug, Clone)]
enum Kind<T> {
    /// `q = 2`: `γ_2(s) = √π e^{-s²/4}` exactly.
    Gaussian,
    Table {
        panels: Vec<ChebPanel<T>>,
        end: T,
        /// Past `end`: Pólya series (`true`) or negligible (`false`, even q).
        series: bool,
        /// Bound on `|γ_q|` past `end` when it is treated as zero.
        beyond_bound: T,
    },
}

/// `γ_q` on `[0, ∞)` for one `q`: piecewise Chebyshev interpolation of
/// quadrature values on `[0, s_switch]`, the Pólya series beyond it (or zero
/// for even `q`, whose `γ_q` decays exponentially).
///
/// Built once and then read-only, so it can be shared between threads.
#[derive(Debug, Clone)]
pub struct GammaQTable<T> {
    q: T,
    kind: Kind<T>,
    err: T,
}

impl<T: Real> GammaQTable<T> {
    pub fn build(q: T, cfg: &QuadratureConfig) -> Result<Self> {
        if !(q > T::zero()) || !q.is_finite() {
            return Err(Error::domain(format!("q must lie in (0, inf), got {q}")));
        }
        if q == T::lit(2.0) {
            return Ok(GammaQTable {
                q,
                kind: Kind::Gaussian,
                err: T::zero(),
            });
        }
        let node_cfg = QuadratureConfig {
            rel_tol: 1e-13,
            // Near the Gauss–Kronrod rounding floor of a unit-size integrand.
            abs_tol: 5e-14,
            max_panels: 20_000,
            ..cfg.clone()
        };
        let scale = T::lit(2.0) * gamma(T::one() + T::one() / q)?;
        let even = near_integer(q * T::lit(0.5), T::zero());
        let (end, beyond_bound) = if even {
            negligible_point(q, scale, &node_cfg)?
        } else {
            (series_switch(q)?, T::zero())
        };
        let width = T::one();
        let pieces = (end / width).ceil().to_usize().unwrap_or(1).max(1);
        let step = end / T::from_count(pieces);
        let tol = T::lit(1e-14) * scale;
        let chunks: Vec<Result<Vec<ChebPanel<T>>>> = (0..pieces)
            .into_par_iter()
            .map(|i| {
                let a = step * T::from_count(i);
                let b = if i + 1 == pieces { end } else { step * T::from_count(i + 1) };
                let mut out = Vec::new();
                fit_adaptive(q, a, b, tol, &node_cfg, 0, &mut out)?;
                Ok(out)
            })
            .collect();
        let mut panels = Vec::new();
        for c in chunks {
            panels.extend(c?);
        }
        let err = panels.iter().fold(beyond_bound, |m, p| m.max(p.err));
        Ok(GammaQTable {
            q,
            kind: Kind::Table {
                panels,
                end,
                series: !even,
                beyond_bound,
            },
            err,
        })
    }

    pub fn q(&self) -> T {
        self.q
    }

    /// Largest absolute error of the table part.
    pub fn max_err(&self) -> T {
        self.err
    }

    /// Argument past which the table hands over to the series (or to zero).
    pub fn switch_point(&self) -> Option<T> {
        match &self.kind {
            Kind::Gaussian => None,
            Kind::Table { end, .. } => Some(*end),
        }
    }

    /// `(γ_q(s), error bound)`.
    pub fn eval(&self, s: T) -> (T, T) {
        let s = s.abs();
        match &self.kind {
            Kind::Gaussian => {
                let v = T::PI().sqrt() * (-(s * s) * T::lit(0.25)).exp();
                (v, T::lit(4.0) * T::epsilon() * v)
            }
            Kind::Table {
                panels,
                end,
                series,
                beyond_bound,
            } => {
                if s <= *end {
                    let i = panels.partition_point(|p| p.b < s).min(panels.len() - 1);
                    let p = &panels[i];
                    (p.eval(s), p.err)
                } else if *series {
                    match gamma_q_asymptotic(self.q, s, T::lit(1e-15)) {
                        Some(v) => v,
                        None => (T::zero(), T::infinity()),
                    }
                } else {
                    (T::zero(), *beyond_bound)
                }
            }
        }
    }
}

fn gamma_q_lenient<T: Real>(q: T, s: T, cfg: &QuadratureConfig) -> Result<(T, T)> {
    match gamma_q(q, s, cfg) {
        Ok(e) => Ok((e.value, e.err)),
        Err(Error::NonConvergence { estimate, err_bound, .. }) => Ok((T::lit(estimate), T::lit(err_bound))),
        Err(e) => Err(e),
    }
}

fn fit_adaptive<T: Real>(
    q: T,
    a: T,
    b: T,
    tol: T,
    cfg: &QuadratureConfig,
    depth: usize,
    out: &mut Vec<ChebPanel<T>>,
) -> Result<()> {
    let nn = CHEB_NODES;
    let mut f = Vec::with_capacity(nn);
    let mut node_err = T::zero();
    let half = T::lit(0.5);
    for j in 0..nn {
        let x = (T::PI() * (T::from_count(j) + half) / T::from_count(nn)).cos();
        let s = half * (a + b) + half * (b - a) * x;
        let (v, e) = gamma_q_lenient(q, s, cfg)?;
        f.push(v);
        node_err = node_err.max(e);
    }
    let mut coeffs = Vec::with_capacity(nn);
    for k in 0..nn {
        let mut c = T::zero();
        for (j, &fj) in f.iter().enumerate() {
            let ang = T::PI() * T::from_count(k) * (T::from_count(j) + half) / T::from_count(nn);
            c = c + fj * ang.cos();
        }
        c = c * T::lit(2.0) / T::from_count(nn);
        if k == 0 {
            c = c * half;
        }
        coeffs.push(c);
    }
    let tail = coeffs[nn - 3..].iter().fold(T::zero(), |acc, c| acc + c.abs());
    let accept = tail <= tol.max(T::lit(16.0) * node_err);
    if accept || depth >= 10 {
        // Truncation of the series plus the amplified node noise (the
        // Lebesgue constant of 25 Chebyshev nodes is below 3).
        let err = T::lit(2.0) * tail + T::lit(3.0) * node_err;
        out.push(ChebPanel { a, b, coeffs, err });
        return Ok(());
    }
    let mid = half * (a + b);
    fit_adaptive(q, a, mid, tol, cfg, depth + 1, out)?;
    fit_adaptive(q, mid, b, tol, cfg, depth + 1, out)
}

/// Smallest `s` (on a geometric grid) from which the Pólya series reaches
/// relative accuracy `2e-14` at `s`, `1.5s` and `3s`.
fn series_switch<T: Real>(q: T) -> Result<T> {
    let rel = T::lit(1e-15);
    let ok = |s: T| match gamma_q_asymptotic(q, s, rel) {
        Some((v, e)) => e <= T::lit(2e-14) * v.abs() + T::lit(1e-300),
        None => false,
    };
    let mut s = T::lit(2.0);
    while s < T::lit(600.0) {
        if ok(s) && ok(s * T::lit(1.5)) && ok(s * T::lit(3.0)) {
            return Ok(s);
        }
        s = s * T::lit(1.1);
    }
    Err(Error::NoEvaluator(format!(
        "the asymptotic series of gamma_q does not settle below t = 600 for q = {q}"
    )))
}

/// For even `q`: a point past which `|γ_q| + err` stays below
/// `1e-14·γ_q(0)` on six consecutive half-unit steps.
fn negligible_point<T: Real>(q: T, scale: T, cfg: &QuadratureConfig) -> Result<(T, T)> {
    let bound = T::lit(1e-14) * scale;
    let mut run = 0;
    let mut s = T::zero();
    while s < T::lit(400.0) {
        s = s + T::lit(0.5);
        let (v, e) = gamma_q_lenient(q, s, cfg)?;
        if v.abs() + e < bound {
            run += 1;
            if run == 6 {
                return Ok((s, bound));
            }
        } else {
            run = 0;
        }
    }
    Err(Error::NoEvaluator(format!("gamma_q does not become negligible for q = {q}")))
}

/// Evaluator for `(‖x‖_q^{-p})^∧` holding the `γ_q` table for one `q`.
#[derive(Debug, Clone)]
pub struct LqEvaluator<T> {
    table: GammaQTable<T>,
    cfg: QuadratureConfig,
}

impl<T: Real> LqEvaluator<T> {
    pub fn new(q: T, cfg: &QuadratureConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(LqEvaluator {
            table: GammaQTable::build(q, cfg)?,
            cfg: cfg.clone(),
        })
    }

    pub fn q(&self) -> T {
        self.table.q
    }

    pub fn table(&self) -> &GammaQTable<T> {
        &self.table
    }

    /// `q/Γ(p/q) ∫_0^∞ t^{n-p-1} ∏ γ_q(tξ_k) dt`.
    ///
    /// The error bound adds the quadrature error to the integral of the
    /// first-order propagation of the `γ_q` errors through the product.
    pub fn eval(&self, p: T, xi: &[T]) -> Result<TransformValue<T>> {
        check_xi(xi)?;
        let n = xi.len();
        check_p_range(p, n)?;
        let q = self.table.q;
        let a: Vec<T> = xi.iter().map(|x| x.abs()).collect();
        let a_max = a.iter().fold(T::zero(), |m, &x| m.max(x));
        let a_min = a.iter().fold(T::infinity(), |m, &x| m.min(x));
        let pref = q / gamma(p / q)?;
        let m = T::from_count(n) - p;

        let product = |t: T| -> (T, T) {
            let mut vals = [T::zero(); super::MAX_DIM];
            let mut errs = [T::zero(); super::MAX_DIM];
            let mut prod = T::one();
            for (k, &ak) in a.iter().enumerate() {
                let (v, e) = self.table.eval(t * ak);
                vals[k] = v;
                errs[k] = e;
                prod = prod * v;
            }
            let mut env = T::zero();
            for k in 0..n {
                let mut others = errs[k];
                for j in 0..n {
                    if j != k {
                        others = others * (vals[j].abs() + errs[j]);
                    }
                }
                env = env + others;
            }
            (prod, env)
        };

        let mut opts = self.cfg.opts::<T>();
        opts.abs_tol = opts.abs_tol / (pref.abs() * T::lit(3.0));
        let mut env_opts = opts;
        env_opts.rel_tol = T::lit(0.05);
        env_opts.abs_tol = opts.abs_tol;

        let t0 = T::one() / a_max;
        let reach = match self.table.switch_point() {
            Some(e) => e,
            None => T::lit(12.0),
        };
        let t1 = (reach / a_min).max(t0 * T::lit(2.0));

        // Head: t = t0 w^{1/m}.
        let head_map = |w: T| t0 * w.powf(T::one() / m);
        let head_scale = t0.powf(m) / m;
        let head_breaks = [T::zero(), T::lit(0.5), T::one()];
        let head = quad::integrate(|w: T| product(head_map(w)).0, &head_breaks, opts)?.scale(head_scale);
        let head_env = envelope(|w: T| product(head_map(w)).1, &head_breaks, env_opts)?.scale(head_scale);

        // Middle: geometric panels plus the points where a coordinate leaves the table.
        let mut breaks = vec![t0];
        let mut t = t0;
        while t * T::lit(1.2) < t1 {
            t = t * T::lit(1.2);
            breaks.push(t);
        }
        for &ak in &a {
            let b = reach / ak;
            if b > t0 && b < t1 {
                breaks.push(b);
            }
        }
        breaks.push(t1);
        breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
        breaks.dedup_by(|x, y| (*x - *y).abs() <= T::epsilon() * y.abs() * T::lit(16.0));
        let body = |t: T| t.powf(m - T::one());
        let mid = quad::integrate(|t: T| body(t) * product(t).0, &breaks, opts)?;
        let mid_env = envelope(|t: T| body(t) * product(t).1, &breaks, env_opts)?;

        // Tail: t = t1/u on (0, 1].
        let tail_f = |u: T, pick_env: bool| {
            let t = t1 / u;
            let (v, e) = product(t);
            let w = body(t) * t1 / (u * u);
            if pick_env {
                w * e
            } else {
                w * v
            }
        };
        let tail_breaks = [T::zero(), T::lit(0.01), T::lit(0.1), T::lit(0.5), T::one()];
        let tail = quad::integrate(|u: T| tail_f(u, false), &tail_breaks, opts)?;
        let tail_env = envelope(|u: T| tail_f(u, true), &tail_breaks, env_opts)?;

        let total = head.add(mid).add(tail).scale(pref);
        let env = (head_env.value + mid_env.value + tail_env.value) * pref.abs();
        Ok(TransformValue::new(
            total.value,
            total.err + T::lit(1.1) * env,
            Method::QuadLq,
        ))
    }
}

/// Integral of a nonnegative error envelope; a failed refinement still
/// yields a usable upper estimate.
fn envelope<T: Real, F: FnMut(T) -> T>(f: F, breaks: &[T], opts: quad::AdaptiveOpts<T>) -> Result<Estimate<T>> {
    match quad::integrate(f, breaks, opts) {
        Ok(mut e) => {
            e.value = e.value.abs() + e.err;
            Ok(e)
        }
        Err(Error::NonConvergence { estimate, err_bound, .. }) => {
            let mut e = Estimate::zero();
            e.value = T::lit(estimate.abs() + err_bound);
            Ok(e)
        }
        Err(e) => Err(e),
    }
}

/// One-shot `ℓ_q` transform; builds the `γ_q` table for this call. Use
/// [`LqEvaluator`] to amortize the table over many points.
pub fn ft_lq_quadrature<T: Real>(q: T, p: T, xi: &[T], cfg: &QuadratureConfig) -> Result<TransformValue<T>> {
    check_xi(xi)?;
    check_p_range(p, xi.len())?;
    LqEvaluator::new(q, cfg)?.eval(p, xi)
}

const MC_BLOCKS: u64 = 64;

/// `ℓ_q` transform as an average of max-norm transforms:
/// `q Γ(1+1/q)^n / (p Γ(p/q)) · E[(‖x‖_∞^{-p})^∧(t_1ξ_1, …, t_nξ_n)]`
/// with independent `t_k` of density `q t^q e^{-t^q} / Γ(1+1/q)`, i.e.
/// `t_k = u^{1/q}` for `u ~ Gamma(1+1/q)`.
///
/// `cfg.mc_samples` draws are split into fixed blocks with their own ChaCha
/// streams, so the result does not depend on the thread count. The error
/// bound is three standard errors; `converged` is false when the standard
/// error exceeds `mc_rel_tol·|value|`.
pub fn ft_lq_via_linf(q: f64, p: f64, xi: &[f64], cfg: &QuadratureConfig) -> Result<TransformValue<f64>> {
    check_xi(xi)?;
    cfg.validate()?;
    let n = xi.len();
    check_p_range(p, n)?;
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::domain(format!("q must lie in (0, inf), got {q}")));
    }
    if cfg.mc_samples < 2 {
        return Err(Error::invalid("mc_samples must be at least 2"));
    }
    let inner = closed_prefactor(p, n)?;
    let shape = Gamma::new(1.0 + 1.0 / q, 1.0).map_err(|e| Error::invalid(e.to_string()))?;
    let signed = n % 2 == 1;
    let per_block = cfg.mc_samples.div_ceil(MC_BLOCKS as usize);
    let blocks: Vec<Result<(usize, f64, f64)>> = (0..MC_BLOCKS)
        .into_par_iter()
        .map(|b| {
            let start = b as usize * per_block;
            let count = per_block.min(cfg.mc_samples.saturating_sub(start));
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.mc_seed);
            rng.set_stream(b);
            let mut eta = vec![0.0; n];
            let (mut mean, mut m2) = (0.0, 0.0);
            for i in 0..count {
                let mut prod = 1.0;
                for (e, &x) in eta.iter_mut().zip(xi) {
                    let t = shape.sample(&mut rng).powf(1.0 / q);
                    *e = t * x.abs();
                    prod *= *e;
                }
                let (s, _) = sign_sum(p, &eta, signed)?;
                let v = inner * s / prod;
                let d = v - mean;
                mean += d / (i + 1) as f64;
                m2 += d * (v - mean);
            }
            Ok((count, mean, m2))
        })
        .collect();
    let (mut count, mut mean, mut m2) = (0usize, 0.0, 0.0);
    for blk in blocks {
        let (c, m, s) = blk?;
        if c == 0 {
            continue;
        }
        let total = count + c;
        let d = m - mean;
        mean += d * c as f64 / total as f64;
        m2 += s + d * d * (count as f64) * (c as f64) / total as f64;
        count = total;
    }
    let factor = q * gamma(1.0 + 1.0 / q)?.powi(n as i32) / (p * gamma(p / q)?);
    let se = (m2 / ((count - 1) as f64) / count as f64).sqrt() * factor.abs();
    let value = factor * mean;
    let mut tv = TransformValue::new(value, 3.0 * se, Method::LqViaLinf);
    tv.converged = se <= cfg.mc_rel_tol * value.abs();
    Ok(tv)
}
