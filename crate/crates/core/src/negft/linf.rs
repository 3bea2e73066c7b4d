//! Transform of `‖x‖_∞^{-p}`: closed form and oscillatory quadrature.

use num_complex::Complex;

use crate::config::QuadratureConfig;
use crate::error::{Error, Result};
use crate::quad::{self, Estimate};
use crate::scalar::{near_integer, Real};
use crate::specfun::gamma;

use super::signsum::sign_sum;
use super::{check_p_range, check_xi, Method, TransformValue};

/// Closed form through the sign sums, for `p > 0` not an integer.
///
/// The committed error is `1e-12·|value|` plus the rounding error of the
/// alternating sign sum, which dominates when `p` is close to `n`.
pub fn ft_linf_closed<T: Real>(p: T, xi: &[T]) -> Result<TransformValue<T>> {
    check_xi(xi)?;
    let pref = closed_prefactor(p, xi.len())?;
    // The sign sum is odd in each coordinate, so the signed product keeps
    // the transform even.
    let prod = xi.iter().fold(T::one(), |acc, &x| acc * x);
    let (sum, abs_sum) = sign_sum(p, xi, xi.len() % 2 == 1)?;
    let scale = pref / prod;
    let value = scale * sum;
    let rounding = T::lit(8.0) * T::from_count(xi.len() + 2) * T::epsilon() * abs_sum * scale.abs();
    let err = T::lit(1e-12) * value.abs() + rounding + T::lit(1e-300);
    Ok(TransformValue::new(value, err, Method::Closed))
}

/// The `ξ`-independent part of the closed form (everything except the sign
/// sum and `1/∏ξ_k`).
pub(crate) fn closed_prefactor<T: Real>(p: T, n: usize) -> Result<T> {
    if !(p > T::zero()) || !p.is_finite() {
        return Err(Error::domain(format!("closed form needs p > 0, got {p}")));
    }
    if near_integer(p, T::zero()) {
        return Err(Error::domain(format!(
            "closed form needs non-integer p, got {p}; use the quadrature route"
        )));
    }
    let half = T::lit(0.5);
    let base = T::lit(2.0).powf(-p) * T::PI().sqrt();
    let v = if n % 2 == 1 {
        let sign = if (n - 1) / 2 % 2 == 0 { T::one() } else { -T::one() };
        sign * base * gamma((T::one() - p) * half)? / gamma(p * half)?
    } else {
        let sign = if (n / 2 + 1) % 2 == 0 { T::one() } else { -T::one() };
        sign * base * gamma((T::lit(2.0) - p) * half)? / gamma((p + T::one()) * half)?
    };
    Ok(v)
}

/// `2^n p ∫_0^∞ t^{-p-1} ∏ sin(tξ_k)/ξ_k dt`, valid for every `p ∈ (0, n)`.
///
/// The integral is split at `t0` and `T`. On `[0, t0]` the substitution
/// `t = t0·w^{1/(n-p)}` removes the algebraic singularity. The tail
/// `[T, ∞)` is expanded into exponentials `e^{iωt}` and each term is moved
/// onto the ray `t = T(1 + iσ)`, where it decays exponentially; no
/// truncation is involved.
pub fn ft_linf_quadrature<T: Real>(p: T, xi: &[T], cfg: &QuadratureConfig) -> Result<TransformValue<T>> {
    check_xi(xi)?;
    cfg.validate()?;
    let n = xi.len();
    check_p_range(p, n)?;
    let a: Vec<T> = xi.iter().map(|x| x.abs()).collect();
    let omega: T = a.iter().copied().sum();
    let nf = T::from_count(n);
    let two = T::lit(2.0);
    let outer = two.powi(n as i32) * p;

    // Pieces are computed for the integral of t^{-p-1} ∏ sin(t a_k)/a_k.
    let mut opts = cfg.opts::<T>();
    opts.abs_tol = opts.abs_tol / (outer * T::lit(3.0));

    let t0 = T::FRAC_PI_2() / omega;
    let big_t = T::lit(16.0) * T::PI() / omega;

    let m = nf - p;
    let head = quad::integrate(
        |w: T| {
            let t = t0 * w.powf(T::one() / m);
            a.iter().fold(T::one(), |acc, &ak| acc * sinc(t * ak))
        },
        &[T::zero(), T::lit(0.5), T::one()],
        opts,
    )?
    .scale(t0.powf(m) / m);

    let pieces = 32usize;
    let breaks: Vec<T> = (0..=pieces)
        .map(|i| t0 + (big_t - t0) * T::from_count(i) / T::from_count(pieces))
        .collect();
    let mid = quad::integrate(
        |t: T| t.powf(-p - T::one()) * a.iter().fold(T::one(), |acc, &ak| acc * (t * ak).sin() / ak),
        &breaks,
        opts,
    )?;

    let tail = contour_tail(p, &a, big_t, opts)?;
    let total = head.add(mid).add(tail).scale(outer);
    Ok(TransformValue::new(total.value, total.err, Method::QuadLinf))
}

/// Series-safe `sin(x)/x`.
#[inline]
pub(crate) fn sinc<T: Real>(x: T) -> T {
    if x.abs() < T::lit(1e-4) {
        T::one() - x * x / T::lit(6.0)
    } else {
        x.sin() / x
    }
}

/// `∫_T^∞ t^{-p-1} ∏ sin(t a_k)/a_k dt` through the exponential expansion
/// `∏ sin(t a_k) = (2i)^{-n} Σ_δ ∏δ_k e^{it(δ·a)}`.
///
/// With `J(ω) = ∫_T^∞ t^{-p-1} e^{iωt} dt = i T^{-p} e^{iωT} K(ωT)` and
/// `K(α) = ∫_0^∞ (1+iσ)^{-p-1} e^{-ασ} dσ` for `ω ≥ 0` (`J(-ω)` is the
/// conjugate), pairing `δ` with `-δ` leaves `2^{1-n}(-1)^{n/2} Σ' ∏δ Re J`
/// for even `n` and `2^{1-n}(-1)^{(n-1)/2} Σ' ∏δ Im J` for odd `n`, the
/// primed sum running over `δ_1 = +1`. All `K` integrals share the variable
/// `w` from `σ = w^{-1/p} - 1`, so the tail is one bounded integral on
/// `(0, 1]`.
fn contour_tail<T: Real>(p: T, a: &[T], big_t: T, opts: quad::AdaptiveOpts<T>) -> Result<Estimate<T>> {
    let n = a.len();
    let half = 1usize << (n - 1);
    // (sign, ω) for each pattern with δ_1 = +1.
    let patterns: Vec<(T, T)> = (0..half)
        .map(|mask| {
            let mut w = a[0];
            let mut parity = false;
            for (k, &ak) in a.iter().enumerate().skip(1) {
                if mask >> (k - 1) & 1 == 1 {
                    w = w - ak;
                    parity = !parity;
                } else {
                    w = w + ak;
                }
            }
            (if parity { -T::one() } else { T::one() }, w)
        })
        .collect();
    let even = n % 2 == 0;
    let quarter_turns = if even { n / 2 } else { (n - 1) / 2 };
    let outer_sign = if quarter_turns % 2 == 0 { T::one() } else { -T::one() };
    let prod: T = a.iter().fold(T::one(), |acc, &x| acc * x);
    let scale = outer_sign * T::lit(2.0).powi(1 - n as i32) * big_t.powf(-p) / (p * prod);
    let pp1 = p + T::one();

    let integrand = |w: T| {
        let sigma = w.powf(-T::one() / p) - T::one();
        // (1+iσ)^{-p-1} w^{-1/p-1}, assembled in polar form.
        let ln_w = w.ln();
        let ln_r = T::lit(0.5) * (sigma * sigma).ln_1p() ;
        let phase = -pp1 * sigma.atan();
        let mut acc = T::zero();
        for &(sign, om) in &patterns {
            let alpha = om.abs() * big_t;
            let mag = ((-T::one() / p - T::one()) * ln_w - pp1 * ln_r - alpha * sigma).exp();
            if mag == T::zero() {
                continue;
            }
            let g = Complex::from_polar(mag, phase);
            let z = Complex::from_polar(T::one(), alpha) * g;
            // J ∝ i z for ω ≥ 0 and its conjugate for ω < 0.
            let contrib = if even { -z.im } else if om >= T::zero() { z.re } else { -z.re };
            acc = acc + sign * contrib;
        }
        acc
    };
    let mut breaks = vec![T::zero()];
    for k in 1..=6 {
        breaks.push(T::one() - T::lit(10f64.powi(-k)));
    }
    breaks.push(T::one());
    let mut tol = opts;
    tol.abs_tol = tol.abs_tol / scale.abs();
    let e = quad::integrate(integrand, &breaks, tol)?;
    let mut e = e.scale(scale);
    // Rounding in the pattern sum: every |K| ≤ 1/p.
    e.err = e.err + T::lit(8.0) * T::epsilon() * T::from_count(half) * scale.abs() / p;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::c_p;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn one_dimensional_reduction() {
        // (|x|^{-p})^∧ = c_{-p} |ξ|^{p-1}
        for (p, x) in [(0.5_f64, 2.0_f64), (0.3, 0.7), (0.8, 5.0)] {
            let v = ft_linf_closed(p, &[x]).unwrap().value;
            let oracle = c_p(-p).unwrap() * x.abs().powf(p - 1.0);
            assert!(((v - oracle) / oracle).abs() < 1e-12, "{v} {oracle}");
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let cases: [(f64, &[f64]); 5] = [
            (1.3, &[0.7, 1.1, 2.3]),
            (0.5, &[1.0, 2.0]),
            (2.5, &[1.0, 2.0, 0.5, 0.7]),
            (0.4, &[1.0, 0.3, 0.8, 0.5, 1.5]),
            (0.6, &[1.3]),
        ];
        for (p, xi) in cases {
            let c = ft_linf_closed(p, xi).unwrap();
            let q = ft_linf_quadrature(p, xi, &cfg()).unwrap();
            assert!(c.agrees_with(&q), "p={p} xi={xi:?}: {} vs {} (err {})", c.value, q.value, q.err_estimate);
        }
    }

    #[test]
    fn quadrature_at_integer_p() {
        let v = ft_linf_quadrature(1.0_f64, &[1.0, 1.0], &cfg()).unwrap();
        assert!(v.value.is_finite() && v.err_estimate < 1e-6);
        // Continuity in p from both sides.
        let lo = ft_linf_quadrature(0.999_f64, &[1.0, 1.0], &cfg()).unwrap().value;
        let hi = ft_linf_quadrature(1.001_f64, &[1.0, 1.0], &cfg()).unwrap().value;
        assert!((v.value - 0.5 * (lo + hi)).abs() < 1e-3 * v.value.abs().max(1.0));
    }

    #[test]
    fn homogeneity() {
        let xi = [0.4_f64, 1.0, 0.9, 1.7];
        let p = 2.5;
        let xi2: Vec<f64> = xi.iter().map(|x| 2.0 * x).collect();
        let a = ft_linf_quadrature(p, &xi, &cfg()).unwrap();
        let b = ft_linf_quadrature(p, &xi2, &cfg()).unwrap();
        let f = 2f64.powf(p - 4.0);
        assert!((b.value - f * a.value).abs() <= 2.0 * (b.err_estimate + f * a.err_estimate));
    }

    #[test]
    fn closed_form_rejects_integer_p() {
        assert!(ft_linf_closed(2.0_f64, &[1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn single_precision_closed_form() {
        let a = ft_linf_closed(1.5_f32, &[1.0, 1.0, 1.0]).unwrap().value;
        let b = ft_linf_closed(1.5_f64, &[1.0, 1.0, 1.0]).unwrap().value;
        assert!(((a as f64 - b) / b).abs() < 1e-4);
    }
}
